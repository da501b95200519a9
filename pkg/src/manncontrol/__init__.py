from .plant import make_example1, scenario_preset, validate_assumption, CommandSignal, ScenarioScript, ScenarioEvent
from .controller import ControllerConfig, Mode, control_step
from .simulator import RunConfig, simulate
from .metrics import settling_time, peak_deviation, comparison_table, SettlingSpec
from .helper_mods.config_helpers import load_config
from .cli import run_experiment
