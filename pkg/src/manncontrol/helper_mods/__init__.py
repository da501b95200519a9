from .errors import DimensionError
from .errors import ConfigError
from .errors import AssumptionError
from .errors import NumericError
from .errors import DivergenceError
from .io_helpers import write_trajectory_csv
from .io_helpers import read_trajectory_csv
