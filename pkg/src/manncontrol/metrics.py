#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Recovery metrics after abrupt changes: settling time into an error band,
peak deviation, and the side-by-side comparison of controller modes.
"""

import math
import logging
from dataclasses import dataclass
import numpy as np
import pandas as pd
from .helper_mods.errors import ConfigError

logging.basicConfig(level=logging.INFO, format='%(message)s')

NOT_SETTLED = float("nan")


@dataclass(frozen=True)
class SettlingSpec:
    """
    Error band for settling.

    band_mode 'relative' uses band_fraction * |y_d| at each sample,
    'absolute' uses band_fraction itself.
    """
    band_fraction: float = 0.001
    band_mode: str = "relative"

    def __post_init__(self):
        if not self.band_fraction > 0:
            raise ConfigError(f"band_fraction must be positive, got {self.band_fraction}.")
        if self.band_mode not in ("relative", "absolute"):
            raise ConfigError(f"{self.band_mode} is not a valid band mode. Use 'relative' or 'absolute'.")

    def band(self, y_d):
        y_d = np.asarray(y_d, dtype=float)
        if self.band_mode == "relative":
            return self.band_fraction * np.abs(y_d)
        return np.full(y_d.shape, self.band_fraction)


def _frame(traj):
    return traj.frame if hasattr(traj, "frame") else traj


def _window(traj, start, end=None):
    frame = _frame(traj)
    t = frame["t"].to_numpy()
    if end is None:
        end = t[-1]
    mask = (t >= start) & (t <= end)
    if not mask.any():
        raise ValueError(f"No trajectory samples fall in the window [{start}, {end}].")
    return t[mask], frame["y"].to_numpy()[mask], frame["y_d"].to_numpy()[mask]


def window_end(traj, event_t, events):
    """End of the evaluation window for an event: the next event, or the last sample."""
    later = [t for t in events if t > event_t]
    return min(later) if later else float(_frame(traj)["t"].iloc[-1])


def settling_time(traj, event_t, spec=None, end=None):
    """
    Time after event_t until |y - y_d| enters the band and stays in it until the window ends.

    Parameters
    --------
    traj: Trajectory or DataFrame with columns t, y, y_d
    event_t: float, start of the window
    spec: SettlingSpec, defaults to 0.1% of |y_d|
    end: float, end of the window (defaults to the last sample)

    Return
    --------
    float seconds, or NOT_SETTLED (nan) if the error is outside the band at the end of the window.

    Example
    --------
    >>> settling_time(traj, 10.0, SettlingSpec(0.001), end=20.0)
    """
    spec = SettlingSpec() if spec is None else spec
    t, y, y_d = _window(traj, event_t, end)
    inside = np.abs(y - y_d) <= spec.band(y_d)
    if not inside[-1]:
        return NOT_SETTLED
    outside = np.flatnonzero(~inside)
    first = 0 if len(outside) == 0 else outside[-1] + 1
    return float(t[first] - event_t)


def peak_deviation(traj, event_t, end=None):
    """Largest |y - y_d| over the window starting at event_t."""
    _, y, y_d = _window(traj, event_t, end)
    return float(np.max(np.abs(y - y_d)))


def event_metrics(traj, events, spec=None):
    """Settling time and peak deviation after each change of one trajectory, one row per change."""
    spec = SettlingSpec() if spec is None else spec
    rows = []
    for i, t in enumerate(events, start=1):
        end = window_end(traj, t, events)
        rows.append({"change": i, "event_t": t, "window_end": end,
                     "settling_time": settling_time(traj, t, spec, end),
                     "peak_deviation": peak_deviation(traj, t, end)})
    return pd.DataFrame(rows, columns=["change", "event_t", "window_end",
                                       "settling_time", "peak_deviation"])


def reduction_percent(baseline, other):
    """Percentage by which `other` improves on `baseline`: (baseline - other) / baseline * 100."""
    if math.isnan(baseline) or math.isnan(other):
        return float("nan")
    if baseline == 0:
        return 0.0 if other == 0 else float("nan")
    return (baseline - other) / baseline * 100.0


def comparison_table(trajs, events, spec=None, baseline="nn"):
    """
    Settling times and peak deviations per mode and change, with reductions against the baseline.

    Parameters
    --------
    trajs: dict mode -> Trajectory, all run with the same events
    events: list of change times
    spec: SettlingSpec
    baseline: mode the reductions are measured from

    Return
    --------
    pandas.DataFrame indexed by row name ('<mode>', 'reduction <mode> (%)', 'peak <mode>'),
    with one column per change ('change 1 (t=5)', ...)
    """
    spec = SettlingSpec() if spec is None else spec
    if baseline not in trajs:
        raise ValueError(f"The comparison needs a {baseline} trajectory; got modes {sorted(trajs)}.")
    if len(events) == 0:
        raise ValueError("The comparison needs at least one change time.")

    columns = [f"change {i} (t={t:g})" for i, t in enumerate(events, start=1)]
    settle, peaks = {}, {}
    for mode, traj in trajs.items():
        ends = [window_end(traj, t, events) for t in events]
        settle[mode] = [settling_time(traj, t, spec, end) for t, end in zip(events, ends)]
        peaks[mode] = [peak_deviation(traj, t, end) for t, end in zip(events, ends)]

    rows = {}
    for mode in trajs:
        rows[mode] = settle[mode]
    for mode in trajs:
        if mode == baseline:
            continue
        rows[f"reduction {mode} (%)"] = [reduction_percent(b, o) for b, o in zip(settle[baseline], settle[mode])]
    for mode in trajs:
        rows[f"peak {mode}"] = peaks[mode]

    return pd.DataFrame.from_dict(rows, orient="index", columns=columns)


def format_table(table):
    """Aligned plain-text rendering of a comparison table."""
    return table.to_string(float_format=lambda v: f"{v:.4g}")
