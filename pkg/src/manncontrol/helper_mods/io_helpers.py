#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Writing simulation output to disk and reading it back.

CSV files are written with 17 significant digits so every double survives the
round trip; they are read back through pyarrow with every column typed float64.
"""

import os
import logging
import pandas as pd
import pyarrow as pa
from pyarrow import csv as pacsv

logging.basicConfig(level=logging.INFO, format='%(message)s')

FLOAT_FORMAT = "%.17g"


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def write_trajectory_csv(traj, path):
    """
    Write a Trajectory's samples to CSV.

    Columns: t, x1..xn, y, y_d, e1..en, xd1..xdn, u, then per level
    W_norm, V_norm, mu_norm, K, h_hat, scale, offset, then q1_1..q1_N and
    mem1_1..mem1_N (the first level's memory read divided by c_w; empty when c_w = 0).
    """
    frame = traj.frame if hasattr(traj, "frame") else traj
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logging.info(f"Trajectory written to {path}")
    return path


def read_trajectory_csv(path):
    """
    Read a trajectory CSV with every column as float64.

    Return
    --------
    pandas.DataFrame
    """
    # get column names without loading the table
    cols = pd.read_csv(path, nrows=0).columns.tolist()
    schema = {c: pa.float64() for c in cols}
    table = pacsv.read_csv(path, convert_options=pacsv.ConvertOptions(column_types=schema))
    return table.to_pandas()


def write_table_csv(table, path, index=True):
    """Write a metrics or comparison table."""
    table.to_csv(path, index=index, float_format=FLOAT_FORMAT)
    logging.info(f"Table written to {path}")
    return path


def write_text(text, path):
    with open(path, "w") as f:
        f.write(text + "\n")
    logging.info(f"Summary written to {path}")
    return path
