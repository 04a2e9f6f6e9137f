"""
Code related to file io:
    * reading scenario and input JSON
    * writing reports (JSON and CSV)
    * reading / writing multiplication tables to the hdf5 cache
"""

import csv
import json
import logging
import pathlib
import sys

import h5py
import numpy as np

from iwapipe.config import get_table_dir

logger = logging.getLogger(__name__)

def read_json(filepath):
    """load a JSON document from a path, or from stdin if filepath is '-'"""
    if str(filepath) == '-':
        return json.load(sys.stdin)
    with open(filepath) as f:
        return json.load(f)

def dumps(obj):
    """canonical JSON: sorted keys, fixed indentation"""
    return json.dumps(obj, sort_keys=True, indent=2)

def write_json(filepath, obj):
    filepath = pathlib.Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w') as f:
        f.write(dumps(obj) + '\n')

def write_csv(filepath, rows, fields):
    """Write a list of flat dictionaries as CSV

       Arguments:
           filepath      path to file
           rows          list of {field: value} dictionaries
           fields        column order
    """
    filepath = pathlib.Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=fields, extrasaction='ignore')
        writer.writeheader()
        for row in rows:
            writer.writerow(row)

def table_path(cfg, cutoff):
    """h5 file holding the tables of one (case, p, f, M, T), or None if caching is disabled"""
    directory = get_table_dir()
    if directory is None:
        return None
    return directory / f'{cfg.case.value}_p{cfg.p}_f{cfg.f}_M{cfg.M}_T{cutoff}.h5'

def load_table(filepath, name):
    """Load a single table from h5 filepath, None if absent"""
    filepath = pathlib.Path(filepath)
    if not filepath.exists():
        return None
    try:
        with h5py.File(filepath, 'r') as f:
            if name not in f:
                return None
            return f[name][...]
    except OSError as err:
        logger.warning(f'unreadable table cache {filepath}: {err}')
        return None

def write_table(filepath, name, table):
    """Write a table to the h5 file, replacing an existing one of the same name"""
    filepath = pathlib.Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with h5py.File(filepath, 'a') as f:
        if name in f:
            del f[name]
        f[name] = np.asarray(table, dtype=np.int64)
