import os
import pathlib
import toml

DEFAULT_CONFIG_PATH = pathlib.Path(__file__).parent / 'default.conf'
DEFAULT_CONFIG = DEFAULT_CONFIG_PATH.read_text().strip()

OUTPUT_DIR_VARIABLE = 'IWAPIPE_OUTPUT_DIR'

def get_config_path():
    """get the path to the configuration file"""
    path = pathlib.Path('~/.config/iwapipe/iwapipe.conf').expanduser()
    return path

def _merge(base, override):
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base

def get_config():
    """get the configuration file contents as a dictionary, falling back on the defaults"""
    config = toml.loads(DEFAULT_CONFIG)
    path = get_config_path()
    if path.exists():
        _merge(config, toml.load(path))
    return config

def get_output_dir():
    """default directory for reports and logs"""
    return pathlib.Path(os.environ.get(OUTPUT_DIR_VARIABLE, '.'))

def get_table_dir():
    """directory of the HDF5 table cache, or None if caching is disabled"""
    tables = get_config()['cache']['tables']
    if not tables:
        return None
    return pathlib.Path(tables).expanduser()
