# clt_verification/utils/config.py

from pathlib import Path

from ..exceptions import UsageError


def read_config_file(path):
    """
    Flat key=value file with the same keys as the command flags
    (``T-list = 64,128`` and ``T_list = 64,128`` are equivalent).
    Blank lines and lines starting with # are skipped.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"Cannot read config file {path}: {exc}")

    values = {}
    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        if '=' not in line:
            raise UsageError(f"{path}:{number}: expected key=value, got '{line}'")
        key, value = line.split('=', 1)
        key = key.strip().lstrip('-').replace('-', '_')
        if not key:
            raise UsageError(f"{path}:{number}: empty key")
        values[key] = value.strip()
    return values


def merge_parameters(options, file_values, keys):
    """Flags win over the config file; unset flags are None"""
    merged = {key: value for key, value in file_values.items() if key in keys}
    unknown = sorted(set(file_values) - set(keys))
    if unknown:
        raise UsageError(f"Unknown config keys: {', '.join(unknown)}")
    for key in keys:
        value = options.get(key)
        if value is not None:
            merged[key] = value
    return merged
