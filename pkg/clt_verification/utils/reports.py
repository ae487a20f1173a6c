# clt_verification/utils/reports.py

import csv
import json
import logging
from pathlib import Path

from django.conf import settings

logger = logging.getLogger('clt_verification.commands')


def _float_format():
    return settings.SMLAB.get('FLOAT_FORMAT', '%.17g')


def format_value(value, float_format=None):
    if isinstance(value, bool) or value is None:
        return '' if value is None else str(value).lower()
    if isinstance(value, int):
        return str(value)
    try:
        return (float_format or _float_format()) % float(value)
    except (TypeError, ValueError):
        return str(value)


def write_csv(rows, columns, path):
    """Rows are mappings; floats are written with 17 significant digits"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[column]) for column in columns])
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def to_json(payload):
    return json.dumps(payload, indent=2, sort_keys=True, default=str)


def write_json(payload, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(payload) + '\n')
    return path


def manifest_path(out_path):
    out_path = Path(out_path)
    return out_path.with_name(out_path.name + '.manifest.json')


def write_manifest(out_path, manifest):
    """<out>.manifest.json next to the output; created_at is its only time-dependent field"""
    return write_json(manifest, manifest_path(out_path))
