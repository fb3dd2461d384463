"""CSV / JSON writers shared by the CLI.

CSV files are RFC 4180 with a header row and ``repr`` float formatting (IEEE
double round trip). The first line is a ``# config_hash=...`` comment so
every file can be traced to the run configuration.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np


def config_hash(config: dict, exclude=("out",)) -> str:
    """Short sha256 of the run configuration; the output location is not part of it."""
    kept = {k: v for k, v in config.items() if k not in exclude}
    blob = json.dumps(kept, sort_keys=True, default=_jsonable).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer, np.bool_)):
        return str(x.item())
    return str(x)


def write_csv(path, header, rows, chash: str | None = None):
    path = Path(path)
    with path.open("w", newline="") as fh:
        if chash:
            fh.write(f"# config_hash={chash}\r\n")
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(line for line in fh if not line.startswith("#")))
    return rows[0], rows[1:]


def write_json(path, obj, chash: str | None = None):
    path = Path(path)
    if chash is not None:
        obj = {"config_hash": chash, **obj}
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path
