"""Plain-text exchange formats: matrices and labels as CSV, configs and reports as JSON."""
from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, ValidationError

_HEADER = re.compile(r"#\s*rows=(\d+)\s+cols=(\d+)\s*$")


def write_matrix(path, M):
    """Columns are data points; values keep 17 significant digits."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"# rows={M.shape[0]} cols={M.shape[1]}\n")
        for row in M:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValidationError(f"{path}: empty matrix file")
    m = _HEADER.match(lines[0])
    if not m:
        raise ValidationError(f"{path}: first line must be '# rows=<n> cols=<N>'")
    n, N = int(m.group(1)), int(m.group(2))
    try:
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    except ValueError as err:
        raise ValidationError(f"{path}: {err}") from err
    if len(rows) != n or any(len(r) != N for r in rows):
        raise DimensionMismatch(f"{path}: header says {n}x{N}, body disagrees")
    M = np.array(rows, dtype=float).reshape(n, N)
    if not np.all(np.isfinite(M)):
        raise ValidationError(f"{path}: non-finite entries")
    return M


def write_labels(path, labels):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(",".join(str(int(v)) for v in np.ravel(labels)) + "\n")


def read_labels(path) -> np.ndarray:
    text = Path(path).read_text().strip()
    try:
        labels = np.array([int(v) for v in text.split(",")], dtype=int) if text else np.zeros(0, int)
    except ValueError as err:
        raise ValidationError(f"{path}: labels must be integers") from err
    if labels.size and labels.min() < 1:
        raise ValidationError(f"{path}: labels must be positive")
    return labels


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise ValidationError(f"{path}: {err}") from err
