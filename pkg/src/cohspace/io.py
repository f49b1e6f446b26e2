"""Deterministic artifact writing: atomic replace, locale-free CSV, sorted JSON.

This module is importable without numpy so the CLI can parse arguments and
pin thread pools before any numeric library loads; the complex-pair helpers
pull numpy lazily.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

from .errors import ConfigError


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def format_cell(value) -> str:
    """One CSV cell; floats as repr (shortest round-trip, '.' decimal, no locale)."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, str):
        return value
    if hasattr(value, "item"):  # numpy scalar
        return format_cell(value.item())
    raise ConfigError(f"cannot format a {type(value).__name__} into a CSV cell")


def csv_text(header, rows) -> str:
    width = len(header)
    lines = [",".join(header)]
    for row in rows:
        if len(row) != width:
            raise ConfigError(f"CSV row has {len(row)} cells, header has {width}")
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str, header, rows) -> None:
    atomic_write_text(path, csv_text(header, rows))


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path: str, obj) -> None:
    atomic_write_text(path, json_text(obj))


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def pairs_to_complex(data):
    """Nested [re, im] pairs -> complex ndarray (last axis must have length 2)."""
    import numpy as np

    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"complex data must be nested [re, im] pairs: {exc}") from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ConfigError("complex data must be nested [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def complex_to_pairs(values):
    """Complex array -> nested [re, im] pair lists (JSON-ready)."""
    import numpy as np

    arr = np.asarray(values, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()
