"""Deterministic CSV/JSON output helpers and fixed-chunk parallel maps."""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__

__all__ = [
    "config_hash",
    "metadata_lines",
    "parallel_rows",
    "write_csv",
    "write_json",
]

UNITS_NOTE = "natural units: hbar = c = m0 = 1 (lengths in Compton wavelengths)"

#: rows per work unit; fixed so results never depend on the thread count
ROW_CHUNK = 16


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON form of a config dict."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def metadata_lines(config: dict) -> list[str]:
    return [
        f"# version: {__version__}",
        f"# config: {config_hash(config)}",
        f"# units: {UNITS_NOTE}",
    ]


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header: list[str], rows, config: dict) -> None:
    """Write rows with a metadata comment header; repr-exact floats."""
    path = Path(path)
    with path.open("w", newline="\n") as fh:
        for line in metadata_lines(config):
            fh.write(line + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def write_json(path, payload: dict, config: dict) -> None:
    path = Path(path)
    doc = {
        "version": __version__,
        "config_hash": config_hash(config),
        "units": UNITS_NOTE,
        **_jsonable(payload),
    }
    with path.open("w", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def parallel_rows(fn, n_rows: int, n_threads: int) -> list:
    """Evaluate fn(i) for i in range(n_rows), optionally threaded.

    Work is split into fixed ROW_CHUNK blocks and reassembled by index,
    so the result is independent of n_threads (each row's arithmetic is
    self-contained).
    """
    out = [None] * n_rows

    def run_block(start: int):
        for i in range(start, min(start + ROW_CHUNK, n_rows)):
            out[i] = fn(i)

    starts = range(0, n_rows, ROW_CHUNK)
    if n_threads <= 1:
        for s in starts:
            run_block(s)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(run_block, starts))
    return out
