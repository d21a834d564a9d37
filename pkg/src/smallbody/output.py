"""Trajectory writers: JSON lines or flat CSV.

Floats are written with ``repr`` (shortest round-trip form), so a file read
back reproduces every sample bit for bit.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, TextIO


def _flatten(record: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        elif key == "blobs":
            for j, blob in enumerate(value):
                flat[f"{name}.{j}.x1"] = blob["x"][0]
                flat[f"{name}.{j}.x2"] = blob["x"][1]
                flat[f"{name}.{j}.strength"] = blob["strength"]
        elif isinstance(value, (list, tuple)):
            for i, v in enumerate(value, 1):
                flat[f"{name}{i}"] = v
        else:
            flat[name] = value
    return flat


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_jsonl(records: Iterable[dict], stream: TextIO) -> int:
    n = 0
    for rec in records:
        stream.write(json.dumps(rec, separators=(",", ":")) + "\n")
        n += 1
    return n


def write_csv(records: Iterable[dict], stream: TextIO) -> int:
    rows = [_flatten(r) for r in records]
    if not rows:
        return 0
    writer = csv.writer(stream, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(k)) for k in header])
    return len(rows)


def write_trajectory(records: Iterable[dict], path: str | Path, fmt: str = "jsonl") -> int:
    """Write records to ``path``; returns the number of rows written."""
    writer = {"jsonl": write_jsonl, "csv": write_csv}.get(fmt)
    if writer is None:
        raise ValueError(f"unknown trajectory format {fmt!r}")
    with open(path, "w", newline="") as fh:
        return writer(records, fh)


def read_jsonl(path: str | Path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
