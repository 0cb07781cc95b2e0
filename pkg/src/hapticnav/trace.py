"""Run-trace and metrics file formats.

A trace is line-oriented JSON: a header object, one object per tick
(strictly increasing, each tick exactly once), and a final metrics
object. Serialization is canonical (sorted keys, no whitespace), so a
deterministic run produces a byte-identical file.

Metrics summaries are CSV with the columns
(course, policy, seed, ticks, seconds, collisions, completed).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

TRACE_VERSION = 1
METRICS_COLUMNS = ("course", "policy", "seed", "ticks", "seconds", "collisions", "completed")


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def build_header(course_dict: dict, policy: str, seed: int, config: dict | None = None) -> dict:
    return {
        "type": "header",
        "version": TRACE_VERSION,
        "course": course_dict,
        "policy": policy,
        "seed": seed,
        "config": config or {},
    }


def trace_lines(header: dict, records: list[dict], metrics: dict):
    yield dumps_canonical(header)
    for record in records:
        yield dumps_canonical({"type": "tick", **record})
    yield dumps_canonical({"type": "metrics", **metrics})


def write_trace(path: str | Path, header: dict, records: list[dict], metrics: dict) -> None:
    with open(path, "w") as f:
        for line in trace_lines(header, records, metrics):
            f.write(line + "\n")


def read_trace(path: str | Path) -> tuple[dict, list[dict], dict]:
    header, records, metrics = None, [], None
    with open(path) as f:
        for line in f:
            obj = json.loads(line)
            kind = obj.pop("type")
            if kind == "header":
                header = obj
            elif kind == "tick":
                records.append(obj)
            elif kind == "metrics":
                metrics = obj
            else:
                raise ValueError(f"unknown trace record type {kind!r}")
    if header is None or metrics is None:
        raise ValueError("trace is missing its header or metrics line")
    return header, records, metrics


def check_trace_complete(records: list[dict]) -> None:
    """Every tick exactly once, strictly increasing from 0."""
    ticks = [r["tick"] for r in records]
    if ticks != list(range(len(ticks))):
        raise ValueError("trace ticks are not the exact sequence 0..n-1")


def metrics_row(course_id: int, policy: str, seed: int, metrics: dict) -> dict:
    return {
        "course": course_id,
        "policy": policy,
        "seed": seed,
        "ticks": metrics["ticks"],
        "seconds": metrics["seconds"],
        "collisions": metrics["collisions"],
        "completed": metrics["completed"],
    }


def write_metrics_csv(path: str | Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=METRICS_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_metrics_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
