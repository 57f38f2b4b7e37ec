"""Per-tick CSV logs: fixed column order, lossless float formatting so equal
runs produce byte-identical files, plus summary and comparison helpers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def log_columns(n_coords: int, slack_names: list[str]) -> list[str]:
    cols = ["t"]
    cols += [f"q_{i}" for i in range(n_coords)]
    cols += [f"qdot_{i}" for i in range(n_coords)]
    cols += [f"xadot_{i}" for i in range(6)]
    cols += [f"xdes_{i}" for i in range(6)]
    cols += [f"Fe_{i}" for i in range(6)]
    cols += ["T_tank", "budget"]
    cols += [f"M_{i}" for i in range(6)]
    cols += [f"D_{i}" for i in range(6)]
    cols += ["intent", "h_safe", "h_cyl1", "h_cyl2"]
    cols += [f"delta_{name}" for name in slack_names]
    cols += ["qp_status", "qp_iters"]
    return cols


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


class LogWriter:
    def __init__(self, path, n_coords: int, slack_names: list[str]):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.columns = log_columns(n_coords, slack_names)
        self._fh = open(self.path, "w", newline="\n")
        self._fh.write(",".join(self.columns) + "\n")

    def write(self, values: list):
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self._fh.write(",".join(_fmt(v) for v in values) + "\n")

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass
class LogData:
    columns: list[str]
    numeric: dict[str, np.ndarray]
    text: dict[str, list[str]]

    def __len__(self) -> int:
        return len(next(iter(self.text.values()))) if self.text else \
            len(next(iter(self.numeric.values())))

    def slack_columns(self) -> list[str]:
        return [c for c in self.columns if c.startswith("delta_")]


def read_log(path) -> LogData:
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty log")
        columns = header.split(",")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(columns):
                raise ValueError(f"{path}: row {lineno} has {len(parts)} fields, expected {len(columns)}")
            rows.append(parts)
    text_cols = {"intent", "qp_status"}
    numeric: dict[str, np.ndarray] = {}
    text: dict[str, list[str]] = {}
    for j, name in enumerate(columns):
        col = [r[j] for r in rows]
        if name in text_cols:
            text[name] = col
        else:
            try:
                numeric[name] = np.array([float(v) for v in col])
            except ValueError as exc:
                raise ValueError(f"{path}: column {name!r} is not numeric: {exc}") from exc
    return LogData(columns=columns, numeric=numeric, text=text)


@dataclass
class LogSummary:
    ticks: int
    mean_force: float
    median_force: float
    p90_force: float
    min_distance: float
    min_tank: float
    max_slack: float

    def as_dict(self) -> dict:
        return {
            "ticks": self.ticks,
            "mean_force": self.mean_force,
            "median_force": self.median_force,
            "p90_force": self.p90_force,
            "min_distance": self.min_distance,
            "min_tank": self.min_tank,
            "max_slack": self.max_slack,
        }


def summarize(data: LogData, d_min_reference: float | None = None) -> LogSummary:
    force = np.linalg.norm(np.column_stack([data.numeric[f"Fe_{i}"] for i in range(3)]), axis=1)
    h_safe = data.numeric["h_safe"]
    finite = h_safe[np.isfinite(h_safe)]
    if finite.size and d_min_reference is not None:
        # invert h = d^2 - d_min^2 back to a distance for the report
        min_distance = float(np.min(np.sqrt(np.maximum(finite + d_min_reference ** 2, 0.0))))
    elif finite.size:
        min_distance = float(np.min(finite))
    else:
        min_distance = math.inf
    slack_cols = data.slack_columns()
    max_slack = float(max((np.max(np.abs(data.numeric[c])) for c in slack_cols), default=0.0))
    return LogSummary(
        ticks=len(data),
        mean_force=float(np.mean(force)),
        median_force=float(np.median(force)),
        p90_force=float(np.percentile(force, 90)),
        min_distance=min_distance,
        min_tank=float(np.min(data.numeric["T_tank"])),
        max_slack=max_slack,
    )


def compare(data_a: LogData, data_b: LogData,
            d_min_reference: float | None = None) -> str:
    """Side-by-side force/distance/tank statistics for two conforming logs."""
    if data_a.columns != data_b.columns:
        raise ValueError("log schemas differ; refusing to compare")
    sa = summarize(data_a, d_min_reference)
    sb = summarize(data_b, d_min_reference)
    lines = [f"{'metric':<14}{'log_a':>14}{'log_b':>14}{'delta (a-b)':>16}"]
    for key, va, vb in [
        ("mean |F_e|", sa.mean_force, sb.mean_force),
        ("median |F_e|", sa.median_force, sb.median_force),
        ("p90 |F_e|", sa.p90_force, sb.p90_force),
        ("min d", sa.min_distance, sb.min_distance),
        ("min T", sa.min_tank, sb.min_tank),
        ("max |delta|", sa.max_slack, sb.max_slack),
    ]:
        delta = 0.0 if va == vb else va - vb
        lines.append(f"{key:<14}{va:>14.6g}{vb:>14.6g}{delta:>16.6g}")
    return "\n".join(lines)
