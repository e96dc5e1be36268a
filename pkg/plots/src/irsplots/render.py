"""Render the three experiment figures from harness CSV output.

The input contract is the harness CSV: columns (experiment, scheme, b,
sweep_param, sweep_value, mean_rate_bps_hz, mean_mse, stderr, trials, seed),
one row per (scheme, b, sweep point).  Each figure draws one series per
(scheme, b) pair; the MSE figure uses a log y-axis, the rate figures carry
standard-error bars.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

REQUIRED_COLUMNS = (
    "experiment",
    "scheme",
    "b",
    "sweep_param",
    "sweep_value",
    "mean_rate_bps_hz",
    "mean_mse",
    "stderr",
    "trials",
    "seed",
)

FIGURES = ("fig2-mse", "fig3-rate-groups", "fig4-rate-elements")

# stable styling keyed by scheme so regenerated figures diff cleanly
_SCHEME_STYLE = {
    "proposed": dict(color="tab:blue", marker="o"),
    "naive": dict(color="tab:orange", marker="s"),
    "random_phase": dict(color="tab:green", marker="^"),
    "upper_bound": dict(color="tab:red", marker=""),
    "exhaustive": dict(color="tab:purple", marker="d"),
    "quantization": dict(color="tab:brown", marker="v"),
    "channel_gain": dict(color="tab:gray", marker="x"),
    "lower_bound": dict(color="black", marker=""),
}


class SchemaMismatch(Exception):
    """CSV does not satisfy the harness output contract."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str | Path
    figure: str
    output_image: str | Path

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"unknown figure {self.figure!r}; expected one of {FIGURES}")


def load_table(path: str | Path) -> list[dict[str, str]]:
    """Read and validate a harness CSV; raises SchemaMismatch on violations."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise SchemaMismatch(f"missing columns: {missing}")
        rows = list(reader)
    if not rows:
        raise SchemaMismatch("no data rows")
    return rows


def _series(rows: list[dict[str, str]], value_column: str):
    """Group rows into {(scheme, b): (x, y, stderr)} sorted by sweep value."""
    grouped: dict[tuple[str, str], list[tuple[float, float, float]]] = {}
    for row in rows:
        if row[value_column] == "":
            continue
        key = (row["scheme"], row["b"])
        grouped.setdefault(key, []).append(
            (
                float(row["sweep_value"]),
                float(row[value_column]),
                float(row["stderr"] or 0.0),
            )
        )
    if not grouped:
        raise SchemaMismatch(f"no rows carry a value in column {value_column!r}")
    out = {}
    for key, points in grouped.items():
        points.sort()
        arr = np.asarray(points)
        out[key] = (arr[:, 0], arr[:, 1], arr[:, 2])
    return out


def _label(scheme: str, b: str) -> str:
    return f"{scheme} (b={b})" if b else scheme


def render(spec: FigureSpec):
    """Draw the requested figure and write it to ``output_image``.

    Returns the matplotlib Figure (useful for inspection in tests).
    """
    rows = load_table(spec.input_csv)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    if spec.figure == "fig2-mse":
        for (scheme, b), (x, y, _) in sorted(_series(rows, "mean_mse").items()):
            style = _SCHEME_STYLE.get(scheme, {})
            ax.plot(x, y, label=_label(scheme, b), **style)
        ax.set_yscale("log")
        ax.set_xlabel("number of sub-surfaces M")
        ax.set_ylabel("channel estimation MSE")
    else:
        for (scheme, b), (x, y, err) in sorted(_series(rows, "mean_rate_bps_hz").items()):
            style = _SCHEME_STYLE.get(scheme, {})
            ax.errorbar(x, y, yerr=err, capsize=2, label=_label(scheme, b), **style)
        xlabel = (
            "number of sub-surfaces M"
            if spec.figure == "fig3-rate-groups"
            else "number of reflecting elements N"
        )
        ax.set_xlabel(xlabel)
        ax.set_ylabel("achievable rate (bps/Hz)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output_image)
    return fig
