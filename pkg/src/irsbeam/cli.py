"""Command-line entry point for the experiments and one-shot utilities."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import harness
from .beamforming import BeamformingProblem, sdr_refined_beam, sinr_upper_bound
from .errors import IrsbeamError, NoConvergence, SingularMatrix
from .patterns import PhaseShiftSet, design_pattern

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

_EXPERIMENTS = {
    "mse-sweep": "mse_sweep",
    "rate-vs-groups": "rate_vs_groups",
    "rate-vs-elements": "rate_vs_elements",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsbeam",
        description="IRS training-pattern and passive-beamforming experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--trials", type=int, default=None, help="override the trial count")

    p = sub.add_parser("pattern", help="print a designed training reflection pattern")
    p.add_argument("--m", type=int, required=True, help="number of sub-surfaces M")
    p.add_argument("--b", type=int, required=True, help="phase-shift bits")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")

    p = sub.add_parser("solve", help="solve one beamforming instance from JSON")
    p.add_argument("--input", required=True, help="JSON with h_tilde, r_p, pt_dbm, sigma2_dbm, bits")
    p.add_argument("--out", required=True, help="CSV path for the reflection vector")
    p.add_argument("--seed", type=int, default=0, help="randomization seed")
    return parser


def _load_complex_vector(raw) -> np.ndarray:
    return np.array([complex(re, im) for re, im in raw], dtype=np.complex128)


def _load_complex_matrix(raw) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in raw], dtype=np.complex128)


def _run_experiment(args) -> int:
    config = harness.ExperimentConfig.from_json(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        config = replace(config, **overrides)
    results = getattr(harness, _EXPERIMENTS[args.command])(config)
    harness.write_csv(results, args.out)
    print(f"wrote {len(results)} rows to {args.out}")
    return EXIT_OK


def _run_pattern(args) -> int:
    pattern = design_pattern(args.m, PhaseShiftSet(args.b))
    text = pattern.to_csv()
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.m + 1}x{args.m + 1} pattern ({pattern.kind}) to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _run_solve(args) -> int:
    raw = json.loads(Path(args.input).read_text())
    required = {"h_tilde", "r_p", "pt_dbm", "sigma2_dbm", "bits"}
    missing = required - set(raw)
    if missing:
        raise IrsbeamError(f"solve input missing keys: {sorted(missing)}")
    prob = BeamformingProblem(
        h_tilde=_load_complex_vector(raw["h_tilde"]),
        r_p=_load_complex_matrix(raw["r_p"]),
        pt=10.0 ** ((raw["pt_dbm"] - 30.0) / 10.0),
        sigma2=10.0 ** ((raw["sigma2_dbm"] - 30.0) / 10.0),
    )
    result = sdr_refined_beam(prob, PhaseShiftSet(raw["bits"]), np.random.default_rng(args.seed))
    lines = ["m,theta_re,theta_im"]
    for i, z in enumerate(result.theta.theta):
        lines.append(f"{i},{z.real:.12g},{z.imag:.12g}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    gamma = result.refinement.final_sinr
    bound = sinr_upper_bound(prob)
    print(f"sinr={gamma:.6g} ({10 * np.log10(max(gamma, 1e-300)):.2f} dB), upper_bound={bound:.6g}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in _EXPERIMENTS:
            return _run_experiment(args)
        if args.command == "pattern":
            return _run_pattern(args)
        return _run_solve(args)
    except (SingularMatrix, NoConvergence) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (IrsbeamError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
