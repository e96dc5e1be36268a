"""Seeded Monte-Carlo experiment runner and CSV emitter.

One trial draws a fading realization, runs every configured scheme on the
SAME channel and training noise (paired comparison), evaluates the realized
SINR with the true channel (the estimation-error interference enters through
the analytic covariance), and converts to rate with the training-overhead
prelog.  Streams are keyed by (seed, purpose, sweep point, trial) so results
are reproducible and order independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .beamforming import (
    BeamformingProblem,
    ReflectionVector,
    achievable_rate,
    channel_gain_beam,
    exhaustive_beam_search,
    rotate_and_quantize,
    sdr_refined_beam,
    sinr,
)
from .channel import ChannelRealization, Geometry, group_channels, sample_channels
from .errors import ConfigError, NoConvergence
from .estimation import ls_estimate, simulate_training
from .linalg import invert
from .patterns import PhaseShiftSet, ReflectionPattern, design_pattern, naive_pattern, pattern_mse

CSV_COLUMNS = (
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

# stable stream keys per purpose; scheme-set changes must not move streams
_CHANNEL_KEY = 11
_NOISE_KEY = 12
_SCHEME_KEYS = {
    "proposed": 21,
    "naive": 22,
    "random_phase": 23,
    "upper_bound": 24,
    "exhaustive": 25,
    "quantization": 26,
    "channel_gain": 27,
}

KNOWN_SCHEMES = tuple(_SCHEME_KEYS)

_GEOMETRY_FIELDS = {
    "user_pos",
    "ap_pos",
    "irs_center",
    "pathloss_exp_ua",
    "pathloss_exp_ui",
    "pathloss_exp_ia",
    "ref_gain_db",
}
_CONFIG_FIELDS = {
    "geometry",
    "n_elements",
    "m_groups",
    "bits",
    "pt_dbm",
    "sigma2_dbm",
    "gap_db",
    "t0",
    "trials",
    "seed",
    "schemes",
}


def _as_tuple(value) -> tuple[int, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    return (int(value),)


@dataclass(frozen=True)
class ExperimentConfig:
    """Geometry, powers, frame layout, sweeps, and trial bookkeeping."""

    geometry: Geometry
    n_elements: tuple[int, ...]
    m_groups: tuple[int, ...]
    bits: tuple[int, ...]
    pt_dbm: float = 20.0
    sigma2_dbm: float = -79.0
    gap_db: float = 8.2
    t0: int = 40
    trials: int = 100
    seed: int = 1
    schemes: tuple[str, ...] = ("proposed", "naive", "random_phase")

    def __post_init__(self):
        object.__setattr__(self, "n_elements", _as_tuple(self.n_elements))
        object.__setattr__(self, "m_groups", _as_tuple(self.m_groups))
        object.__setattr__(self, "bits", _as_tuple(self.bits))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        for b in self.bits:
            if b < 1:
                raise ConfigError("bits must be at least 1")
        for m in self.m_groups:
            if m < 1:
                raise ConfigError("m_groups entries must be at least 1")
            if self.t0 <= m + 1:
                raise ConfigError(f"frame t0={self.t0} too short for M={m}")
        unknown = [s for s in self.schemes if s not in _SCHEME_KEYS]
        if unknown:
            raise ConfigError(f"unknown schemes: {unknown}")

    @property
    def pt(self) -> float:
        return 10.0 ** ((self.pt_dbm - 30.0) / 10.0)

    @property
    def sigma2(self) -> float:
        return 10.0 ** ((self.sigma2_dbm - 30.0) / 10.0)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - _CONFIG_FIELDS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"geometry", "n_elements", "m_groups", "bits"} - set(raw)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        geom_raw = raw["geometry"]
        if not isinstance(geom_raw, dict):
            raise ConfigError("geometry must be a JSON object")
        geo_unknown = set(geom_raw) - _GEOMETRY_FIELDS
        if geo_unknown:
            raise ConfigError(f"unknown geometry keys: {sorted(geo_unknown)}")
        try:
            geometry = Geometry(
                user_pos=tuple(geom_raw["user_pos"]),
                ap_pos=tuple(geom_raw["ap_pos"]),
                irs_center=tuple(geom_raw["irs_center"]),
                **{
                    k: geom_raw[k]
                    for k in _GEOMETRY_FIELDS - {"user_pos", "ap_pos", "irs_center"}
                    if k in geom_raw
                },
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad geometry: {exc}") from exc
        kwargs = {k: v for k, v in raw.items() if k != "geometry"}
        return cls(geometry=geometry, **kwargs)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)


@dataclass(frozen=True)
class SchemeResult:
    """Aggregated Monte-Carlo outcome of one scheme at one sweep point."""

    experiment: str
    scheme: str
    b: int | None
    sweep_param: str
    sweep_value: int
    mean_rate: float | None
    mean_mse: float | None
    stderr: float
    trials: int
    seed: int


@dataclass(frozen=True)
class TrialRecord:
    rate: float
    mse: float | None


def _stream(config: ExperimentConfig, key: int, *parts: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, key, *parts])


def _draw_channel(
    config: ExperimentConfig, n: int, m: int, trial: int
) -> tuple[ChannelRealization, np.ndarray]:
    rng = _stream(config, _CHANNEL_KEY, n, m, trial)
    h_ua, h_ui, h_ia = sample_channels(config.geometry, n, rng)
    realization = group_channels(h_ua, h_ui, h_ia, m)
    noise_rng = _stream(config, _NOISE_KEY, n, m, trial)
    std = np.sqrt(config.sigma2 / 2.0)
    noise = std * (noise_rng.standard_normal(m + 1) + 1j * noise_rng.standard_normal(m + 1))
    return realization, noise


class _TrialContext:
    """Shared per-trial state: one channel, one training-noise draw, and
    lazily computed per-pattern estimates and SDR pipelines."""

    def __init__(self, config, n, m, b, trial, train_sigma2=None):
        self.config = config
        self.n, self.m, self.b, self.trial = n, m, b, trial
        self.phase_set = PhaseShiftSet(b)
        self.train_sigma2 = config.sigma2 if train_sigma2 is None else train_sigma2
        self.channel, noise = _draw_channel(config, n, m, trial)
        scale = 1.0 if train_sigma2 is None else (
            np.sqrt(train_sigma2 / config.sigma2) if config.sigma2 > 0 else 0.0
        )
        self.noise = noise * scale
        self._problems: dict[str, tuple[BeamformingProblem, float]] = {}
        self._pipelines: dict[str, object] = {}

    def problem(self, label: str, pattern: ReflectionPattern) -> tuple[BeamformingProblem, float]:
        """LS-estimate the channel through ``pattern``; returns the
        beamforming problem (with the training-noise-scaled error Gram) and
        the analytic estimation MSE."""
        if label not in self._problems:
            cfg = self.config
            obs = simulate_training(
                self.channel.h_ext,
                pattern,
                cfg.pt,
                self.train_sigma2,
                noise=self.noise,
            )
            est = ls_estimate(obs, cfg.pt, self.train_sigma2)
            gram_inv = invert(pattern.gram())
            # interference power P_t E|theta^H h_e|^2 uses the TRAINING noise;
            # expressing it in data-noise units keeps the fractional SINR form
            r_scaled = (self.train_sigma2 / cfg.sigma2) * gram_inv
            prob = BeamformingProblem(
                h_tilde=est.h_est, r_p=r_scaled, pt=cfg.pt, sigma2=cfg.sigma2
            )
            self._problems[label] = (prob, est.mse_analytic)
        return self._problems[label]

    def pipeline(self, label: str, pattern: ReflectionPattern, scheme_key: int):
        """One SDR solve + randomization per pattern per trial, shared by the
        proposed, upper-bound, and quantization schemes (paired comparison)."""
        if label not in self._pipelines:
            prob, _ = self.problem(label, pattern)
            rng = _stream(
                self.config, scheme_key, self.n, self.m, self.b, self.trial
            )
            self._pipelines[label] = sdr_refined_beam(prob, self.phase_set, rng)
        return self._pipelines[label]

    def true_sinr(self, theta: ReflectionVector, prob: BeamformingProblem) -> float:
        """Realized SINR: true channel in the signal term, analytic
        estimation-error interference in the denominator."""
        cfg = self.config
        num = cfg.pt * abs(np.vdot(theta.theta, self.channel.h_ext)) ** 2
        quad = float(np.vdot(theta.theta, prob.r_p @ theta.theta).real)
        return num / (cfg.sigma2 * (quad + 1.0))

    def rate(self, gamma: float) -> float:
        cfg = self.config
        return achievable_rate(gamma, self.m, cfg.t0, cfg.gap_db)


def run_trial(
    config: ExperimentConfig,
    n: int,
    m: int,
    b: int,
    trial: int,
    schemes: tuple[str, ...] | None = None,
    train_sigma2: float | None = None,
) -> dict[str, TrialRecord]:
    """All configured schemes on one paired fading/noise realization.

    A failing scheme records a NaN-rate sentinel instead of aborting the
    trial.
    """
    ctx = _TrialContext(config, n, m, b, trial, train_sigma2=train_sigma2)
    out: dict[str, TrialRecord] = {}
    for scheme in schemes or config.schemes:
        try:
            out[scheme] = _run_scheme(ctx, scheme)
        except NoConvergence:
            out[scheme] = TrialRecord(rate=float("nan"), mse=None)
    return out


def _run_scheme(ctx: _TrialContext, scheme: str) -> TrialRecord:
    config = ctx.config
    fset = ctx.phase_set
    if scheme == "random_phase":
        # M+1 candidate reflection sets, selected by realized rate; no LS
        # pattern inversion is performed.  Detection still relies on the
        # selected set's composite coefficient, known only through its one
        # pilot observation, so the same estimation-error interference style
        # applies with scalar error variance sigma_train^2 / P_t.
        rng = _stream(config, _SCHEME_KEYS[scheme], ctx.n, ctx.m, ctx.b, ctx.trial)
        levels = rng.integers(0, fset.levels, size=(ctx.m + 1, ctx.m))
        cands = np.ones((ctx.m + 1, ctx.m + 1), dtype=np.complex128)
        cands[:, 1:] = fset.unit_values()[levels]
        gains = np.abs(cands.conj() @ ctx.channel.h_ext) ** 2
        gamma = config.pt * float(np.max(gains)) / (ctx.train_sigma2 + config.sigma2)
        return TrialRecord(rate=ctx.rate(gamma), mse=None)

    if scheme == "naive":
        label, pattern = "naive", naive_pattern(ctx.m, fset)
    else:
        label, pattern = "design", design_pattern(ctx.m, fset)
    prob, mse = ctx.problem(label, pattern)

    if scheme in ("proposed", "naive"):
        result = ctx.pipeline(label, pattern, _SCHEME_KEYS[scheme])
        gamma = ctx.true_sinr(result.theta, prob)
    elif scheme == "upper_bound":
        result = ctx.pipeline(label, pattern, _SCHEME_KEYS["proposed"])
        if result.sdp_objective_sinr is None:
            raise NoConvergence("relaxation bound unavailable")
        gamma = result.sdp_objective_sinr
    elif scheme == "quantization":
        result = ctx.pipeline(label, pattern, _SCHEME_KEYS["proposed"])
        theta = rotate_and_quantize(result.continuous, fset)
        gamma = ctx.true_sinr(theta, prob)
    elif scheme == "exhaustive":
        theta = exhaustive_beam_search(prob, fset)
        gamma = ctx.true_sinr(theta, prob)
    elif scheme == "channel_gain":
        theta = channel_gain_beam(prob, fset)
        gamma = ctx.true_sinr(theta, prob)
    else:
        raise ConfigError(f"unknown scheme {scheme!r}")
    return TrialRecord(rate=ctx.rate(gamma), mse=mse)


def _aggregate(
    experiment: str,
    scheme: str,
    b: int,
    sweep_param: str,
    sweep_value: int,
    records: list[TrialRecord],
    config: ExperimentConfig,
) -> SchemeResult:
    rates = np.array([r.rate for r in records], dtype=float)
    ok = rates[~np.isnan(rates)]
    mses = [r.mse for r in records if r.mse is not None]
    stderr = float(np.std(ok, ddof=1) / np.sqrt(len(ok))) if len(ok) > 1 else 0.0
    return SchemeResult(
        experiment=experiment,
        scheme=scheme,
        b=b,
        sweep_param=sweep_param,
        sweep_value=sweep_value,
        mean_rate=float(np.mean(ok)) if len(ok) else None,
        mean_mse=float(np.mean(mses)) if mses else None,
        stderr=stderr,
        trials=len(records),
        seed=config.seed,
    )


def mse_sweep(config: ExperimentConfig) -> list[SchemeResult]:
    """Analytic training-MSE comparison across group counts (no Monte Carlo):
    the designed pattern per bit level, the naive pattern, and the
    orthogonal-pattern floor sigma^2/P_t."""
    results = []
    floor = config.sigma2 / config.pt
    for m in config.m_groups:
        for b in config.bits:
            pat = design_pattern(m, PhaseShiftSet(b))
            results.append(
                SchemeResult(
                    "fig2-mse", "proposed", b, "m_groups", m,
                    None, pattern_mse(pat, config.pt, config.sigma2),
                    0.0, 0, config.seed,
                )
            )
        results.append(
            SchemeResult(
                "fig2-mse", "naive", 1, "m_groups", m,
                None, pattern_mse(naive_pattern(m), config.pt, config.sigma2),
                0.0, 0, config.seed,
            )
        )
        results.append(
            SchemeResult(
                "fig2-mse", "lower_bound", None, "m_groups", m,
                None, floor, 0.0, 0, config.seed,
            )
        )
    return results


def _require_divisible(n: int, m: int) -> None:
    if n % m != 0:
        raise ConfigError(f"M={m} does not divide N={n}")


def rate_vs_groups(config: ExperimentConfig) -> list[SchemeResult]:
    """Mean achievable rate versus the number of sub-surfaces at fixed N."""
    n = config.n_elements[0]
    for m in config.m_groups:
        _require_divisible(n, m)
    results = []
    for m in config.m_groups:
        for b in config.bits:
            per_scheme: dict[str, list[TrialRecord]] = {s: [] for s in config.schemes}
            for trial in range(config.trials):
                rec = run_trial(config, n, m, b, trial)
                for s in config.schemes:
                    per_scheme[s].append(rec[s])
            for s in config.schemes:
                results.append(
                    _aggregate("fig3-rate-groups", s, b, "m_groups", m, per_scheme[s], config)
                )
    return results


def rate_vs_elements(config: ExperimentConfig) -> list[SchemeResult]:
    """Mean achievable rate versus the number of reflecting elements at fixed M."""
    m = config.m_groups[0]
    for n in config.n_elements:
        _require_divisible(n, m)
    results = []
    for n in config.n_elements:
        for b in config.bits:
            per_scheme: dict[str, list[TrialRecord]] = {s: [] for s in config.schemes}
            for trial in range(config.trials):
                rec = run_trial(config, n, m, b, trial)
                for s in config.schemes:
                    per_scheme[s].append(rec[s])
            for s in config.schemes:
                results.append(
                    _aggregate("fig4-rate-elements", s, b, "n_elements", n, per_scheme[s], config)
                )
    return results


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return format(value, ".12g")
    return str(value)


def results_to_csv(results: list[SchemeResult]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in results:
        lines.append(
            ",".join(
                _cell(v)
                for v in (
                    r.experiment,
                    r.scheme,
                    r.b,
                    r.sweep_param,
                    r.sweep_value,
                    r.mean_rate,
                    r.mean_mse,
                    r.stderr,
                    r.trials,
                    r.seed,
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_csv(results: list[SchemeResult], path: str | Path) -> None:
    Path(path).write_text(results_to_csv(results))
