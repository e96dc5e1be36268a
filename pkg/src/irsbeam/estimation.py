"""Training-phase simulation and least-squares channel estimation.

Over M+1 pilot symbols the received vector is y = X Theta h + z with X the
diagonal pilot matrix and Theta the training reflection pattern; inverting
the (full-rank) pattern gives the LS estimate and the pattern-dependent error
covariance (sigma^2/P_t) (Theta^H Theta)^-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_vector, invert
from .patterns import ReflectionPattern


@dataclass(frozen=True)
class TrainingObservation:
    """Received pilots, transmitted pilots, and the pattern that produced them."""

    y_p: np.ndarray
    pilots: np.ndarray
    pattern: ReflectionPattern

    def __post_init__(self):
        n = self.pattern.matrix.shape[0]
        if self.y_p.shape != (n,) or self.pilots.shape != (n,):
            raise ValueError("observation length must match the pattern size")
        power = np.abs(self.pilots) ** 2
        if np.max(np.abs(power - power[0])) > 1e-9 * power[0]:
            raise ValueError("pilot symbols must have constant power")


@dataclass(frozen=True)
class EstimationResult:
    """LS channel estimate with its error covariance and analytic MSE."""

    h_est: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)
    mse_analytic: float


def simulate_training(
    h_ext: np.ndarray,
    pattern: ReflectionPattern,
    pt: float,
    sigma2: float,
    rng: np.random.Generator | None = None,
    noise: np.ndarray | None = None,
) -> TrainingObservation:
    """One pass of the training phase: y[m] = x[m] * (row m of Theta) @ h + z[m].

    Pilots are all sqrt(P_t) (constant power, zero phase).  ``noise`` can be
    supplied to share one AWGN draw across schemes in paired comparisons;
    otherwise it is drawn from ``rng``.
    """
    if pt <= 0 or sigma2 < 0:
        raise ValueError("need pt > 0 and sigma2 >= 0")
    h_ext = as_vector(h_ext)
    n = pattern.matrix.shape[0]
    if h_ext.shape != (n,):
        raise ValueError("channel length must match the pattern size")
    pilots = np.full(n, np.sqrt(pt), dtype=np.complex128)
    if noise is None:
        if rng is None:
            raise ValueError("need an rng when no noise vector is supplied")
        std = np.sqrt(sigma2 / 2.0)
        noise = std * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    y_p = pilots * (pattern.matrix @ h_ext) + noise
    return TrainingObservation(y_p=y_p, pilots=pilots, pattern=pattern)


def error_covariance(pattern: ReflectionPattern, pt: float, sigma2: float) -> np.ndarray:
    """(sigma^2 / P_t) (Theta^H Theta)^-1; raises SingularMatrix if rank-deficient."""
    return (sigma2 / pt) * invert(pattern.gram())


def ls_estimate(obs: TrainingObservation, pt: float, sigma2: float) -> EstimationResult:
    """Least-squares estimate h = Theta^-1 X^-1 y and its error covariance."""
    theta_inv = invert(obs.pattern.matrix)
    h_est = theta_inv @ (obs.y_p / obs.pilots)
    cov = (sigma2 / pt) * (theta_inv @ theta_inv.conj().T)
    return EstimationResult(h_est=h_est, cov=cov, mse_analytic=float(np.trace(cov).real))


def empirical_mse(
    h_ext: np.ndarray,
    pattern: ReflectionPattern,
    pt: float,
    sigma2: float,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo estimate of E[||h_est - h||^2] over independent noise draws."""
    if trials < 1:
        raise ValueError("need at least one trial")
    h_ext = as_vector(h_ext)
    n = pattern.matrix.shape[0]
    theta_inv = invert(pattern.matrix)
    std = np.sqrt(sigma2 / 2.0)
    noise = std * (rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n)))
    # h_est - h = Theta^-1 X^-1 z, with constant pilots sqrt(pt)
    err = noise @ (theta_inv.T / np.sqrt(pt))
    return float(np.mean(np.sum(np.abs(err) ** 2, axis=1)))
