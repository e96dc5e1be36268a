"""Discrete-phase passive beamforming on top of an estimated channel.

The data-phase reflection vector theta (theta[0] = 1 for the direct link)
maximizes the SINR

    gamma(theta) = P_t |theta^H h|^2 / (sigma^2 (theta^H Rp theta + 1)),

where Rp is the inverse Gram of the training pattern, so the estimation
error enters as beamforming-dependent interference.  The pipeline is:
semidefinite relaxation of the lifted problem, Gaussian randomization to a
continuous unit-modulus vector, rotate-and-quantize to the discrete phase
alphabet, then cyclic one-dimensional refinement.  An exhaustive search and
a spectral upper bound serve as oracles and benchmarks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import Intractable, InvalidFrame, NoConvergence
from .linalg import as_matrix, as_vector, cholesky, hermitian_eig, hermitian_eig_max, solve_lower
from .patterns import PhaseShiftSet
from .sdp import SdpProblemData, SdpSolution, solve_sdp

# marker for continuous (unquantized) phases in ReflectionVector.phase_set
CONTINUOUS = None

_UNIT_ATOL = 1e-9


@dataclass(frozen=True)
class ReflectionVector:
    """Unit-modulus reflection coefficients with theta[0] fixed to 1."""

    theta: np.ndarray = field(repr=False)
    phase_set: PhaseShiftSet | None = CONTINUOUS

    def __post_init__(self):
        theta = as_vector(self.theta)
        if np.max(np.abs(np.abs(theta) - 1.0)) > _UNIT_ATOL:
            raise ValueError("reflection coefficients must be unit modulus")
        if abs(theta[0] - 1.0) > _UNIT_ATOL:
            raise ValueError("first reflection coefficient must be 1")
        theta[0] = 1.0
        if self.phase_set is not CONTINUOUS:
            vals = self.phase_set.unit_values()
            snapped = vals[self.phase_set.quantize_index(theta)]
            if np.max(np.abs(snapped - theta)) > _UNIT_ATOL:
                raise ValueError("phases must lie in the discrete phase set")
        object.__setattr__(self, "theta", theta)

    @property
    def m_groups(self) -> int:
        return self.theta.shape[0] - 1


@dataclass(frozen=True)
class BeamformingProblem:
    """Estimated channel, normalized error Gram inverse, and link powers."""

    h_tilde: np.ndarray = field(repr=False)
    r_p: np.ndarray = field(repr=False)
    pt: float
    sigma2: float

    def __post_init__(self):
        h = as_vector(self.h_tilde)
        r = as_matrix(self.r_p)
        n = h.shape[0]
        if r.shape != (n, n):
            raise ValueError("r_p must be square with the channel dimension")
        if np.max(np.abs(r - r.conj().T)) > 1e-9 * max(1.0, float(np.max(np.abs(r)))):
            raise ValueError("r_p must be Hermitian")
        if self.pt <= 0 or self.sigma2 <= 0:
            raise ValueError("need pt > 0 and sigma2 > 0")
        object.__setattr__(self, "h_tilde", h)
        object.__setattr__(self, "r_p", (r + r.conj().T) / 2)

    @property
    def size(self) -> int:
        return self.h_tilde.shape[0]


def _sinr_arrays(thetas: np.ndarray, prob: BeamformingProblem) -> np.ndarray:
    """SINR of each row of ``thetas`` (vectorized)."""
    num = prob.pt * np.abs(thetas.conj() @ prob.h_tilde) ** 2
    quad = np.einsum("ki,ij,kj->k", thetas.conj(), prob.r_p, thetas).real
    return num / (prob.sigma2 * (quad + 1.0))


def sinr(theta: ReflectionVector, prob: BeamformingProblem) -> float:
    """gamma(theta) for one reflection vector."""
    return float(_sinr_arrays(theta.theta[None, :], prob)[0])


def achievable_rate(gamma: float, m_groups: int, t0: int, gap_db: float) -> float:
    """Training-overhead-discounted rate (T0-(M+1))/T0 * log2(1 + gamma/Gamma)."""
    if gamma < 0:
        raise ValueError("SINR must be nonnegative")
    if t0 <= m_groups + 1:
        raise InvalidFrame(f"frame length {t0} leaves no data symbols for M={m_groups}")
    gap = 10.0 ** (gap_db / 10.0)
    return (t0 - (m_groups + 1)) / t0 * float(np.log2(1.0 + gamma / gap))


def _rotate_to_first(theta: np.ndarray) -> np.ndarray:
    """Global phase rotation making theta[0] = 1 (SINR-invariant)."""
    out = theta * np.exp(-1j * np.angle(theta[0]))
    out[0] = 1.0
    return out


def exhaustive_beam_search(
    prob: BeamformingProblem, phase_set: PhaseShiftSet
) -> ReflectionVector:
    """Globally SINR-optimal discrete reflection vector by enumeration.

    Candidates are visited in lexicographic phase-index order and only strict
    improvements are kept, so ties resolve to the lexicographically first
    maximizer.  Guarded to b*M <= 20.
    """
    m = prob.size - 1
    if phase_set.bits * m > 20:
        raise Intractable(f"{phase_set.levels}^{m} candidates exceed the search guard")
    vals = phase_set.unit_values()
    best_theta: np.ndarray | None = None
    best_gamma = -np.inf
    chunk = 1 << 14
    combos = itertools.product(range(phase_set.levels), repeat=m)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            break
        idx = np.asarray(block, dtype=int)
        thetas = np.ones((idx.shape[0], m + 1), dtype=np.complex128)
        if m:
            thetas[:, 1:] = vals[idx]
        gammas = _sinr_arrays(thetas, prob)
        k = int(np.argmax(gammas))
        if gammas[k] > best_gamma:
            best_gamma = float(gammas[k])
            best_theta = thetas[k].copy()
    return ReflectionVector(best_theta, phase_set)


def charnes_cooper(prob: BeamformingProblem) -> SdpProblemData:
    """Lift the fractional SINR objective into the linearized SDP data."""
    h = prob.h_tilde
    return SdpProblemData(h_outer=np.outer(h, h.conj()), r_p=prob.r_p)


def sdp_sinr_bound(solution: SdpSolution, prob: BeamformingProblem) -> float:
    """Relaxation objective mapped to SINR units (upper bounds every feasible theta)."""
    return prob.pt / prob.sigma2 * solution.objective


def gaussian_randomization(
    phi: np.ndarray,
    prob: BeamformingProblem,
    samples: int,
    rng: np.random.Generator,
) -> ReflectionVector:
    """Round the lifted solution to a feasible continuous reflection vector.

    Draws samples with covariance phi (via the eigendecomposition), projects
    each entry to unit modulus, and keeps the SINR-best candidate; a
    numerically rank-one phi short-circuits to its dominant eigenvector.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    phi = as_matrix(phi)
    w, v = hermitian_eig(phi)
    if w[-1] <= 0:
        raise ValueError("phi must have a positive dominant eigenvalue")
    if len(w) == 1 or w[-2] <= 1e-8 * w[-1]:
        return ReflectionVector(_rotate_to_first(_project_unit(v[:, -1])), CONTINUOUS)
    n = phi.shape[0]
    factor = v @ np.diag(np.sqrt(np.clip(w, 0.0, None)))
    draws = (
        rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    ) / np.sqrt(2.0)
    cands = _project_unit(draws @ factor.T)
    gammas = _sinr_arrays(cands, prob)
    best = int(np.argmax(gammas))
    return ReflectionVector(_rotate_to_first(cands[best]), CONTINUOUS)


def _project_unit(z: np.ndarray) -> np.ndarray:
    """Entry-wise projection to the unit circle (zeros mapped to 1)."""
    mag = np.abs(z)
    out = np.where(mag > 0, z / np.where(mag > 0, mag, 1.0), 1.0)
    return out


def rotate_and_quantize(
    theta_cont: ReflectionVector | np.ndarray, phase_set: PhaseShiftSet | None
) -> ReflectionVector:
    """Rotate so the first coefficient is 1, then snap phases to the alphabet.

    Accepts a raw unit-modulus array whose first entry may carry any phase
    (the rotation removes it without changing the SINR); with CONTINUOUS
    phases the result is just the rotated vector.
    """
    raw = theta_cont.theta if isinstance(theta_cont, ReflectionVector) else as_vector(theta_cont)
    if np.max(np.abs(np.abs(raw) - 1.0)) > _UNIT_ATOL:
        raise ValueError("reflection coefficients must be unit modulus")
    rotated = _rotate_to_first(raw.copy())
    if phase_set is CONTINUOUS:
        return ReflectionVector(rotated, CONTINUOUS)
    vals = phase_set.unit_values()
    snapped = vals[phase_set.quantize_index(rotated)]
    snapped[0] = 1.0
    return ReflectionVector(snapped, phase_set)


@dataclass(frozen=True)
class RefinementResult:
    """Refined vector plus the per-sweep SINR trajectory (first entry: initial)."""

    theta: ReflectionVector
    sinr_history: tuple[float, ...]
    sweeps: int

    @property
    def final_sinr(self) -> float:
        return self.sinr_history[-1]


def _coordinate_ascent(
    theta0: np.ndarray,
    objective,
    vals: np.ndarray,
    eps: float,
    max_sweeps: int,
) -> tuple[np.ndarray, list[float]]:
    """Cyclic one-dimensional exhaustive updates over coordinates 1..M."""
    theta = theta0.copy()
    current = float(objective(theta[None, :])[0])
    history = [current]
    n = theta.shape[0]
    for _ in range(max_sweeps):
        for m in range(1, n):
            cands = np.tile(theta, (len(vals), 1))
            cands[:, m] = vals
            scores = objective(cands)
            k = int(np.argmax(scores))
            if scores[k] > current:
                current = float(scores[k])
                theta = cands[k]
        history.append(current)
        if history[-1] - history[-2] <= eps * max(abs(history[-2]), 1e-300):
            break
    return theta, history


def successive_refinement(
    theta0: ReflectionVector,
    prob: BeamformingProblem,
    phase_set: PhaseShiftSet,
    eps: float = 1e-4,
    max_sweeps: int = 1000,
) -> RefinementResult:
    """Cyclic per-sub-surface exhaustive SINR ascent from a feasible start.

    The SINR trajectory is non-decreasing; a sweep improving by less than
    ``eps`` (relative) terminates the loop.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    theta, history = _coordinate_ascent(
        theta0.theta,
        lambda cands: _sinr_arrays(cands, prob),
        phase_set.unit_values(),
        eps,
        max_sweeps,
    )
    return RefinementResult(
        theta=ReflectionVector(theta, phase_set),
        sinr_history=tuple(history),
        sweeps=len(history) - 1,
    )


def sinr_upper_bound(prob: BeamformingProblem) -> float:
    """Spectral SINR bound (P_t/sigma^2) lambda_max((Rp + I/(M+1))^-1 H).

    Valid because theta^H theta = M+1 for unit-modulus theta turns the SINR
    denominator into theta^H (Rp + I/(M+1)) theta, making the objective a
    generalized Rayleigh quotient.
    """
    n = prob.size
    a = prob.r_p + np.eye(n) / n
    L = cholesky(a)
    h = solve_lower(L, prob.h_tilde)
    # lambda_max(A^-1 h h^H) via the Hermitian-similar matrix L^-1 H L^-H
    lam, _ = hermitian_eig_max(np.outer(h, h.conj()))
    return prob.pt / prob.sigma2 * float(lam)


def channel_gain_beam(
    prob: BeamformingProblem,
    phase_set: PhaseShiftSet,
    eps: float = 1e-4,
    max_sweeps: int = 1000,
) -> ReflectionVector:
    """Benchmark that maximizes |theta^H h|^2 only, ignoring estimation error.

    Starts from the quantized matched filter and runs the same cyclic
    refinement on the channel-gain objective.
    """
    matched = ReflectionVector(
        _rotate_to_first(_project_unit(prob.h_tilde.copy())), CONTINUOUS
    )
    start = rotate_and_quantize(matched, phase_set)
    gain = lambda cands: np.abs(cands.conj() @ prob.h_tilde) ** 2
    theta, _ = _coordinate_ascent(
        start.theta, gain, phase_set.unit_values(), eps, max_sweeps
    )
    return ReflectionVector(theta, phase_set)


def best_rotation_quantize(
    theta_cont: ReflectionVector | np.ndarray,
    prob: BeamformingProblem,
    phase_set: PhaseShiftSet,
    grid: int = 64,
) -> ReflectionVector:
    """SINR-best quantization over the global-rotation family of a vector.

    Quantization is NOT invariant to a global phase (the SINR is), so
    e^{j alpha} theta quantizes to genuinely different discrete points as
    alpha sweeps one alphabet step.  Scanning that family recovers the best
    rounding even when the lifted solution is rank one and sampling around
    it brings no diversity.  Each candidate is mapped back to theta[0] = 1
    inside the alphabet (the phase set is a group under addition).
    """
    raw = theta_cont.theta if isinstance(theta_cont, ReflectionVector) else as_vector(theta_cont)
    vals = phase_set.unit_values()
    alphas = np.linspace(0.0, phase_set.step, grid, endpoint=False)
    rotated = raw[None, :] * np.exp(1j * alphas)[:, None]
    cands = vals[phase_set.quantize_index(rotated)]
    cands = cands * cands[:, :1].conj()
    cands[:, 0] = 1.0
    best = int(np.argmax(_sinr_arrays(cands, prob)))
    return ReflectionVector(cands[best], phase_set)


@dataclass(frozen=True)
class SdrBeamResult:
    """Full SDR-initialized refinement pipeline output for one instance."""

    theta: ReflectionVector
    refinement: RefinementResult
    initial: ReflectionVector
    continuous: ReflectionVector
    sdp_objective_sinr: float | None
    used_fallback: bool


def sdr_refined_beam(
    prob: BeamformingProblem,
    phase_set: PhaseShiftSet,
    rng: np.random.Generator,
    samples: int = 1000,
    sdp_tol: float = 1e-6,
    eps: float = 1e-4,
    rotation_grid: int = 64,
) -> SdrBeamResult:
    """SDR + randomization + quantized initialization + successive refinement.

    The refinement starts from the SINR-best discrete point among the
    rotation-quantization family of the randomized continuous solution, its
    canonical rotate-and-quantize, and the quantized matched filter (the
    matched filter alone is the fallback when the SDP solver fails).
    """
    sdp_gamma: float | None = None
    used_fallback = False
    matched = _rotate_to_first(_project_unit(prob.h_tilde.copy()))
    try:
        solution = solve_sdp(charnes_cooper(prob), tol=sdp_tol)
        sdp_gamma = sdp_sinr_bound(solution, prob)
        cont = gaussian_randomization(solution.phi, prob, samples, rng)
    except NoConvergence:
        used_fallback = True
        cont = ReflectionVector(matched, CONTINUOUS)
    candidates = [
        rotate_and_quantize(cont, phase_set),
        best_rotation_quantize(cont, prob, phase_set, grid=rotation_grid),
        rotate_and_quantize(matched, phase_set),
    ]
    init = max(candidates, key=lambda cand: sinr(cand, prob))
    refinement = successive_refinement(init, prob, phase_set, eps=eps)
    return SdrBeamResult(
        theta=refinement.theta,
        refinement=refinement,
        initial=init,
        continuous=cont,
        sdp_objective_sinr=sdp_gamma,
        used_fallback=used_fallback,
    )
