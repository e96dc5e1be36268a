"""Training reflection patterns and the estimation-MSE objective.

A reflection pattern is the (M+1) x (M+1) matrix whose rows are the extended
reflection vectors applied over the training symbols.  Feasibility means:
first column all ones (direct link estimated without phase shift), every
entry unit modulus with its phase in the discrete set, and full rank so the
least-squares inversion exists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import Intractable, SingularMatrix
from .hadamard import hadamard, smallest_hadamard_order
from .linalg import invert, matrix_rank

UNIT_MODULUS_ATOL = 1e-12
PHASE_MEMBER_ATOL = 1e-9
RANK_RTOL = 1e-9


@dataclass(frozen=True)
class PhaseShiftSet:
    """Uniform b-bit phase alphabet {0, 2pi/K, ..., (K-1) 2pi/K}, K = 2^b."""

    bits: int

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("need at least 1 phase-shift bit")

    @property
    def levels(self) -> int:
        return 2**self.bits

    @property
    def step(self) -> float:
        return 2.0 * np.pi / self.levels

    @property
    def values(self) -> np.ndarray:
        return np.arange(self.levels) * self.step

    def unit_values(self) -> np.ndarray:
        """e^{j phi} for every alphabet phase, with the quarter-turn points
        (+-1, +-j) represented exactly."""
        vals = np.exp(1j * self.values)
        quarter = 4 * np.arange(self.levels) % self.levels == 0
        exact = np.array([1, 1j, -1, -1j], dtype=np.complex128)
        vals[quarter] = exact[(4 * np.flatnonzero(quarter)) // self.levels]
        return vals

    def quantize_index(self, z: complex | np.ndarray) -> np.ndarray:
        """Index of the nearest alphabet phase; midpoints round up (mod K)."""
        angles = np.mod(np.angle(z), 2.0 * np.pi)
        return np.floor(angles / self.step + 0.5).astype(int) % self.levels

    def quantize(self, z: complex | np.ndarray) -> np.ndarray:
        """Nearest alphabet phase(s) for unit-modulus value(s).

        Nearest is measured along the circle; a value exactly midway between
        two levels rounds up to the counter-clockwise one.
        """
        return self.quantize_index(z) * self.step


@dataclass(frozen=True)
class ReflectionPattern:
    """Feasible training pattern plus the phase alphabet it was built for."""

    matrix: np.ndarray = field(repr=False)
    phase_set: PhaseShiftSet
    kind: str = "custom"
    used_fallback: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        rows, cols = m.shape
        if rows != cols or rows < 2:
            raise ValueError("pattern must be square of size M+1 >= 2")
        if np.max(np.abs(m[:, 0] - 1.0)) > UNIT_MODULUS_ATOL:
            raise ValueError("first pattern column must be all ones")
        if np.max(np.abs(np.abs(m) - 1.0)) > UNIT_MODULUS_ATOL:
            raise ValueError("pattern entries must be unit modulus")
        quantized = self.phase_set.unit_values()[self.phase_set.quantize_index(m)]
        if np.max(np.abs(quantized - m)) > PHASE_MEMBER_ATOL:
            raise ValueError("pattern phases must lie in the phase-shift set")
        object.__setattr__(self, "matrix", m)

    @property
    def m_groups(self) -> int:
        return self.matrix.shape[0] - 1

    def gram(self) -> np.ndarray:
        return self.matrix.conj().T @ self.matrix

    def is_full_rank(self) -> bool:
        n = self.matrix.shape[0]
        return matrix_rank(self.matrix, RANK_RTOL) == n

    def to_csv(self) -> str:
        """One row per pattern row, entries formatted as 're+imj'."""
        lines = []
        for row in self.matrix:
            lines.append(",".join(f"{z.real:.12g}{z.imag:+.12g}j" for z in row))
        return "\n".join(lines) + "\n"


def naive_pattern(m_groups: int, phase_set: PhaseShiftSet | None = None) -> ReflectionPattern:
    """Always-feasible pattern: -1 on the diagonal below the first row, +1 elsewhere."""
    if m_groups < 1:
        raise ValueError("need at least one sub-surface")
    n = m_groups + 1
    m = np.ones((n, n), dtype=np.complex128)
    idx = np.arange(1, n)
    m[idx, idx] = -1.0
    return ReflectionPattern(m, phase_set or PhaseShiftSet(1), kind="naive")


def dft_matrix(order: int) -> np.ndarray:
    """DFT matrix with entries exp(-2j pi (i-1)(j-1) / order)."""
    if order < 1:
        raise ValueError("order must be positive")
    k = np.arange(order)
    return np.exp(-2j * np.pi * np.outer(k, k) / order)


def quantized_dft_pattern(m_groups: int, phase_set: PhaseShiftSet) -> ReflectionPattern:
    """Entry-wise nearest-phase quantization of the (M+1)-point DFT matrix.

    Level selection is done in exact integer arithmetic on the rational DFT
    phases (-2 pi a b / n against levels 2 pi m / K), so the result is
    platform independent; midpoints round up.  Full rank is NOT guaranteed
    (with 1-bit phases it mostly is not); callers must check.
    """
    if m_groups < 1:
        raise ValueError("need at least one sub-surface")
    n = m_groups + 1
    K = phase_set.levels
    vals = phase_set.unit_values()
    prods = np.outer(np.arange(n, dtype=object), np.arange(n, dtype=object))
    m = np.empty((n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            num = int((-prods[a, b] * K) % (n * K))  # level position * n
            lower, rem = divmod(num, n)
            if 2 * rem < n:
                idx = lower
            else:  # nearest above, and midpoints round up
                idx = (lower + 1) % K
            m[a, b] = vals[idx]
    return ReflectionPattern(m, phase_set, kind="dft_quantized")


def truncated_hadamard_pattern(m_groups: int) -> ReflectionPattern:
    """Leading (M+1)x(M+1) block of the smallest constructible Hadamard matrix."""
    if m_groups < 1:
        raise ValueError("need at least one sub-surface")
    n = m_groups + 1
    order = smallest_hadamard_order(n)
    block = hadamard(order)[:n, :n]
    return ReflectionPattern(block, PhaseShiftSet(1), kind="hadamard_truncated")


def design_pattern(m_groups: int, phase_set: PhaseShiftSet) -> ReflectionPattern:
    """DFT/Hadamard-based training pattern: quantized DFT for b >= 2, truncated
    Hadamard for b = 1, with a fallback to the naive pattern if the
    construction happens to be rank-deficient (recorded in ``used_fallback``)."""
    if phase_set.bits >= 2:
        candidate = quantized_dft_pattern(m_groups, phase_set)
    else:
        candidate = truncated_hadamard_pattern(m_groups)
    if candidate.is_full_rank():
        return candidate
    fallback = naive_pattern(m_groups, phase_set)
    return ReflectionPattern(fallback.matrix, phase_set, kind="naive", used_fallback=True)


def pattern_mse(pattern: ReflectionPattern, pt: float, sigma2: float) -> float:
    """Estimation MSE (sigma^2 / P_t) * tr((Theta^H Theta)^-1) of a full-rank pattern."""
    if pt <= 0:
        raise ValueError("transmit power must be positive")
    if sigma2 < 0:
        raise ValueError("noise power must be nonnegative")
    gram_inv = invert(pattern.gram())  # raises SingularMatrix when rank-deficient
    return float(sigma2 / pt * np.trace(gram_inv).real)


def exhaustive_pattern_search(m_groups: int, phase_set: PhaseShiftSet) -> ReflectionPattern:
    """Globally MSE-optimal feasible pattern by brute force (test oracle only).

    Enumerates all K^(M(M+1)) phase assignments of the free entries in
    lexicographic order and keeps the first full-rank minimizer.
    """
    free = m_groups * (m_groups + 1)
    if phase_set.bits * free > 20:
        raise Intractable(f"{phase_set.levels}^{free} patterns exceed the search guard")
    n = m_groups + 1
    values = phase_set.unit_values()
    best: ReflectionPattern | None = None
    best_mse = np.inf
    for assignment in itertools.product(range(phase_set.levels), repeat=free):
        m = np.ones((n, n), dtype=np.complex128)
        m[:, 1:] = values[np.reshape(assignment, (n, m_groups))]
        try:
            mse = float(np.trace(invert(m.conj().T @ m)).real)
        except SingularMatrix:
            continue
        if mse < best_mse - 1e-12:
            best_mse = mse
            best = ReflectionPattern(m, phase_set, kind="exhaustive")
    if best is None:
        raise SingularMatrix("no full-rank pattern exists in the search space")
    return best
