"""Semidefinite program for the relaxed beamforming problem, with an
in-house interior-point solver.

The fractional SINR objective over the lifted variable Phi (unit diagonal,
PSD) is linearized by the variable change Psi = Phi / (tr(Rp Phi) + 1),
t = 1 / (tr(Rp Phi) + 1), giving

    maximize tr(H Psi)  s.t.  tr(Rp Psi) + t = 1,  [Psi]_mm = t,  Psi >= 0.

Eliminating t = [Psi]_00 leaves a standard-form SDP with n = M+1 equality
constraints, solved here on its dual

    minimize b^T y  s.t.  Z(y) = sum_i y_i A_i - B >= 0

by a log-barrier Newton method: at each barrier parameter tau the inner
Newton iteration minimizes tau b^T y - log det Z(y), and at a converged
stage X = Z^{-1}/tau is an exactly feasible primal point with duality gap
n/tau.  Newton systems are n x n, every factorization is a dense Cholesky.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, SingularMatrix
from .linalg import as_matrix, as_vector, cho_solve, cholesky

_STAGE_FACTOR = 10.0
_MAX_STAGES = 60
_MAX_NEWTON_PER_STAGE = 100


@dataclass(frozen=True)
class SdpProblemData:
    """Objective matrix H = h h^H and error-Gram inverse Rp of the lifted problem."""

    h_outer: np.ndarray = field(repr=False)
    r_p: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = as_matrix(self.h_outer)
        r = as_matrix(self.r_p)
        if h.shape != r.shape or h.shape[0] != h.shape[1]:
            raise ValueError("objective and covariance matrices must be square, same size")
        for name, m in (("h_outer", h), ("r_p", r)):
            if np.max(np.abs(m - m.conj().T)) > 1e-9 * max(1.0, np.max(np.abs(m))):
                raise ValueError(f"{name} must be Hermitian")
        object.__setattr__(self, "h_outer", (h + h.conj().T) / 2)
        object.__setattr__(self, "r_p", (r + r.conj().T) / 2)

    @property
    def size(self) -> int:
        return self.h_outer.shape[0]

    def constraint_matrices(self) -> tuple[list[np.ndarray], np.ndarray]:
        """Equality constraints <A_i, Psi> = b_i after eliminating t = [Psi]_00."""
        n = self.size
        a_first = self.r_p.copy()
        a_first[0, 0] += 1.0
        mats = [a_first]
        for m in range(1, n):
            a = np.zeros((n, n), dtype=np.complex128)
            a[m, m] = 1.0
            a[0, 0] = -1.0
            mats.append(a)
        b = np.zeros(n)
        b[0] = 1.0
        return mats, b


@dataclass(frozen=True)
class SdpSolution:
    """Optimal (Psi*, t*) of the linearized problem and Phi* = Psi*/t*.

    ``objective`` is the dual certificate b^T y (a guaranteed upper bound on
    tr(H Psi) over the feasible set, accurate to the gap tolerance); ``gap``
    is the certified difference to the returned primal point.
    """

    psi: np.ndarray = field(repr=False)
    t: float
    phi: np.ndarray = field(repr=False)
    objective: float
    gap: float
    newton_iterations: int


def _feasible_start(data: SdpProblemData) -> np.ndarray:
    """y with Z(y) strictly positive definite for any PSD Rp.

    With y = (n*s, s, ..., s) the diagonal constraint matrices contribute
    exactly s*I, so Z = n*s*Rp + s*I - B, which dominates s*I - B; the
    normalized objective has unit trace (rank one), so s = 2 suffices.
    """
    n = data.size
    s = 2.0
    y = np.full(n, s)
    y[0] = n * s
    return y


def solve_sdp(data: SdpProblemData, tol: float = 1e-8) -> SdpSolution:
    """Solve the linearized relaxation to the requested duality-gap tolerance.

    Raises NoConvergence if the barrier stages or Newton iterations exceed
    their caps (callers fall back to a matched-filter initialization).
    """
    if not 1e-10 <= tol <= 1e-4:
        raise ValueError("tol must lie in [1e-10, 1e-4]")
    n = data.size
    scale = float(np.trace(data.h_outer).real)
    if scale <= 0:
        raise ValueError("objective matrix must have positive trace")
    B = data.h_outer / scale
    a_mats, b_vec = data.constraint_matrices()
    a_stack = np.stack(a_mats)

    def z_of(y: np.ndarray) -> np.ndarray:
        return np.tensordot(y, a_stack, axes=1) - B

    y = _feasible_start(data)
    L = cholesky(z_of(y))

    def logdet(L: np.ndarray) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(L).real)))

    eye = np.eye(n, dtype=np.complex128)

    def center(y, L, tau: float, resid_target: float, loose: bool):
        """Newton-iterate tau b^T y - log det Z(y).

        Works with the tau-scaled gradient r = b - A(Z^-1)/tau, which is
        exactly the feasibility residual of the recovered primal Z^-1/tau
        (forming tau*b - A(Z^-1) directly would cancel catastrophically at
        large tau).  Loose mode stops at a fixed Newton decrement, final mode
        drives the residual itself below ``resid_target``.  Armijo tests
        compare value differences, accurate when tau b^T y is huge.
        """
        iters = 0
        last_resid = np.inf
        for _ in range(_MAX_NEWTON_PER_STAGE):
            iters += 1
            z_inv = cho_solve(L, eye)
            z_inv = (z_inv + z_inv.conj().T) / 2
            w = z_inv @ a_stack  # stacked W_i = Z^-1 A_i
            resid = b_vec - np.einsum("iaa->i", w).real / tau
            resid_norm = float(np.max(np.abs(resid)))
            hess_t = np.einsum("iab,jba->ij", w, w).real / tau
            hess_t = (hess_t + hess_t.T) / 2
            # Jacobi-precondition: entries span many orders at large tau
            d = np.sqrt(np.clip(np.diag(hess_t), 1e-300, None))
            try:
                hl = cholesky((hess_t / np.outer(d, d)).astype(np.complex128))
                step = -cho_solve(hl, (resid / d).astype(np.complex128)).real / d
            except SingularMatrix as exc:
                raise NoConvergence(f"Newton system singular: {exc}") from exc
            decrement = tau * float(-resid @ step)  # Newton decrement^2 of f
            if loose and decrement / 2.0 <= 0.05:
                return y, L, iters
            if not loose and resid_norm <= resid_target:
                return y, L, iters
            if np.max(np.abs(step)) <= 4 * np.finfo(float).eps * (1.0 + np.max(np.abs(y))):
                return y, L, iters  # step under float resolution of y
            if not loose and resid_norm > 0.9 * last_resid and decrement < 1e-3:
                return y, L, iters  # residual exhausted by float precision
            last_resid = resid_norm
            base_logdet = logdet(L)
            alpha = 1.0
            moved = False
            for _ in range(60):
                cand = y + alpha * step
                try:
                    l_cand = cholesky(z_of(cand))
                except SingularMatrix:
                    alpha *= 0.5
                    continue
                diff = tau * float(b_vec @ (alpha * step)) - (logdet(l_cand) - base_logdet)
                if diff <= -0.25 * alpha * decrement:
                    y, L = cand, l_cand
                    moved = True
                    break
                alpha *= 0.5
            if not moved:
                if decrement < 1e-3:
                    return y, L, iters  # float-limited but well centered
                raise NoConvergence("line search failed to make progress")
        raise NoConvergence("Newton iteration cap exceeded")

    total_newton = 0
    resid_target = min(tol, 1e-9)
    # follow the path loosely, then center tightly at exactly the tau whose
    # analytic-center gap n/tau meets the tolerance (overshooting tau only
    # amplifies the float sensitivity of the primal recovery)
    tau = 1.0
    for _ in range(_MAX_STAGES):
        objective_scale = max(1.0, abs(float(b_vec @ y)))
        tau_needed = n / (tol * objective_scale)
        if tau >= tau_needed:
            y, L, iters = center(y, L, tau, resid_target, loose=False)
            total_newton += iters
            break
        y, L, iters = center(y, L, tau, resid_target, loose=True)
        total_newton += iters
        tau = min(tau * _STAGE_FACTOR, tau_needed)
    else:
        raise NoConvergence("barrier stage cap exceeded")

    z_inv = cho_solve(L, eye)
    x_raw = (z_inv + z_inv.conj().T) / (2.0 * tau)
    # project onto the affine constraints: X + sum(mu_i A_i) restores
    # <A_i, X> = b_i to machine precision (the Gram system is tiny and
    # well conditioned); PSD is preserved up to the projection size
    resid = b_vec - np.einsum("iab,ba->i", a_stack, x_raw).real
    gram = np.einsum("iab,jba->ij", a_stack, a_stack).real
    gl = cholesky(((gram + gram.T) / 2).astype(np.complex128))
    coeff = cho_solve(gl, resid.astype(np.complex128)).real
    psi = x_raw + np.tensordot(coeff, a_stack, axes=1)
    psi = (psi + psi.conj().T) / 2
    t = float(psi[0, 0].real)
    dual_value = scale * float(b_vec @ y)
    primal_value = float(np.einsum("ab,ba->", data.h_outer, psi).real)
    return SdpSolution(
        psi=psi,
        t=t,
        phi=psi / t,
        objective=dual_value,
        gap=max(dual_value - primal_value, 0.0),
        newton_iterations=total_newton,
    )
