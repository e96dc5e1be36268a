"""Dense complex-matrix kernels: inversion, rank, Hermitian eigendecomposition.

Everything here is written against plain ``numpy`` arrays and implements the
factorizations directly (Gauss-Jordan with partial pivoting, cyclic complex
Jacobi sweeps, Cholesky).  Matrices in this pipeline are small (at most
~65x65) and dense, so O(n^3) direct methods are more than enough and keep the
package free of external solver dependencies.
"""

from __future__ import annotations

import numpy as np

from .errors import NoConvergence, SingularMatrix

# Relative pivot threshold below which a matrix is declared singular.  Pattern
# matrices have unimodular entries, so all scales are O(1).
SINGULARITY_RTOL = 1e-12

# Allowed asymmetry |A - A^H| before an input is rejected as non-Hermitian.
HERMITIAN_ATOL = 1e-9


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-D complex array (copy)."""
    a = np.array(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def as_vector(v) -> np.ndarray:
    """Coerce to a finite 1-D complex array (copy)."""
    v = np.array(v, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def invert(a) -> np.ndarray:
    """Invert a square complex matrix by Gauss-Jordan with partial pivoting.

    Raises SingularMatrix if any pivot magnitude falls at or below
    SINGULARITY_RTOL times the largest row sum of the input.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError(f"cannot invert a {n}x{m} matrix")
    scale = float(np.max(np.sum(np.abs(a), axis=1)))
    if scale == 0.0:
        raise SingularMatrix("zero matrix")
    work = np.hstack([a, np.eye(n, dtype=np.complex128)])
    for k in range(n):
        p = k + int(np.argmax(np.abs(work[k:, k])))
        pivot = work[p, k]
        if abs(pivot) <= SINGULARITY_RTOL * scale:
            raise SingularMatrix(
                f"pivot {abs(pivot):.3e} at column {k} below {SINGULARITY_RTOL:.0e} * {scale:.3e}"
            )
        if p != k:
            work[[k, p]] = work[[p, k]]
        work[k] /= pivot
        # eliminate column k from every other row in one shot
        col = work[:, k].copy()
        col[k] = 0.0
        work -= np.outer(col, work[k])
    return work[:, n:]


def solve(a, b) -> np.ndarray:
    """Solve a x = b for one right-hand side via invert()."""
    return invert(a) @ as_vector(b)


def matrix_rank(a, tol: float) -> int:
    """Pivot-counting rank: eliminate column by column with partial pivoting
    and count pivots whose magnitude exceeds ``tol`` times the largest one."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    work = as_matrix(a)
    n_rows, n_cols = work.shape
    pivots: list[float] = []
    row = 0
    for col in range(n_cols):
        if row >= n_rows:
            break
        p = row + int(np.argmax(np.abs(work[row:, col])))
        mag = float(abs(work[p, col]))
        pivots.append(mag)
        if mag == 0.0:
            continue
        if p != row:
            work[[row, p]] = work[[p, row]]
        factors = work[row + 1:, col] / work[row, col]
        work[row + 1:] -= np.outer(factors, work[row])
        row += 1
    largest = max(pivots)
    if largest == 0.0:
        return 0
    return int(sum(mag > tol * largest for mag in pivots))


def cholesky(a) -> np.ndarray:
    """Lower Cholesky factor of a Hermitian positive-definite matrix.

    Raises SingularMatrix if a (symmetrized) leading minor is not positive.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError("cholesky needs a square matrix")
    a = (a + a.conj().T) / 2.0
    scale = float(np.max(np.abs(np.diag(a)))) or 1.0
    L = np.zeros_like(a)
    for j in range(n):
        d = a[j, j].real - np.sum(np.abs(L[j, :j]) ** 2)
        if d <= SINGULARITY_RTOL * scale:
            raise SingularMatrix(f"not positive definite at column {j} (d={d:.3e})")
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j].conj()) / L[j, j]
    return L


def solve_lower(L, b) -> np.ndarray:
    """Forward substitution: solve L x = b for lower-triangular L (b may be a matrix)."""
    L = np.asarray(L)
    b = np.asarray(b, dtype=np.complex128)
    one_dim = b.ndim == 1
    if one_dim:
        b = b[:, None]
    x = np.zeros_like(b)
    for i in range(L.shape[0]):
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x[:, 0] if one_dim else x


def cho_solve(L, b) -> np.ndarray:
    """Solve (L L^H) x = b given the lower Cholesky factor. b may be a matrix."""
    L = np.asarray(L)
    b = np.asarray(b, dtype=np.complex128)
    one_dim = b.ndim == 1
    if one_dim:
        b = b[:, None]
    n = L.shape[0]
    y = np.zeros_like(b)
    for i in range(n):
        y[i] = (b[i] - L[i, :i] @ y[:i]) / L[i, i]
    x = np.zeros_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - L[i + 1:, i].conj() @ x[i + 1:]) / L[i, i].conj()
    return x[:, 0] if one_dim else x


def hermitian_eig(a, max_sweeps: int = 10_000) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    The input is symmetrized first; asymmetry beyond HERMITIAN_ATOL (relative)
    is rejected.  Returns (eigenvalues ascending, eigenvectors as columns).
    Raises NoConvergence if the sweep cap is exceeded.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError("eigendecomposition needs a square matrix")
    scale = float(np.max(np.abs(a))) or 1.0
    if float(np.max(np.abs(a - a.conj().T))) > HERMITIAN_ATOL * max(1.0, scale):
        raise ValueError("matrix is not Hermitian within tolerance")
    A = (a + a.conj().T) / 2.0
    V = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([A[0, 0].real]), V
    norm = float(np.linalg.norm(A)) or 1.0
    for _ in range(max_sweeps):
        off = A.copy()
        np.fill_diagonal(off, 0.0)
        if float(np.linalg.norm(off)) <= 1e-13 * norm:
            break
        thresh = 1e-300
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = A[p, q]
                r = abs(g)
                if r <= thresh:
                    continue
                # unitary plane rotation (p,q) annihilating A[p,q]:
                # diag phase makes the 2x2 block real, then a real Jacobi
                # rotation zeroes it.
                phase = g / r
                tau = (A[q, q].real - A[p, p].real) / (2.0 * r)
                if tau >= 0:
                    t = -1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                jpp, jpq = phase * c, -phase * s
                jqp, jqq = s, c
                colp = A[:, p] * jpp + A[:, q] * jqp
                colq = A[:, p] * jpq + A[:, q] * jqq
                A[:, p], A[:, q] = colp, colq
                rowp = np.conj(jpp) * A[p] + np.conj(jqp) * A[q]
                rowq = np.conj(jpq) * A[p] + np.conj(jqq) * A[q]
                A[p], A[q] = rowp, rowq
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                A[p, q] = 0.0
                A[q, p] = 0.0
                vcolp = V[:, p] * jpp + V[:, q] * jqp
                vcolq = V[:, p] * jpq + V[:, q] * jqq
                V[:, p], V[:, q] = vcolp, vcolq
    else:
        raise NoConvergence(f"Jacobi did not converge within {max_sweeps} sweeps")
    w = np.diag(A).real.copy()
    order = np.argsort(w)
    return w[order], V[:, order]


def hermitian_eig_max(a, max_sweeps: int = 10_000) -> tuple[float, np.ndarray]:
    """Dominant eigenpair (largest eigenvalue and its eigenvector)."""
    w, V = hermitian_eig(a, max_sweeps=max_sweeps)
    return float(w[-1]), V[:, -1].copy()
