import numpy as np
import pytest

from irsbeam.beamforming import BeamformingProblem, charnes_cooper
from irsbeam.sdp import SdpProblemData, solve_sdp


def random_problem(rng, n, pt=1.0, sigma2=0.5):
    h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    r_p = a @ a.conj().T / n + 0.1 * np.eye(n)
    return BeamformingProblem(h_tilde=h, r_p=r_p, pt=pt, sigma2=sigma2)


def brute_force_2x2(data: SdpProblemData, grid=200):
    """Direct parameterization of 2x2 PSD matrices with equal diagonal:
    Psi = [[t, c], [conj(c), t]] with |c| <= t, t fixed by the equality
    constraint; two-stage grid search over the off-diagonal polar coords."""
    h, r = data.h_outer, data.r_p

    def objective(x, phi):
        unit = np.exp(1j * phi)
        denom = np.trace(r).real + 1.0 + 2 * x * (r[1, 0] * unit).real
        t = 1.0 / denom
        return t * (np.trace(h).real + 2 * x * (h[1, 0] * unit).real)

    xs = np.linspace(0.0, 1.0, grid)
    phis = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    vals = objective(xs[:, None], phis[None, :])
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    best = vals[i, j]
    # refine around the coarse maximizer
    for _ in range(6):
        dx, dphi = (xs[1] - xs[0]) * 2, (phis[1] - phis[0]) * 2
        xs = np.clip(np.linspace(xs[i] - dx, xs[i] + dx, grid), 0.0, 1.0)
        phis = np.linspace(phis[j] - dphi, phis[j] + dphi, grid)
        vals = objective(xs[:, None], phis[None, :])
        i, j = np.unravel_index(np.argmax(vals), vals.shape)
        best = max(best, vals[i, j])
    return best


def test_constraint_data_shape():
    rng = np.random.default_rng(0)
    prob = random_problem(rng, 4)
    data = charnes_cooper(prob)
    mats, b = data.constraint_matrices()
    assert len(mats) == 4 and b.shape == (4,)
    np.testing.assert_allclose(mats[0], prob.r_p + np.diag([1, 0, 0, 0]), atol=1e-12)
    assert b[0] == 1.0 and np.all(b[1:] == 0.0)


def test_scaled_identity_is_feasible():
    # Psi = t I with t = 1/(1 + tr(Rp)) satisfies the equality constraint
    rng = np.random.default_rng(1)
    data = charnes_cooper(random_problem(rng, 3))
    t = 1.0 / (1.0 + np.trace(data.r_p).real)
    psi = t * np.eye(3)
    mats, b = data.constraint_matrices()
    residuals = [np.einsum("ab,ba->", a, psi).real - bi for a, bi in zip(mats, b)]
    assert np.max(np.abs(residuals)) < 1e-12


def test_degenerate_scalar_problem():
    # direct link only: the constraint fixes Psi = 1/(1 + Rp)
    data = SdpProblemData(
        h_outer=np.array([[2.0]], dtype=complex), r_p=np.array([[0.5]], dtype=complex)
    )
    sol = solve_sdp(data, tol=1e-9)
    assert sol.t == pytest.approx(1.0 / 1.5, rel=1e-6)
    assert sol.objective == pytest.approx(2.0 / 1.5, rel=1e-6)
    assert sol.phi[0, 0].real == pytest.approx(1.0, abs=1e-8)


def test_solution_invariants():
    rng = np.random.default_rng(2)
    for n in (2, 3, 5, 9):
        prob = random_problem(rng, n)
        data = charnes_cooper(prob)
        sol = solve_sdp(data, tol=1e-8)
        # Hermitian; PSD up to the constraint-projection polish
        np.testing.assert_allclose(sol.psi, sol.psi.conj().T, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(sol.psi)) >= -1e-4 * sol.t
        # equal diagonal = t and the normalization constraint (projected exact)
        np.testing.assert_allclose(np.diag(sol.psi).real, sol.t, atol=1e-12)
        total = np.einsum("ab,ba->", data.r_p, sol.psi).real + sol.t
        assert total == pytest.approx(1.0, abs=1e-12)
        # Phi has unit diagonal
        np.testing.assert_allclose(np.diag(sol.phi).real, 1.0, atol=1e-9)
        assert sol.t > 0
        assert sol.gap >= 0.0 and sol.gap <= 1e-5 * max(1.0, sol.objective)


def test_matches_2x2_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(8):
        data = charnes_cooper(random_problem(rng, 2))
        sol = solve_sdp(data, tol=1e-9)
        oracle = brute_force_2x2(data)
        assert sol.objective == pytest.approx(oracle, rel=1e-6, abs=1e-9)
        assert sol.objective >= oracle - 1e-7  # solver must not fall below the grid


def test_tolerance_validation():
    data = SdpProblemData(h_outer=np.eye(2, dtype=complex), r_p=np.eye(2, dtype=complex))
    with pytest.raises(ValueError):
        solve_sdp(data, tol=1e-2)


def test_rejects_non_hermitian_inputs():
    with pytest.raises(ValueError):
        SdpProblemData(h_outer=np.array([[0, 1], [0, 0]], dtype=complex), r_p=np.eye(2, dtype=complex))
