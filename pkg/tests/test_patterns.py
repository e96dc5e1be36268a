import numpy as np
import pytest

from irsbeam.errors import Intractable, SingularMatrix
from irsbeam.hadamard import hadamard
from irsbeam.linalg import matrix_rank
from irsbeam.patterns import (
    PhaseShiftSet,
    ReflectionPattern,
    design_pattern,
    dft_matrix,
    exhaustive_pattern_search,
    naive_pattern,
    pattern_mse,
    quantized_dft_pattern,
    truncated_hadamard_pattern,
)


def test_phase_set_values():
    f = PhaseShiftSet(2)
    assert f.levels == 4
    assert f.step == pytest.approx(np.pi / 2)
    np.testing.assert_allclose(f.values, [0, np.pi / 2, np.pi, 3 * np.pi / 2])
    with pytest.raises(ValueError):
        PhaseShiftSet(0)


def test_naive_small_cases():
    np.testing.assert_array_equal(
        naive_pattern(1).matrix, np.array([[1, 1], [1, -1]], dtype=complex)
    )
    np.testing.assert_array_equal(
        naive_pattern(2).matrix,
        np.array([[1, 1, 1], [1, -1, 1], [1, 1, -1]], dtype=complex),
    )


def test_naive_full_rank():
    assert matrix_rank(naive_pattern(2).matrix, 1e-9) == 3
    for m in (1, 5, 16, 33):
        assert naive_pattern(m).is_full_rank()


def test_dft_matrix_values():
    np.testing.assert_allclose(dft_matrix(2), [[1, 1], [1, -1]], atol=1e-15)
    assert dft_matrix(4)[1, 1] == pytest.approx(-1j, abs=1e-15)
    d8 = dft_matrix(8)
    np.testing.assert_allclose(d8.conj().T @ d8, 8 * np.eye(8), atol=1e-10)


def test_quantized_dft_exact_when_phases_representable():
    # M+1 = 4 with 2-bit phases: every DFT phase is a multiple of pi/2
    pat = quantized_dft_pattern(3, PhaseShiftSet(2))
    np.testing.assert_allclose(pat.matrix, dft_matrix(4), atol=1e-12)


def test_quantized_dft_nearest_level():
    # target phase 2pi/3 is 60 deg from pi and 120 deg from 0
    pat = quantized_dft_pattern(2, PhaseShiftSet(1))
    assert pat.matrix[1, 1] == pytest.approx(np.exp(1j * np.pi), abs=1e-12)


def test_quantized_dft_16_orthogonal_2bit():
    pat = quantized_dft_pattern(15, PhaseShiftSet(2))
    np.testing.assert_allclose(pat.gram(), 16 * np.eye(16), atol=1e-9)


def test_quantized_dft_1bit_mostly_singular():
    # With 1-bit phases the quantized entry is the sign of the real part, a
    # function of (i-1)(j-1) mod (M+1); that structure forces singularity at
    # every order except 2 and 4.  No value-based midpoint choice can rescue
    # 8, and orders 16/32 stay singular for ANY midpoint assignment (the
    # forced non-midpoint signs already make the determinant vanish).
    invertible = [
        m + 1
        for m in range(1, 51)
        if quantized_dft_pattern(m, PhaseShiftSet(1)).is_full_rank()
    ]
    assert invertible == [2, 4]


def test_truncated_hadamard_cases():
    np.testing.assert_array_equal(truncated_hadamard_pattern(3).matrix, hadamard(4))
    np.testing.assert_array_equal(
        truncated_hadamard_pattern(4).matrix, hadamard(8)[:5, :5]
    )
    pat3 = truncated_hadamard_pattern(2)
    np.testing.assert_array_equal(pat3.matrix, hadamard(4)[:3, :3])
    assert pat3.is_full_rank()


def test_design_pattern_selection():
    assert design_pattern(7, PhaseShiftSet(1)).kind == "hadamard_truncated"
    np.testing.assert_allclose(
        design_pattern(7, PhaseShiftSet(1)).gram(), 8 * np.eye(8), atol=1e-12
    )
    pat16 = design_pattern(15, PhaseShiftSet(2))
    assert pat16.kind == "dft_quantized"
    np.testing.assert_allclose(pat16.gram(), 16 * np.eye(16), atol=1e-9)
    pat7 = design_pattern(6, PhaseShiftSet(2))
    assert pat7.is_full_rank() and not pat7.used_fallback


def test_design_pattern_feasibility_range():
    # constraints (first column, modulus, phases) hold for every construction
    for m in range(1, 34):
        for b in (1, 2):
            pat = design_pattern(m, PhaseShiftSet(b))
            assert pat.is_full_rank()
            np.testing.assert_allclose(pat.matrix[:, 0], np.ones(m + 1), atol=1e-12)
            np.testing.assert_allclose(np.abs(pat.matrix), 1.0, atol=1e-12)


def test_pattern_validation_rejects_bad_matrices():
    f = PhaseShiftSet(1)
    with pytest.raises(ValueError):
        ReflectionPattern(np.array([[1, 1], [-1, 1]], dtype=complex), f)  # bad col 0
    with pytest.raises(ValueError):
        ReflectionPattern(np.array([[1, 2], [1, -1]], dtype=complex), f)  # modulus
    with pytest.raises(ValueError):
        ReflectionPattern(np.array([[1, 1j], [1, -1]], dtype=complex), f)  # phase


def test_pattern_mse_orthogonal():
    # P_t / sigma^2 = 30 dB
    pat = design_pattern(7, PhaseShiftSet(1))
    assert pattern_mse(pat, pt=1.0, sigma2=1e-3) == pytest.approx(1e-3, rel=1e-12)


def test_pattern_mse_naive_m2():
    assert pattern_mse(naive_pattern(2), 1.0, 1.0) == pytest.approx(1.5, rel=1e-12)


def test_pattern_mse_scales_linearly():
    pat = naive_pattern(3)
    assert pattern_mse(pat, 1.0, 10.0) == pytest.approx(
        10 * pattern_mse(pat, 1.0, 1.0), rel=1e-12
    )


def test_pattern_mse_singular_raises():
    pat = quantized_dft_pattern(5, PhaseShiftSet(1))  # known rank-deficient
    assert not pat.is_full_rank()
    with pytest.raises(SingularMatrix):
        pattern_mse(pat, 1.0, 1.0)


def test_exhaustive_m1_b1():
    best = exhaustive_pattern_search(1, PhaseShiftSet(1))
    np.testing.assert_array_equal(best.matrix, np.array([[1, 1], [1, -1]], dtype=complex))
    assert pattern_mse(best, 1.0, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_exhaustive_m1_b2_reaches_lower_bound():
    best = exhaustive_pattern_search(1, PhaseShiftSet(2))
    assert pattern_mse(best, 1.0, 1.0) == pytest.approx(1.0, rel=1e-9)


def test_exhaustive_m2_b1_matches_naive():
    best = exhaustive_pattern_search(2, PhaseShiftSet(1))
    assert pattern_mse(best, 1.0, 1.0) == pytest.approx(1.5, rel=1e-9)
    # no orthogonal 3x3 +-1 matrix exists, so the bound is not attained
    assert pattern_mse(best, 1.0, 1.0) > 1.0 + 1e-6


def test_exhaustive_guard():
    with pytest.raises(Intractable):
        exhaustive_pattern_search(5, PhaseShiftSet(2))


def test_pattern_csv_roundtrip():
    text = naive_pattern(1).to_csv()
    assert text.splitlines()[0] == "1+0j,1+0j"
    assert text.splitlines()[1] == "1+0j,-1+0j"
