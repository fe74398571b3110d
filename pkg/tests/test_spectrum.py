import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdamp.errors import ValidationError
from fracdamp.spectrum import (
    SobolevIndex,
    SpectralVector,
    SpectrumModel,
    geometric_spectrum,
    partition_interleave,
    sobolev_norm,
    weighted_square_sum,
)


def test_zero_vector_norm():
    m = geometric_spectrum(5, 2.0)
    v = SpectralVector(np.zeros(5))
    for alpha in (0.0, 0.5, 2.0):
        assert sobolev_norm(v, alpha, m) == 0.0


def test_two_mode_example():
    m = SpectrumModel(np.array([1.0, 4.0]))
    v = SpectralVector(np.array([1.0, 1.0]))
    assert sobolev_norm(v, 0.5, m) == pytest.approx(math.sqrt(5.0), rel=1e-15)


def test_identity_weight():
    m = SpectrumModel(np.array([1.0]))
    assert sobolev_norm(SpectralVector(np.array([3.0])), 0.0, m) == 3.0


def test_length_mismatch_rejected():
    m = geometric_spectrum(4, 2.0)
    with pytest.raises(ValidationError):
        sobolev_norm(SpectralVector(np.ones(3)), 1.0, m)


def test_geometric_examples():
    m = geometric_spectrum(3, 2.0, 1.0)
    assert list(m.eigenvalues) == [1.0, 2.0, 4.0]
    assert geometric_spectrum(1, 2.0, 5.0).eigenvalues[0] == 5.0
    assert geometric_spectrum(64, 2.0).eigenvalues[-1] == 2.0**63
    with pytest.raises(ValidationError):
        geometric_spectrum(3, 1.0)
    with pytest.raises(ValidationError):
        geometric_spectrum(0, 2.0)


def test_spectrum_invariants_enforced():
    with pytest.raises(ValidationError):
        SpectrumModel(np.array([2.0, 1.0]))
    with pytest.raises(ValidationError):
        SpectrumModel(np.array([0.0, 1.0]))
    with pytest.raises(ValidationError):
        SpectrumModel(np.array([1.0, 2.0]), coercivity_floor=1.5)


def test_partition_interleave_examples():
    m = geometric_spectrum(6, 2.0)
    parts = partition_interleave(m, 2)
    assert list(parts[0]) == [0, 2, 4] and list(parts[1]) == [1, 3, 5]
    singletons = partition_interleave(geometric_spectrum(5, 2.0), 5)
    assert all(len(p) == 1 for p in singletons)
    parts3 = partition_interleave(geometric_spectrum(8, 2.0), 3)
    assert [list(p) for p in parts3] == [[0, 3, 6], [1, 4, 7], [2, 5]]


@given(st.integers(1, 64), st.integers(1, 8))
def test_partition_disjoint_exhaustive(K, n_parts):
    m = geometric_spectrum(K, 2.0)
    parts = partition_interleave(m, n_parts)
    seen = 0
    for p in parts:
        for idx in p:
            bit = 1 << int(idx)
            assert not (seen & bit)
            seen |= bit
    assert seen == (1 << K) - 1


@given(
    st.lists(st.floats(-10, 10), min_size=1, max_size=12),
    st.floats(0, 2.0),
    st.floats(0, 2.0),
)
@settings(max_examples=200)
def test_norm_monotone_in_alpha(coeffs, a, b):
    # monotone in alpha when every eigenvalue is >= 1
    K = len(coeffs)
    m = geometric_spectrum(K, 2.0, scale=1.0)
    v = SpectralVector(np.array(coeffs))
    lo, hi = sorted((a, b))
    assert sobolev_norm(v, lo, m) <= sobolev_norm(v, hi, m) * (1 + 1e-12)


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=16))
def test_norm_at_zero_is_euclidean(coeffs):
    K = len(coeffs)
    m = geometric_spectrum(K, 3.0)
    v = SpectralVector(np.array(coeffs))
    assert sobolev_norm(v, 0.0, m) == pytest.approx(float(np.linalg.norm(coeffs)), rel=1e-12, abs=1e-300)


def test_parseval_against_extended_precision():
    # term-by-term reference in 50-digit arithmetic, K <= 64
    import mpmath

    mpmath.mp.dps = 50
    rng = np.random.default_rng(5)
    K = 64
    m = geometric_spectrum(K, 2.0)
    coeffs = rng.standard_normal(K)
    for alpha in (0.0, 0.3, 1.0, 2.5):
        got = weighted_square_sum(m.eigenvalues, coeffs, alpha)
        ref = mpmath.fsum(
            mpmath.mpf(float(lam)) ** (2 * mpmath.mpf(alpha)) * mpmath.mpf(float(c)) ** 2
            for lam, c in zip(m.eigenvalues, coeffs)
        )
        assert abs(got - float(ref)) <= 1e-13 * float(ref)


def test_log_domain_fallback_matches_mpmath():
    import mpmath

    mpmath.mp.dps = 60
    m = geometric_spectrum(40, 8.0)  # lam up to 8^39 ~ 1e35, alpha 2.5 overflows directly
    coeffs = np.full(40, 1e-3)
    got = weighted_square_sum(m.eigenvalues, coeffs, 2.5)
    ref = mpmath.fsum(
        mpmath.mpf(float(lam)) ** 5 * mpmath.mpf(1e-3) ** 2 for lam in m.eigenvalues
    )
    assert got == pytest.approx(float(ref), rel=1e-12)


def test_negative_alpha_needs_flag():
    with pytest.raises(ValidationError):
        SobolevIndex(-0.5)
    assert SobolevIndex(-0.5, allow_negative=True).alpha == -0.5


def test_csv_round_trip(tmp_path):
    m = geometric_spectrum(6, 2.0, scale=0.7)
    path = tmp_path / "spec.csv"
    m.to_csv(path)
    back = SpectrumModel.from_csv(path)
    assert np.array_equal(back.eigenvalues, m.eigenvalues)
    assert path.read_text().splitlines()[0] == "k,lambda"
