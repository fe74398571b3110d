import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdamp._expconv import _moments_recurrence, _moments_series, exp_poly_moments


@given(st.floats(6.0, 9.0), st.floats(0.5, np.pi))
@settings(max_examples=150)
def test_moment_methods_agree_at_the_seam(mag, ang):
    # near the handoff radius both evaluators are in their stable regions
    # (series converges fast, recurrence error shrinks as k/|w| stays < 1)
    w = mag * complex(np.cos(ang), np.sin(ang))
    if w.real > 0.0:
        w = complex(-w.real, w.imag)
    a = _moments_series(w, 4)
    b = _moments_recurrence(w, 4)
    for k in range(5):
        assert abs(a[k] - b[k]) <= 1e-13 * max(1.0, abs(a[k]))


@pytest.mark.parametrize("w", [0.0001, -0.5, -7.9, -120.0, complex(-3, 40), complex(0, 200)])
def test_moments_match_quadrature(w):
    from scipy.integrate import quad

    mom = exp_poly_moments(complex(w), 3)
    for k in (0, 3):
        re = quad(lambda th: th**k * np.exp(complex(w).real * th) * np.cos(complex(w).imag * th),
                  0, 1, limit=400)[0]
        im = quad(lambda th: th**k * np.exp(complex(w).real * th) * np.sin(complex(w).imag * th),
                  0, 1, limit=400)[0]
        assert abs(mom[k] - complex(re, im)) <= 5e-12


def test_first_moments_closed_forms():
    w = -2.5
    m = exp_poly_moments(complex(w), 1)
    assert m[0].real == pytest.approx((cmath.exp(w).real - 1.0) / w, rel=1e-14)
    assert m[1].real == pytest.approx(
        ((w - 1.0) * cmath.exp(w).real + 1.0) / (w * w), rel=1e-13
    )
