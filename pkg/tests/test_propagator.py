import math

import numpy as np
import pytest

from fracdamp.charpoly import DampingParams, roots
from fracdamp.errors import PreconditionError, ValidationError
from fracdamp.propagator import (
    GapScanConfig,
    ModeIC,
    coefficient_bound_scan,
    derivative_gap_probe,
    forward_smoothing_probe,
    gap_scan,
    homogeneous_mode,
    homogeneous_solve,
    mode_derivative,
)
from fracdamp.spectrum import SpectralVector, geometric_spectrum


def test_initial_condition_reproduced():
    ic = ModeIC(1.0, 0.0)
    for sig, dl, lam in ((0.0, 0.5, 1.0), (0.5, 1.0, 9.0), (1.0, 1.0, 4.0)):
        u, up = homogeneous_mode(roots(DampingParams(sig, dl), lam), ic, 0.0)
        assert (u, up) == (1.0, 0.0)


def test_double_root_unit_velocity():
    r = roots(DampingParams(0.5, 1.0), 1.0)
    u, _ = homogeneous_mode(r, ModeIC(0.0, 1.0), 1.0)
    assert u == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_real_pair_decays():
    r = roots(DampingParams(1.0, 1.0), 4.0)
    vals = [abs(homogeneous_mode(r, ModeIC(1.0, 0.0), t)[0]) for t in np.linspace(1.0, 12.0, 12)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-2


def test_negative_time_rejected():
    r = roots(DampingParams(1.0, 1.0), 4.0)
    with pytest.raises(ValidationError):
        homogeneous_mode(r, ModeIC(1.0, 0.0), -0.1)


def test_zero_data_zero_trajectory():
    m = geometric_spectrum(4, 2.0)
    traj = homogeneous_solve(
        m, DampingParams(1.0, 1.0), SpectralVector(np.zeros(4)), SpectralVector(np.zeros(4)),
        np.linspace(0, 2, 9),
    )
    assert not traj.u.any() and not traj.uprime.any()


def test_single_mode_energy_decay():
    # damped oscillator: |u'|^2 + lam u^2 never increases
    p = DampingParams(0.0, 0.5)
    r = roots(p, 1.0)
    ts = np.linspace(0.0, 10.0, 101)
    e = []
    for t in ts:
        u, up = homogeneous_mode(r, ModeIC(1.0, 0.3), float(t))
        e.append(up * up + 1.0 * u * u)
    assert all(b <= a + 1e-12 for a, b in zip(e, e[1:]))


def test_threaded_solve_matches_serial():
    m = geometric_spectrum(8, 2.0)
    p = DampingParams(0.75, 1.0)
    U0 = SpectralVector(np.linspace(1.0, 0.1, 8))
    U1 = SpectralVector(np.linspace(-0.5, 0.5, 8))
    tg = np.linspace(0.0, 3.0, 11)
    a = homogeneous_solve(m, p, U0, U1, tg, threads=1)
    b = homogeneous_solve(m, p, U0, U1, tg, threads=4)
    assert np.array_equal(a.u, b.u) and np.array_equal(a.uprime, b.uprime)


def test_semigroup_property():
    rng = np.random.default_rng(11)
    for _ in range(50):
        sig = rng.uniform(0.0, 2.5)
        dl = rng.uniform(0.3, 3.0)
        lam = 10.0 ** rng.uniform(-1, 4)
        r = roots(DampingParams(sig, dl), lam)
        ic = ModeIC(rng.uniform(-1, 1), rng.uniform(-1, 1))
        s, t = rng.uniform(0.01, 2.0, 2)
        u_mid, up_mid = homogeneous_mode(r, ic, s)
        u_two, up_two = homogeneous_mode(r, ModeIC(u_mid, up_mid), t)
        u_one, up_one = homogeneous_mode(r, ic, s + t)
        scale = max(1.0, abs(u_one), abs(up_one))
        assert abs(u_two - u_one) <= 1e-10 * scale
        assert abs(up_two - up_one) <= 1e-10 * scale


def test_continuity_across_criticality():
    lam, t = 9.0, 1.0
    ref_u, ref_up = homogeneous_mode(roots(DampingParams(0.5, 1.0), lam), ModeIC(1.0, 0.5), t)
    for dl in (1.0 - 1e-7, 1.0 + 1e-7):
        u, up = homogeneous_mode(roots(DampingParams(0.5, dl), lam), ModeIC(1.0, 0.5), t)
        assert abs(u - ref_u) <= 1e-5 and abs(up - ref_up) <= 1e-5


def test_derivatives_match_finite_differences():
    r = roots(DampingParams(0.75, 1.2), 40.0)
    ic = ModeIC(0.4, -0.7)
    h = 1e-5
    for order in (1, 2, 3):
        t = 0.8
        stencil = [mode_derivative(r, ic, order - 1, t + k * h) for k in (-2, -1, 0, 1, 2)]
        fd = (-stencil[4] + 8 * stencil[3] - 8 * stencil[1] + stencil[0]) / (12 * h)
        assert mode_derivative(r, ic, order, t) == pytest.approx(fd, rel=1e-7, abs=1e-7)


def test_smoothing_for_fractional_exponents():
    # 0 < sigma < 1: at t = 1 the weighted sup lam^alpha |u(1)| stays bounded
    m = geometric_spectrum(41, 2.0)
    for sig in (0.25, 0.5, 0.75):
        p = DampingParams(sig, 1.0)
        for alpha in (1.0, 2.0, 3.0):
            vals = []
            for lam in m.eigenvalues:
                r = roots(p, float(lam))
                u, _ = homogeneous_mode(r, ModeIC(1.0, 0.0), 1.0)
                vals.append(lam**alpha * abs(u))
            tail = vals[-10:]
            assert all(b <= a * (1 + 1e-9) + 1e-300 for a, b in zip(tail, tail[1:]))


def test_gap_scan_bounded_and_divergent():
    m = geometric_spectrum(31, 2.0)
    tg = np.concatenate([[0.0], np.logspace(-6, 1, 15)])
    p = DampingParams(2.0, 1.0)
    bounded = gap_scan(m, p, GapScanConfig(0.0, 1.0, tg, m.eigenvalues))
    assert bounded.max_over_min() <= 5.0
    divergent = gap_scan(m, p, GapScanConfig(0.0, 1.5, tg, m.eigenvalues))
    assert divergent.max_over_first() > 10.0
    p0 = DampingParams(0.25, 1.0)
    only_half = gap_scan(m, p0, GapScanConfig(0.5, 0.0, tg, m.eigenvalues))
    assert only_half.max_over_min() <= 5.0


def test_gap_scan_validates_grid_membership():
    m = geometric_spectrum(8, 2.0)
    cfg = GapScanConfig(0.5, 0.0, np.array([0.0, 1.0]), np.array([3.0]))
    with pytest.raises(ValidationError):
        gap_scan(m, DampingParams(1.0, 1.0), cfg)


def test_derivative_gap_probe_value_at_zero():
    # u''(0) for unit-velocity data is -2 delta lam^sigma; weighted sup = 2 delta
    m = geometric_spectrum(41, 2.0)
    p = DampingParams(2.0, 1.0)
    res = derivative_gap_probe(m, p, 2.0, 2, 0.0)
    assert res.sup == pytest.approx(2.0 * p.delta, rel=1e-12)


def test_derivative_gap_precondition():
    m = geometric_spectrum(8, 2.0)
    p = DampingParams(2.0, 1.0)
    with pytest.raises(PreconditionError):
        derivative_gap_probe(m, p, 1.0, 2, 0.0)  # alpha1 < (m-1)*gamma = 2


def test_derivative_gap_first_order_consistency():
    m = geometric_spectrum(31, 2.0)
    p = DampingParams(2.0, 1.0)
    res = derivative_gap_probe(m, p, 1.0, 1, 0.5)
    assert np.all(res.weighted <= 1.0 + 1e-12)  # |g'| <= 1 after the transient


def test_forward_smoothing_probe():
    m = geometric_spectrum(41, 2.0)
    p = DampingParams(2.0, 1.0)
    for md in (1, 2):
        res = forward_smoothing_probe(m, p, md, 0.5)
        assert res.tail_decreasing() or res.weighted[-1] <= res.sup
        half = res.weighted[: res.weighted.size // 2]
        assert np.max(res.weighted) <= 1.2 * max(np.max(half), 1e-300)
    with pytest.raises(PreconditionError):
        forward_smoothing_probe(m, DampingParams(0.5, 1.0), 1, 0.5)
    with pytest.raises(ValidationError):
        forward_smoothing_probe(m, p, 1, 0.0)


def test_coefficient_weights_stay_bounded():
    lams = np.logspace(1, 10, 40)
    for sig in (0.75, 1.0, 2.0):
        rows = coefficient_bound_scan(DampingParams(sig, 1.0), lams)
        for name, vals in rows.items():
            vals = vals[~np.isnan(vals)]
            assert vals.size > 20, name
            half = vals[: vals.size // 2]
            assert np.max(vals) <= 1.5 * np.max(half), name


def test_solutions_satisfy_the_mode_equation():
    # u'' = -2 delta lam^sigma u' - lam u ties every closed form back to the
    # defining equation, regime by regime, without any reference solver
    rng = np.random.default_rng(7)
    for _ in range(60):
        sig = rng.uniform(0.0, 2.5)
        dl = rng.uniform(0.3, 3.0)
        lam = 10.0 ** rng.uniform(-1, 5)
        r = roots(DampingParams(sig, dl), lam)
        ic = ModeIC(rng.uniform(-1, 1), rng.uniform(-1, 1))
        t = rng.uniform(0.0, 3.0)
        u = mode_derivative(r, ic, 0, t)
        up = mode_derivative(r, ic, 1, t)
        upp = mode_derivative(r, ic, 2, t)
        resid = upp + 2.0 * dl * lam**sig * up + lam * u
        scale = abs(upp) + 2.0 * dl * lam**sig * abs(up) + lam * abs(u)
        assert abs(resid) <= 1e-11 * max(1.0, scale)
