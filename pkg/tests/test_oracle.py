import math

import numpy as np
import pytest

from fracdamp.charpoly import DampingParams, roots
from fracdamp.duhamel import constant_forcing_mode, forced_mode_at
from fracdamp.errors import OracleRefusal, ResolutionError, ValidationError
from fracdamp.forcing import ConstantForcing, WindowedSinusoid, ZeroForcing
from fracdamp.oracle import OracleConfig, convolve_bruteforce, cross_check, integrate_mode
from fracdamp.propagator import ModeIC


def test_homogeneous_damped_cosine():
    p = DampingParams(0.0, 0.5)
    tg = np.linspace(0.1, 5.0, 20)
    traj = integrate_mode(p, 1.0, ZeroForcing(), ModeIC(1.0, 0.0), tg, OracleConfig(rel_tol=1e-11, abs_tol=1e-13))
    a, b = 0.5, math.sqrt(3.0) / 2.0
    for i, t in enumerate(tg):
        ref = math.exp(-a * t) * (math.cos(b * t) + a / b * math.sin(b * t))
        assert abs(traj.u[i] - ref) <= 1e-10


def test_forced_matches_closed_form():
    p = DampingParams(1.0, 1.0)
    tg = np.linspace(0.2, 4.0, 12)
    traj = integrate_mode(p, 4.0, ConstantForcing(1.0), ModeIC(0.0, 0.0), tg)
    for i, t in enumerate(tg):
        u, up = constant_forcing_mode(p, 4.0, float(t))
        assert abs(traj.u[i] - u) <= 1e-9
        assert abs(traj.uprime[i] - up) <= 1e-9


def test_stiff_path_matches_closed_form():
    p = DampingParams(2.0, 1.0)
    lam = 150.0  # ratio ~ 4 delta^2 lam^3 well past the RK switch
    tg = np.linspace(0.5, 10.0, 8)
    traj = integrate_mode(p, lam, ConstantForcing(1.0), ModeIC(0.0, 0.0), tg)
    for i, t in enumerate(tg):
        u, up = constant_forcing_mode(p, lam, float(t))
        assert abs(traj.u[i] - u) <= 1e-11
        assert abs(traj.uprime[i] - up) <= 1e-11


def test_windowed_forcing_through_breakpoints():
    p = DampingParams(2.0, 1.0)
    lam = 150.0
    f = WindowedSinusoid(1.0, 2.0, 0.1, 0.5, 2.5, ramp=0.25)
    tg = np.linspace(0.25, 4.0, 14)
    traj = integrate_mode(p, lam, f, ModeIC(0.0, 0.0), tg)
    r = roots(p, lam)
    for i, t in enumerate(tg):
        u, _ = forced_mode_at(r, f, float(t))
        assert abs(traj.u[i] - u) <= 1e-10


def test_stiffness_refusal():
    p = DampingParams(2.0, 1.0)
    with pytest.raises(OracleRefusal):
        integrate_mode(p, 1e6, ZeroForcing(), ModeIC(1.0, 0.0), np.array([1.0]))


def test_tolerance_validation():
    with pytest.raises(ValidationError):
        OracleConfig(rel_tol=1e-14)
    with pytest.raises(ValidationError):
        OracleConfig(method="euler")


def test_self_consistency_under_tolerance_halving():
    p = DampingParams(0.25, 1.0)
    tg = np.linspace(0.5, 6.0, 9)
    loose = integrate_mode(p, 50.0, ZeroForcing(), ModeIC(0.3, -0.4), tg, OracleConfig(rel_tol=1e-8, abs_tol=1e-10))
    tight = integrate_mode(p, 50.0, ZeroForcing(), ModeIC(0.3, -0.4), tg, OracleConfig(rel_tol=4e-9, abs_tol=5e-11))
    diff = float(np.max(np.abs(loose.u - tight.u)))
    assert diff <= loose.error_estimate + tight.error_estimate


def test_cross_check_small_grid():
    worst = 0.0
    tg = np.linspace(0.25, 10.0, 20)
    for sig, dl, lam in ((0.25, 1.0, 9.0), (0.5, 2.0, 100.0), (1.5, 0.5, 20.0)):
        for ic in (ModeIC(1.0, 0.0), ModeIC(0.0, 1.0)):
            worst = max(worst, cross_check(DampingParams(sig, dl), lam, ic, tg))
    assert worst <= 1e-8


class TestBruteforceConvolution:
    def test_zero(self):
        r = roots(DampingParams(1.0, 1.0), 4.0)
        ts = np.linspace(0.0, 1.0, 20001)
        v, _ = convolve_bruteforce(r, ts, np.zeros_like(ts), 1.0)
        assert v == 0.0

    def test_constant(self):
        r = roots(DampingParams(1.0, 1.0), 4.0)
        ts = np.linspace(0.0, 2.0, 40001)
        v, est = convolve_bruteforce(r, ts, np.ones_like(ts), 2.0)
        u, _ = constant_forcing_mode(DampingParams(1.0, 1.0), 4.0, 2.0)
        assert abs(v - u) <= 1e-7

    def test_windowed_sinusoid_cross_check(self):
        r = roots(DampingParams(0.25, 1.0), 50.0)
        f = WindowedSinusoid(0.8, 5.0, 0.3, 0.1, 1.7)
        ts = np.linspace(0.0, 2.0, 40001)
        v, _ = convolve_bruteforce(r, ts, np.asarray(f(ts)), 2.0)
        u, _ = forced_mode_at(r, f, 2.0)
        assert abs(v - u) <= 1e-6

    def test_resolution_guard(self):
        r = roots(DampingParams(0.0, 1.0), 1e9)  # b ~ 3e4
        ts = np.linspace(0.0, 1.0, 10001)
        with pytest.raises(ResolutionError):
            convolve_bruteforce(r, ts, np.ones_like(ts), 1.0)

    def test_sampling_guard(self):
        r = roots(DampingParams(1.0, 1.0), 4.0)
        ts = np.linspace(0.0, 1.0, 100)
        with pytest.raises(ValidationError):
            convolve_bruteforce(r, ts, np.ones_like(ts), 1.0)
