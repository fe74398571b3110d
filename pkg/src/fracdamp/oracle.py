"""Independent verification backends for the per-mode ODE.

Two deliberately different algebraic paths from the closed-form propagator:

* an adaptive Runge-Kutta pair (4/5 or 7/8 embedded, via scipy's RK45 and
  DOP853) for non-stiff modes, and
* an exponential integrator for stiff distinct-real modes: the forcing is
  replaced on each step by its Chebyshev-node polynomial interpolant and the
  augmented linear system (state + monomial basis) is advanced by a single
  matrix exponential, evaluated by Pade scaling-and-squaring.  That is
  unconditionally stable and shares no root-factorisation code with the
  propagator.

The oracle refuses stiffness ratios x1/x2 above 1e8 rather than silently
losing accuracy; past that point the exact propagator is the only reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .charpoly import DampingParams, Regime, roots
from .duhamel import ModeTrajectory
from .errors import OracleFailure, OracleRefusal, ResolutionError, ValidationError
from .forcing import ZeroForcing
from .propagator import ModeIC

STIFFNESS_LIMIT = 1e8
_STIFF_SWITCH = 50.0  # use the exponential path above this root ratio


@dataclass(frozen=True)
class OracleConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 500_000
    method: str = "dop853"  # "rk45" (4/5 embedded) or "dop853" (7/8 embedded)

    def __post_init__(self):
        if self.rel_tol < 1e-13 or self.abs_tol < 1e-14:
            raise ValidationError("tolerances below 1e-13 are not honest in double precision")
        if self.method not in ("rk45", "dop853"):
            raise ValidationError(f"unknown method {self.method!r}")


def integrate_mode(
    p: DampingParams,
    lam: float,
    mode_forcing,
    ic: ModeIC,
    t_grid,
    cfg: OracleConfig = OracleConfig(),
) -> ModeTrajectory:
    """Reference trajectory of one mode, independent of the closed forms."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0 or np.any(np.diff(t_grid) <= 0.0):
        raise ValidationError("t_grid must be nonempty and strictly increasing")
    if mode_forcing is None:
        mode_forcing = ZeroForcing()
    r = roots(p, lam)
    if r.regime is Regime.REAL_PAIR:
        ratio = r.x1 / r.x2
        if ratio > STIFFNESS_LIMIT:
            raise OracleRefusal(
                f"stiffness ratio {ratio:.3e} exceeds {STIFFNESS_LIMIT:.0e}; "
                "the exact propagator is the only reference here"
            )
        if ratio > _STIFF_SWITCH:
            return _integrate_exponential(p, lam, mode_forcing, ic, t_grid, cfg)
    return _integrate_rk(p, lam, mode_forcing, ic, t_grid, cfg)


def _integrate_rk(p, lam, mode_forcing, ic, t_grid, cfg) -> ModeTrajectory:
    dls2 = 2.0 * p.delta * lam**p.sigma

    def rhs(t, y):
        f = float(mode_forcing(t))
        return (y[1], f - dls2 * y[1] - lam * y[0])

    t0 = 0.0
    span = (t0, float(t_grid[-1]))
    t_eval = t_grid if t_grid[0] > t0 else t_grid
    method = "DOP853" if cfg.method == "dop853" else "RK45"
    sol = solve_ivp(
        rhs,
        span,
        [ic.u0, ic.u1],
        method=method,
        t_eval=t_eval,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        dense_output=False,
    )
    if not sol.success:
        raise OracleFailure(f"solve_ivp failed: {sol.message}")
    if sol.nfev > 20 * cfg.max_steps:
        raise OracleFailure(f"step budget exceeded: {sol.nfev} rhs evaluations")
    err = cfg.rel_tol * float(np.max(np.abs(sol.y))) + cfg.abs_tol
    return ModeTrajectory(t_grid, sol.y[0], sol.y[1], error_estimate=err)


_POLY_DEG = 6
# Chebyshev nodes on [0, 1] for the forcing interpolant
_NODES = 0.5 * (1.0 - np.cos(np.pi * np.arange(_POLY_DEG + 1) / _POLY_DEG))


def _expm_step(B: np.ndarray, h: float, y: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """Advance y' = B y + e2 * sum coef_k (s/h)^k over one step of size h.

    The polynomial forcing is absorbed into an augmented linear system whose
    extra block propagates the scaled monomials theta^k, theta = s/h; one
    expm call then yields the exact solution of the polynomial-forced step.
    """
    d = coef.size
    n = 2 + d
    A = np.zeros((n, n))
    A[:2, :2] = B
    A[1, 2:] = coef
    # theta^k evolves by d/ds theta^k = (k/h) theta^(k-1)
    for k in range(1, d):
        A[2 + k, 2 + k - 1] = k / h
    y_aug = np.zeros(n)
    y_aug[:2] = y
    y_aug[2] = 1.0  # theta^0
    out = expm(A * h) @ y_aug
    return out[:2]


def _integrate_exponential(p, lam, mode_forcing, ic, t_grid, cfg) -> ModeTrajectory:
    dls2 = 2.0 * p.delta * lam**p.sigma
    B = np.array([[0.0, 1.0], [-lam, -dls2]])
    breaks = sorted(b for b in mode_forcing.breakpoints() if 0.0 < b < float(t_grid[-1]))

    def step_value(t0: float, h: float, y: np.ndarray) -> np.ndarray:
        ts = t0 + h * _NODES
        vals = np.asarray(mode_forcing(ts), dtype=float)
        coef = np.polynomial.polynomial.polyfit(_NODES, vals, _POLY_DEG)
        return _expm_step(B, h, y, coef)

    def advance(y: np.ndarray, t0: float, t1: float, budget: list[int]) -> np.ndarray:
        """One adaptive span with step-doubling error control."""
        tol = cfg.abs_tol + cfg.rel_tol * float(np.max(np.abs(y)) + 1.0)
        stack = [(t0, t1)]
        while stack:
            a, b = stack.pop()
            h = b - a
            if h <= 0.0:
                continue
            budget[0] += 1
            if budget[0] > cfg.max_steps:
                raise OracleFailure(f"exponential integrator exceeded {cfg.max_steps} steps")
            coarse = step_value(a, h, y)
            mid = step_value(a, 0.5 * h, y)
            fine = step_value(a + 0.5 * h, 0.5 * h, mid)
            err = float(np.max(np.abs(fine - coarse)))
            if err < tol * max(1.0, h) or h < 1e-13 * max(1.0, abs(b)):
                y = fine
            else:
                stack.append((a + 0.5 * h, b))
                stack.append((a, a + 0.5 * h))
        return y

    # integrate across grid points, splitting at forcing breakpoints
    y = np.array([ic.u0, ic.u1])
    u = np.empty(t_grid.size)
    up = np.empty(t_grid.size)
    budget = [0]
    prev = 0.0
    for i, t in enumerate(t_grid):
        cuts = [b for b in breaks if prev < b < float(t)]
        a = prev
        for c in cuts + [float(t)]:
            y = advance(y, a, c, budget)
            a = c
        u[i], up[i] = y
        prev = float(t)
    err = cfg.rel_tol * float(np.max(np.abs(u)) + np.max(np.abs(up))) + cfg.abs_tol
    return ModeTrajectory(t_grid, u, up, error_estimate=err)


def convolve_bruteforce(r, f_times, f_values, t: float) -> tuple[float, float]:
    """Fine-grid trapezoid evaluation of int_0^t g(t-s) f(s) ds with Richardson.

    Requires at least 1e4 samples per unit time and refuses oscillatory
    kernels that the grid cannot resolve (b * dt > 0.1).  Returns the
    Richardson-extrapolated value together with an error estimate.
    """
    f_times = np.asarray(f_times, dtype=float)
    f_values = np.asarray(f_values, dtype=float)
    if f_times.size != f_values.size or f_times.size < 3:
        raise ValidationError("need matching sample arrays with >= 3 points")
    if f_times[0] > 0.0 or f_times[-1] < t:
        raise ValidationError("samples must cover [0, t]")
    dt = float(np.max(np.diff(f_times)))
    if t > 0 and dt > 1.000001e-4 * max(t, 1e-12):
        raise ValidationError(
            f"sample spacing {dt:.3e} too coarse: need >= 1e4 points per unit time"
        )
    if r.regime is Regime.OSCILLATORY_PAIR and r.x2 * dt > 0.1:
        raise ResolutionError(
            f"oscillatory kernel under-sampled: b*dt = {r.x2 * dt:.3f} > 0.1"
        )

    def kernel(tau):
        if r.regime is Regime.REAL_PAIR:
            return (np.exp(-r.x2 * tau) - np.exp(-r.x1 * tau)) / (r.x1 - r.x2)
        if r.regime is Regime.DOUBLE_ROOT:
            return tau * np.exp(-r.x1 * tau)
        return np.exp(-r.x1 * tau) * np.sin(r.x2 * tau) / r.x2

    mask = f_times <= t
    ts = f_times[mask]
    vals = f_values[mask]
    if ts.size < 5 or ts[-1] < t:
        ts = np.append(ts, t)
        vals = np.append(vals, np.interp(t, f_times, f_values))
    integrand = kernel(t - ts) * vals
    full = np.trapezoid(integrand, ts)
    half = np.trapezoid(integrand[::2], ts[::2])
    richardson = (4.0 * full - half) / 3.0
    return float(richardson), abs(full - half) / 3.0


def cross_check(
    p: DampingParams,
    lam: float,
    ic: ModeIC,
    t_grid,
    cfg: OracleConfig = OracleConfig(),
) -> float:
    """Max abs deviation between the closed-form propagator and the oracle."""
    from .propagator import homogeneous_mode

    r = roots(p, lam)
    ref = integrate_mode(p, lam, ZeroForcing(), ic, t_grid, cfg)
    worst = 0.0
    for i, t in enumerate(np.asarray(t_grid, dtype=float)):
        u, up = homogeneous_mode(r, ic, float(t))
        worst = max(worst, abs(u - ref.u[i]), abs(up - ref.uprime[i]))
    return worst
