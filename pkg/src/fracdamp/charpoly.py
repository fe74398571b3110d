"""Roots and regime classification of the per-mode characteristic polynomial.

Each spectral mode of u'' + 2*delta*A^sigma*u' + A*u = f obeys the scalar ODE
v'' + 2*delta*lam^sigma*v' + lam*v = g, whose characteristic polynomial

    x^2 + 2*delta*lam^sigma*x + lam

has roots -x1, -x2 with negative real parts.  The sign of the discriminant
D = delta^2*lam^(2*sigma) - lam separates three regimes:

* D < 0   oscillatory pair  -a +/- i*b,  a = delta*lam^sigma,
          b = sqrt(lam - delta^2*lam^(2*sigma))
* D = 0   double root -r, r = delta*lam^sigma (= sqrt(lam) on the critical set)
* D > 0   distinct real pair, x1 = delta*lam^sigma + sqrt(D), x2 = lam/x1

Classification is pointwise in lam: even for sigma > 1/2 the small-lam modes
can be oscillatory, so callers must not assume the large-lam regime label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import RegimeMismatchError, ValidationError

#: |D| <= DOUBLE_ROOT_TOL * max(1, lam) collapses to the double-root branch;
#: the distinct-root formulas are ill-conditioned inside this band and the
#: propagator falls back to the (1 + r*t)*exp(-r*t) limiting form.
DOUBLE_ROOT_TOL = 1e-9


class Regime(str, Enum):
    OSCILLATORY_PAIR = "oscillatory_pair"
    DOUBLE_ROOT = "double_root"
    REAL_PAIR = "real_pair"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DampingParams:
    """Friction exponent sigma >= 0 and strength delta > 0."""

    sigma: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValidationError(f"sigma must be finite and >= 0, got {self.sigma}")
        if not (math.isfinite(self.delta) and self.delta > 0.0):
            raise ValidationError(f"delta must be finite and > 0, got {self.delta}")

    @property
    def gamma(self) -> float:
        """Phase-space/derivative gap exponent max(1/2, sigma)."""
        return max(0.5, self.sigma)


@dataclass(frozen=True)
class CharRoots:
    """Regime tag plus root data for one mode.

    Storage is dual-use: for a real pair ``x1 >= x2 > 0`` are the magnitudes
    of the roots -x1, -x2; for a double root both slots hold r; for an
    oscillatory pair ``x1`` holds the decay rate a and ``x2`` the frequency b
    (the CSV emitter relies on this layout).
    """

    regime: Regime
    lam: float
    x1: float
    x2: float

    @property
    def a(self) -> float:
        if self.regime is not Regime.OSCILLATORY_PAIR:
            raise RegimeMismatchError(Regime.OSCILLATORY_PAIR, self.regime, "field a")
        return self.x1

    @property
    def b(self) -> float:
        if self.regime is not Regime.OSCILLATORY_PAIR:
            raise RegimeMismatchError(Regime.OSCILLATORY_PAIR, self.regime, "field b")
        return self.x2

    @property
    def r(self) -> float:
        if self.regime is not Regime.DOUBLE_ROOT:
            raise RegimeMismatchError(Regime.DOUBLE_ROOT, self.regime, "field r")
        return self.x1

    @property
    def slow_rate(self) -> float:
        """Decay rate of the slowest-decaying solution component."""
        if self.regime is Regime.OSCILLATORY_PAIR:
            return self.x1  # a
        return self.x2

    def vieta_errors(self, p: "DampingParams") -> tuple[float, float]:
        """Relative defects of the sum and product identities."""
        two_dls = 2.0 * p.delta * self.lam**p.sigma
        if self.regime is Regime.OSCILLATORY_PAIR:
            a, b = self.x1, self.x2
            sum_err = abs(2.0 * a - two_dls) / two_dls
            prod_err = abs(a * a + b * b - self.lam) / self.lam
            return sum_err, prod_err
        sum_err = abs(self.x1 + self.x2 - two_dls) / two_dls
        prod_err = abs(self.x1 * self.x2 - self.lam) / self.lam
        return sum_err, prod_err


def discriminant(p: DampingParams, lam: float) -> float:
    """delta^2 lam^(2 sigma) - lam, overflowing to +inf rather than raising.

    The intermediate lam^(2 sigma) can exceed double range while the roots
    themselves are representable (x1 ~ 2 delta lam^sigma); an infinite
    discriminant still classifies correctly as a real pair.
    """
    try:
        return p.delta * p.delta * lam ** (2.0 * p.sigma) - lam
    except OverflowError:
        return math.inf


def polynomial_residuals(p: DampingParams, r: CharRoots) -> tuple[float, float]:
    """Backward-error residuals |P(root)| / sum of |term| for both roots.

    Scaling by x^2 + 2*delta*lam^sigma*|x| + lam makes the check meaningful
    at every magnitude: an absolute bound cannot hold for the fast root once
    lam^(2*sigma) dwarfs lam, because a single ulp of x1^2 already exceeds
    it.  For the slow, double, and oscillatory roots the term sum is ~3*lam,
    so `residual <= tol` coincides with the absolute form
    |P| <= 3*tol*max(1, lam) there.

    For the oscillatory pair the imaginary part of P(-a + i*b) is
    2*b*(delta*lam^sigma - a) = 0 by construction, so only the real part
    a^2 - b^2 - 2*delta*lam^sigma*a + lam contributes.
    """
    dls = p.delta * r.lam**p.sigma
    if r.regime is Regime.OSCILLATORY_PAIR:
        a, b = r.x1, r.x2
        real = a * a - b * b - 2.0 * dls * a + r.lam
        imag = 2.0 * b * (dls - a)
        scale = a * a + b * b + 2.0 * dls * a + r.lam
        res = math.hypot(real, imag) / scale
        return res, res
    res = []
    for x in (r.x1, r.x2):
        # dimensionless form (x/dls)^2 - 2 (x/dls) + lam/dls^2: overflow-free
        # even when dls^2 is not representable
        u = x / dls
        q = (r.lam / dls) / dls
        num = abs(u * u - 2.0 * u + q)
        scale = u * u + 2.0 * u + q
        res.append(num / scale)
    return res[0], res[1]


def classify(p: DampingParams, lam: float) -> Regime:
    """Regime of the mode with eigenvalue lam, decided by the discriminant."""
    if not (lam > 0.0 and math.isfinite(lam)):
        raise ValidationError(f"lam must be finite and > 0, got {lam}")
    d = discriminant(p, lam)
    if abs(d) <= DOUBLE_ROOT_TOL * max(1.0, lam):
        return Regime.DOUBLE_ROOT
    return Regime.REAL_PAIR if d > 0.0 else Regime.OSCILLATORY_PAIR


def roots(p: DampingParams, lam: float) -> CharRoots:
    """Characteristic roots, computed cancellation-free.

    In the real-pair branch x1 is the numerically benign sum
    delta*lam^sigma + sqrt(D) and x2 comes from the product identity
    x2 = lam/x1; subtracting nearly equal quantities would lose every
    significant digit already at sigma = 2, lam = 1e8.
    """
    regime = classify(p, lam)
    dls = p.delta * lam**p.sigma
    if not math.isfinite(dls):
        raise ValidationError(
            f"delta*lam^sigma overflows for lam = {lam:.3e}; shrink the spectrum"
        )
    if regime is Regime.DOUBLE_ROOT:
        return CharRoots(regime, lam, dls, dls)
    if regime is Regime.REAL_PAIR:
        # factored form dls*(1 + sqrt(1 - lam/dls^2)) never squares dls
        ratio = (lam / dls) / dls
        x1 = dls * (1.0 + math.sqrt(1.0 - ratio))
        return CharRoots(regime, lam, x1, lam / x1)
    b = math.sqrt(lam - dls * dls)
    return CharRoots(regime, lam, dls, b)


def asymptotic_ratios(p: DampingParams, lam: float) -> dict[str, float]:
    """Ratios whose large-lam limits are pinned by the root asymptotics.

    Real pair: x1/lam^sigma -> 2*delta and lam^(1-sigma)/x2 -> 2*delta for
    sigma > 1/2, while for sigma = 1/2 both equal delta + sqrt(delta^2 - 1)
    exactly.  Oscillatory pair: b/sqrt(lam) -> 1 for sigma < 1/2 and
    sqrt(1 - delta^2) for sigma = 1/2.
    """
    r = roots(p, lam)
    if r.regime is Regime.REAL_PAIR:
        return {
            "x1_over_lambda_sigma": r.x1 / lam**p.sigma,
            "lambda_1ms_over_x2": lam ** (1.0 - p.sigma) / r.x2,
        }
    if r.regime is Regime.OSCILLATORY_PAIR:
        return {"b_over_sqrt_lambda": r.b / math.sqrt(lam)}
    raise RegimeMismatchError(
        f"{Regime.REAL_PAIR} or {Regime.OSCILLATORY_PAIR}",
        r.regime,
        "asymptotic ratios are defined away from the critical set",
    )
