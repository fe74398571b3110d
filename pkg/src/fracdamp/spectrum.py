"""Finite diagonal model of the operator pair (H, A).

A strictly increasing list of positive eigenvalues lam_0 < ... < lam_{K-1}
stands in for the multiplier of a self-adjoint nonnegative operator; vectors
are coefficient lists against the eigenbasis, and fractional-power norms
|A^alpha v| = sqrt(sum lam_k^(2 alpha) v_k^2) carry all the Sobolev-scale
bookkeeping.  Membership/divergence statements about the full operator become
partial-sum growth diagnostics on this truncation (see the probe module).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

#: Above this the direct term lam^(2*alpha) * v^2 may overflow for alpha
#: up to 2.5; the norm accumulator switches to log-domain evaluation.
_DIRECT_EIGENVALUE_CAP = 1e15

_LOG_HUGE = 690.0  # exp(_LOG_HUGE) is still finite in IEEE double


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SobolevIndex:
    """Exponent alpha of the domain D(A^alpha).

    Negative values only make sense while scanning phase-space gaps and must
    be opted into explicitly.
    """

    alpha: float
    allow_negative: bool = False

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValidationError("alpha must be finite")
        if self.alpha < 0.0 and not self.allow_negative:
            raise ValidationError(
                f"negative alpha {self.alpha} requires allow_negative=True (gap-scan contexts only)"
            )


def as_alpha(s) -> float:
    return s.alpha if isinstance(s, SobolevIndex) else float(s)


@dataclass(frozen=True)
class SpectrumModel:
    """Ordered positive eigenvalues plus the coercivity floor nu <= lam_0."""

    eigenvalues: np.ndarray
    coercivity_floor: float = 0.0

    def __post_init__(self):
        eig = _readonly(np.atleast_1d(self.eigenvalues))
        object.__setattr__(self, "eigenvalues", eig)
        if eig.size < 1:
            raise ValidationError("spectrum needs at least one mode")
        if not np.all(np.isfinite(eig)):
            raise ValidationError("eigenvalues must be finite")
        if eig[0] <= 0.0:
            raise ValidationError("eigenvalues must be positive")
        if np.any(np.diff(eig) <= 0.0):
            raise ValidationError("eigenvalues must be strictly increasing")
        floor = self.coercivity_floor if self.coercivity_floor > 0.0 else float(eig[0])
        if floor > eig[0]:
            raise ValidationError(
                f"coercivity floor {floor} exceeds the smallest eigenvalue {eig[0]}"
            )
        object.__setattr__(self, "coercivity_floor", float(floor))

    @property
    def K(self) -> int:
        return int(self.eigenvalues.size)

    def vector(self, coefficients) -> "SpectralVector":
        v = SpectralVector(coefficients)
        if v.coefficients.size != self.K:
            raise ValidationError(
                f"vector length {v.coefficients.size} does not match spectrum size {self.K}"
            )
        return v

    def basis_vector(self, k: int) -> "SpectralVector":
        c = np.zeros(self.K)
        c[k] = 1.0
        return SpectralVector(c)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("k,lambda\n")
            for k, lam in enumerate(self.eigenvalues):
                fh.write(f"{k},{float(lam)!r}\n")

    @classmethod
    def from_csv(cls, path) -> "SpectrumModel":
        lams = []
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().strip()
            if header != "k,lambda":
                raise ValidationError(f"spectrum CSV header must be 'k,lambda', got {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                _, lam = line.split(",")
                lams.append(float(lam))
        return cls(np.asarray(lams))


@dataclass(frozen=True)
class SpectralVector:
    """Coefficients of a vector against the eigenbasis of one spectrum."""

    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _readonly(np.atleast_1d(self.coefficients)))

    def __len__(self):
        return int(self.coefficients.size)


def geometric_spectrum(K: int, base: float, scale: float = 1.0, coercivity_floor: float = 0.0) -> SpectrumModel:
    """lam_k = scale * base^k for k = 0..K-1."""
    if K < 1:
        raise ValidationError(f"K must be >= 1, got {K}")
    if not base > 1.0:
        raise ValidationError(f"base must be > 1, got {base}")
    if not scale > 0.0:
        raise ValidationError(f"scale must be > 0, got {scale}")
    eig = scale * np.power(base, np.arange(K, dtype=float))
    if not np.all(np.isfinite(eig)):
        raise ValidationError("geometric spectrum overflows double precision; reduce K or base")
    return SpectrumModel(eig, coercivity_floor)


def _kahan_sum(values) -> float:
    total = 0.0
    comp = 0.0
    for v in values:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def weighted_square_sum(lams: np.ndarray, coeffs: np.ndarray, alpha: float) -> float:
    """sum_k lam_k^(2 alpha) c_k^2 in ascending k with compensated accumulation.

    Falls back to log-domain evaluation whenever a term would overflow or the
    eigenvalues exceed the direct cap, so lam^(2 alpha) c^2 never overflows
    silently while the sum itself is representable.
    """
    lams = np.asarray(lams, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    if alpha == 0.0:
        return _kahan_sum(c * c for c in coeffs)
    with np.errstate(divide="ignore"):
        loglam = np.log(lams)
    nz = coeffs != 0.0
    if not np.any(nz):
        return 0.0
    logterms = np.full(lams.shape, -np.inf)
    logterms[nz] = 2.0 * alpha * loglam[nz] + 2.0 * np.log(np.abs(coeffs[nz]))
    top = float(np.max(logterms))
    direct_ok = top < _LOG_HUGE and float(np.max(lams)) <= _DIRECT_EIGENVALUE_CAP
    if direct_ok:
        return _kahan_sum(lam ** (2.0 * alpha) * c * c for lam, c in zip(lams, coeffs))
    if top == -np.inf:
        return 0.0
    # log-sum-exp; the result may legitimately be inf if the true sum is.
    s = _kahan_sum(math.exp(lt - top) for lt in logterms)
    if top > _LOG_HUGE:
        return math.inf if top + math.log(s) > 709.0 else math.exp(top) * s
    return math.exp(top) * s


def sobolev_norm(v: SpectralVector, s, m: SpectrumModel) -> float:
    """|A^alpha v| = sqrt(sum lam_k^(2 alpha) v_k^2)."""
    alpha = as_alpha(s)
    if v.coefficients.size != m.K:
        raise ValidationError(
            f"vector length {v.coefficients.size} does not match spectrum size {m.K}"
        )
    return math.sqrt(weighted_square_sum(m.eigenvalues, v.coefficients, alpha))


def partition_interleave(m: SpectrumModel, n_parts: int) -> list[np.ndarray]:
    """Disjoint index sets covering 0..K-1; part p holds indices = p (mod n_parts).

    On a geometric spectrum each part is again geometric (base raised to the
    n_parts power), which is what the disjoint counterexample assemblies need.
    """
    if n_parts < 1:
        raise ValidationError(f"n_parts must be >= 1, got {n_parts}")
    idx = np.arange(m.K)
    return [idx[idx % n_parts == p] for p in range(n_parts)]
