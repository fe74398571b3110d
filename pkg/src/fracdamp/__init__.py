"""fracdamp: spectral simulation and verification for the abstract damped
wave equation u'' + 2*delta*A^sigma*u' + A*u = f on truncated spectra."""

from .charpoly import CharRoots, DampingParams, Regime, asymptotic_ratios, classify, roots
from .duhamel import (
    KernelParams,
    ModeTrajectory,
    constant_forcing_mode,
    duhamel_quadrature,
    forced_mode_at,
    forced_solve,
    line_bounded_mode,
    resonant_mode_response,
)
from .forcing import (
    CompositeMode,
    ConstantForcing,
    ForcingSpec,
    PiecewiseSamples,
    WindowedSinusoid,
    ZeroForcing,
)
from .propagator import (
    GapScanConfig,
    ModeIC,
    Trajectory,
    gap_scan,
    homogeneous_mode,
    homogeneous_solve,
)
from .spectrum import (
    SobolevIndex,
    SpectralVector,
    SpectrumModel,
    geometric_spectrum,
    partition_interleave,
    sobolev_norm,
)

__version__ = "0.1.0"
