"""Named built-in experiment configs, one per acceptance criterion."""

from __future__ import annotations

from . import acceptance as accmod
from .config import ExperimentConfig

ACCEPTANCE_BY_NAME = {
    "AC1-root-correctness": accmod.ac1_root_correctness,
    "AC2-asymptotics": accmod.ac2_asymptotics,
    "AC3-oracle-equivalence": accmod.ac3_oracle_equivalence,
    "AC4-gap-region": accmod.ac4_gap_region,
    "AC5-derivative-gap": accmod.ac5_derivative_gap,
    "AC6-boundedness-diagram": accmod.ac6_boundedness_diagram,
    "AC7-blowup-constants": accmod.ac7_blowup_constants,
    "AC8-resonance-limit": accmod.ac8_resonance_limit,
    "AC9-counterexample-certificates": accmod.ac9_counterexample_certificates,
    "AC10-energy-and-l2": accmod.ac10_energy_and_l2,
    "AC11-periodic-bounded": accmod.ac11_periodic_bounded,
}


def recipes() -> dict[str, ExperimentConfig]:
    """One validated config per acceptance criterion."""
    out = {}
    for name in ACCEPTANCE_BY_NAME:
        out[name] = ExperimentConfig(kind="acceptance", recipe=name, out_dir="out").validate()
    return out
