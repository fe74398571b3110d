"""Acceptance gate: every criterion at its pinned tolerance.

Each test prints one pass/fail line (visible with `pytest -s` or in the
captured output of a failing run) and asserts the criterion held inside its
stated runtime budget.
"""

from fracdamp import acceptance as acc


def _check(result, budget=None):
    print(result.line())
    assert result.passed, result.detail + "\n" + "\n".join(map(str, result.rows[:40]))
    if budget is not None:
        assert result.elapsed < budget, f"runtime {result.elapsed:.1f}s exceeds {budget}s"


def test_ac1_root_correctness():
    # residual <= 1e-9 (backward-error scaling), Vieta to 1e-12; < 1 s
    _check(acc.ac1_root_correctness(), budget=1.0)


def test_ac2_asymptotics():
    # x1/lam^sigma within 1e-3 of 2 delta; b/sqrt(lam) within 1e-4 of 1
    _check(acc.ac2_asymptotics())


def test_ac3_oracle_equivalence():
    # 45 combos x 2 ICs, max abs err <= 1e-8 on [0, 10]; < 30 s
    result = acc.ac3_oracle_equivalence()
    assert len(acc.AC3_COMBOS) == 45
    _check(result, budget=30.0)


def test_ac4_gap_region():
    # bounded gaps: max/min <= 5 over lam = 2^0..2^40; divergent: > 10x lam=1
    _check(acc.ac4_gap_region())


def test_ac5_derivative_gap():
    _check(acc.ac5_derivative_gap())


def test_ac6_boundedness_diagram():
    # sigma=2: Bounded at 0.9, PowerLaw 0.5 +/- 0.05 at 1.5, Logarithmic at 1,
    # u' Bounded at 1.9; sigma=1: Bounded at 1; < 2 min
    _check(acc.ac6_boundedness_diagram(), budget=120.0)


def test_ac7_blowup_constants():
    # lam = 1e8 pulse values: 2% at sigma in {0.75, 0.25}, 1e-10 at 1/2
    _check(acc.ac7_blowup_constants())


def test_ac8_resonance_limit():
    _check(acc.ac8_resonance_limit())


def test_ac9_counterexample_certificates():
    _check(acc.ac9_counterexample_certificates())


def test_ac10_energy_and_l2():
    # margins >= -1e-9 * source over 100 random forcings per sigma;
    # L2 integrals stable to 1% under K doubling
    _check(acc.ac10_energy_and_l2())


def test_ac11_periodic_bounded():
    # periodicity to 1e-12, lam|u| bounded along the grid, rates within 5%
    _check(acc.ac11_periodic_bounded())
