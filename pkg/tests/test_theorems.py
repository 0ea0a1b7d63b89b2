import math

import numpy as np
import pytest

from fracorlicz.errors import CaseHypothesisFails
from fracorlicz.geometry import Domain, GridFunction, Lattice, schwarz_rearrange
from fracorlicz.quadrature import CubatureSpec
from fracorlicz.theorems import (
    BumpSpec,
    build_bump,
    decomposition_residual,
    eta_profile,
    hardy_chain_check,
    hardy_quotient,
    translate_deviation,
    verify_comparison,
    verify_counterexample,
)
from fracorlicz.young import double_phase, power

TWO = Domain.parse("box(0,1)+box(2,4)")


def test_eta_profile_values():
    R0 = 2.0
    v = eta_profile(np.array([0.0, 1.0, 1.5, 2.0, 3.0]), R0)
    assert v[0] == 1.0 and v[1] == 1.0 and v[3] == 0.0 and v[4] == 0.0
    assert v[2] == pytest.approx(math.exp(1 - 1 / 0.75))


def test_eta_profile_smooth_monotone():
    r = np.linspace(0, 1, 2001)
    v = eta_profile(r, 1.0)
    assert np.all(np.diff(v) <= 0)
    assert np.all((v >= 0) & (v <= 1))


def test_bump_spec_scaling():
    b = BumpSpec((3.0,), 1.0).with_eps(0.25)
    assert b.support_radius == 0.25
    assert b(np.array([[3.1]]))[0] == 1.0
    assert b(np.array([[3.3]]))[0] == 0.0
    assert b.centered().center == (0.0,)


def test_build_bump_generic_and_ball():
    b = build_bump(TWO)
    assert not b.ball_case
    assert b.center[0] == pytest.approx(3.0, abs=0.02)
    assert b.R0 == pytest.approx(1.0, abs=0.05)
    bb = build_bump(Domain.interval(-1, 1))
    assert bb.ball_case and bb.center == (0.5,) and bb.R0 == 0.25
    with pytest.raises(ValueError):
        build_bump(TWO, ball_case=True)


def test_translate_deviation():
    lat = Lattice((0.0,), 0.1, (9,))
    u = GridFunction(np.array([0, 0, 1.0, 2.0, 1.0, 0, 0, 0, 0]), lat)
    assert translate_deviation(u, schwarz_rearrange(u)) == 0.0
    w = GridFunction(np.array([0, 0, 1.0, 2.5, 1.0, 0, 0, 0, 0]), lat)
    assert translate_deviation(u, w) == pytest.approx(0.25)


@pytest.fixture(scope="module")
def two_interval_report():
    spec = CubatureSpec(base_resolution=256, refinement_levels=2)
    return verify_counterexample(TWO, power(2), 0.5, [0.5, 0.25], spec)


def test_counterexample_two_intervals(two_interval_report):
    rep = two_interval_report
    assert rep.passed and rep.tail_pass
    assert rep.smallest_passing_eps is not None
    for r in rep.rows:
        assert r.residual <= r.residual_bound
        assert r.polya_szego_ok and r.restriction_ok
        assert r.alignment <= 1e-12
    assert "PASS" in rep.summary()


def test_counterexample_scaling_law(two_interval_report):
    # G = t^2, s = 1/2, N = 1: full-space seminorms scale like eps^{N - sp} = 1,
    # while the domain part grows as the cross term shrinks
    a, b = two_interval_report.rows
    for x, y in [(a.fullspace, b.fullspace), (a.fullspace_star, b.fullspace_star)]:
        assert abs(x.value - y.value) <= x.error_bound + y.error_bound
    assert b.cross.value < a.cross.value and b.lhs.value > a.lhs.value


def test_counterexample_argument_checks():
    with pytest.raises(ValueError):
        verify_counterexample(TWO, power(2), 1.0, [0.5])
    with pytest.raises(ValueError):
        verify_counterexample(TWO, power(2), 0.5, [1.5])


def test_decomposition_residual_bounded():
    est = decomposition_residual(TWO, build_bump(TWO).with_eps(0.5), power(2), 0.5, CubatureSpec(base_resolution=128))
    assert est.value <= est.error_bound


def parabola(X):
    x = X[..., 0]
    return np.clip(x * (1 - x), 0, None)


def test_hardy_quotient_and_chain():
    D = Domain.interval(0, 1)
    spec = CubatureSpec(base_resolution=64)
    A, B = hardy_quotient(D, parabola, power(2), 0.75, spec)
    assert A.value > 0 and B.value > 0
    ok, ratio = hardy_chain_check(D, parabola, power(2), 0.75, spec)
    assert ok and ratio <= 1.0 + 1e-3


def test_comparison_report():
    D = Domain.interval(0, 1)
    spec = CubatureSpec(base_resolution=64)
    hats = [lambda X, c=c: np.clip(0.2 - np.abs(X[..., 0] - c), 0, None) for c in (0.3, 0.5, 0.7)]
    rep = verify_comparison(D, power(2), 0.75, hats, spec)
    assert rep.all_finite and rep.chain_ok
    assert rep.empirical_lower_bound >= max(r.rho for r in rep.rows) - 1e-15
    assert all(r.rho > 1 for r in rep.rows)
    assert "empirical lower bound" in rep.summary()


def test_comparison_case_hypothesis():
    with pytest.raises(CaseHypothesisFails):
        verify_comparison(Domain.interval(0, 1), power(2), 0.5, [parabola], CubatureSpec(base_resolution=32))


SWEEP_DOMAINS = {
    "two-intervals": (TWO, 512, (0.5, 0.25)),
    "ball-1d": (Domain.interval(-1, 1), 512, (0.5, 0.25)),
    "disk": (Domain.ball((0, 0), 1), 64, (0.5,)),
    "l-shape": (Domain.parse("box(0,0,2,1)+box(0,0,1,2)"), 48, (0.5,)),
}


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("young", ["t^2", "t^2+t^3"])
@pytest.mark.parametrize("dom", list(SWEEP_DOMAINS))
def test_counterexample_sweep(dom, young, s):
    D, res, eps = SWEEP_DOMAINS[dom]
    Y = power(2) if young == "t^2" else double_phase(2, 3)
    rep = verify_counterexample(D, Y, s, eps, CubatureSpec(base_resolution=res))
    assert rep.passed, rep.summary()
    assert rep.tail_pass
    for r in rep.rows:
        assert r.polya_szego_ok and r.restriction_ok
        assert r.residual <= r.residual_bound


def test_counterexample_identity_case():
    # bump centered in a centered ball: u = u*, Omega = Omega*, margin vanishes
    rep = verify_counterexample(Domain.interval(-1, 1), power(2), 0.5, [0.5], CubatureSpec(base_resolution=256),
                                bump=BumpSpec((0.0,), 0.5))
    r = rep.rows[0]
    assert abs(r.margin) <= r.combined_error + 1e-12 and not r.verdict
