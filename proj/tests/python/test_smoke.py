import math

import pytest

import tvflow


def test_indicator_dies_at_half_its_mass():
    u = tvflow.StepFunction.indicator(0.0, 1.0)
    assert tvflow.extinction_time(u) == 0.5
    assert tvflow.events(u)[-1] == (0.5, "Extinction")
    assert tvflow.advance(u, 0.25)(0.5) == pytest.approx(0.5)


def test_mass_drops_linearly():
    u = tvflow.StepFunction.cauchy([0, 1, 2, 3], [0, 1, 0.3, 2, 0])
    T = tvflow.extinction_time(u)
    for t in (0.0, 0.3 * T, 0.9 * T):
        assert tvflow.mass(tvflow.advance(u, t)) == pytest.approx(2 * (T - t), abs=1e-12)


def test_prox_of_a_bump():
    u = tvflow.StepFunction.cauchy([0, 1], [0, 2, 0])
    uh, objective, residual = tvflow.tv_prox(u, 0.25)
    assert uh.values == pytest.approx([0, 1.5, 0])
    assert residual <= 1e-12
    assert objective == pytest.approx(3.0 + 0.25 / 0.5)


def test_neumann_and_json_round_trip():
    u = tvflow.StepFunction.neumann((0, 3), [1, 2], [0.5, 1.5, 0.25])
    assert u.mode == tvflow.BoundaryMode.NEUMANN
    assert tvflow.StepFunction.from_json(u.to_json()) == u


def test_dipole_atoms():
    dipole = [(0.0, 1.0), (1.0, -1.0)]
    assert tvflow.evolve_deltas(dipole, 0.2) == pytest.approx([(0.0, 0.6), (1.0, -0.6)])
    assert tvflow.evolve_via_tvf(dipole, 0.2) == pytest.approx([(0.0, 0.6), (1.0, -0.6)])
    assert tvflow.deltas_extinction_time(dipole) == 0.5
    assert tvflow.deltas_extinction_time([(0.0, 0.7)], dirichlet=(-1.0, 1.0)) == pytest.approx(0.35)


def test_hat_level_cut():
    level, rate = tvflow.level_cut([-1, 0, 1], [0, 1, 0], 0.125)
    assert level == pytest.approx(0.5)
    assert rate == pytest.approx(-2.0)


def test_rate_report_shape():
    rep = tvflow.verify_rate("identity", "no-rate", [0.1], 1e-3)
    assert rep["c0"] == 4.0
    (s,) = rep["samples"]
    assert s["applicable"] and s["sup_pass"]
    assert s["error_lower"] <= s["error_upper"]


def test_errors_carry_codes():
    with pytest.raises(tvflow.TvflowError) as info:
        tvflow.extinction_time(tvflow.StepFunction.cauchy([0, 1], [0, -1, 0]))
    assert info.value.code == "flow.SignedData"
    with pytest.raises(tvflow.TvflowError) as info:
        tvflow.tv_prox(tvflow.StepFunction.indicator(0, 1), -1.0)
    assert info.value.code == "prox.NonpositiveStep"
    assert math.isinf(tvflow.deltas_extinction_time([(0.0, 1.0)]))
