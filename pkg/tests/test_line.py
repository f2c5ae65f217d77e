import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sensormove.geometry import CandIParams, Placement1D, verify_ci_1d
from sensormove.line import (
    CV1Params,
    MVParams,
    anchor_cost_leading_term,
    anchors_1d,
    cv1_algorithm,
    move_to_anchors_1d,
    mv_algorithm,
    verify_mv_properties,
)
from sensormove.rng import SeedSpec, sample_sorted_uniform_1d

GAMMA_7_4 = 0.919062526848883233846823727522  # mpmath, 30 digits


def P(xs):
    return Placement1D.from_positions(np.asarray(xs, dtype=float))


# anchors

def test_anchor_examples():
    assert move_to_anchors_1d(P([0.5]), 3.0)[1].total == 0.0
    out, rep = move_to_anchors_1d(P([0.0, 1.0]), 1.0)
    np.testing.assert_allclose(out.current, [0.25, 0.75])
    assert rep.total == pytest.approx(0.5)


def test_anchor_single_sensor_mean():
    reps = 10**5
    u = np.random.default_rng(1).random(reps)
    costs = [move_to_anchors_1d(P([x]), 2.0)[1].total for x in u[:2000]]
    # vectorised oracle for the full sample, spot check the API on a subset
    np.testing.assert_allclose(costs, (u[:2000] - 0.5) ** 2, rtol=1e-12)
    se = np.std((u - 0.5) ** 2, ddof=1) / math.sqrt(reps)
    assert abs(np.mean((u - 0.5) ** 2) - 1 / 12) < 3 * se


def test_leading_term_values():
    for n in (1, 7, 3600):
        assert anchor_cost_leading_term(2.0, n) == pytest.approx(1 / 6, rel=1e-12)
    assert anchor_cost_leading_term(1.0, 3600) == pytest.approx(math.sqrt(math.pi) / 2 / (2 * math.sqrt(2)) * 60, rel=1e-12)
    expected = GAMMA_7_4 / (2 ** 0.75 * 2.5) * 10 ** 0.25
    assert anchor_cost_leading_term(1.5, 10) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        anchor_cost_leading_term(0.0, 3)


def test_anchor_requires_sorted_active():
    with pytest.raises(ValueError):
        move_to_anchors_1d(Placement1D(np.array([0.2, 0.6]), np.array([0.6, 0.2]), np.ones(2, bool)), 1.0)
    with pytest.raises(ValueError):
        move_to_anchors_1d(Placement1D(np.array([0.2, 0.6]), np.array([0.2, 0.6]), np.array([True, False])), 1.0)


# MV

def test_mv_figure_example():
    s, rho = 0.05, 0.1
    xs = [s / 2, s, 2 * s + 2 * rho, 2 * s + 2.5 * rho]
    out, _ = mv_algorithm(P(xs), MVParams(rho, s))
    # left shift by Y1 - rho/2 = s - rho/2 follows the sweep
    z = s - rho / 2
    np.testing.assert_allclose(out.current + z, [s, 2 * s, 2 * s + rho, 2 * s + 2 * rho], atol=1e-15)


def test_mv_noop():
    xs = [0.1, 0.3, 0.5, 0.7]
    out, rep = mv_algorithm(P(xs), MVParams(0.25, 0.05))
    np.testing.assert_array_equal(out.current, xs)
    assert rep.total == 0.0


def test_mv_frozen_right_end_case():
    out, rep = mv_algorithm(P([0.9, 0.95, 1.0]), MVParams(0.4, 0.2))
    np.testing.assert_allclose(out.current, [0.2, 0.6, 0.8], atol=1e-15)
    assert out.active.all() and rep.deactivated_count == 0
    assert verify_mv_properties(out, MVParams(0.4, 0.2))


def test_mv_pile_at_one():
    out, rep = mv_algorithm(P([0.1, 0.2, 0.3]), MVParams(0.5, 0.4))
    np.testing.assert_allclose(out.current, [0.25, 0.65, 0.85], atol=1e-15)
    np.testing.assert_array_equal(out.active, [True, True, False])
    assert rep.deactivated_count == 1


def test_mv_pile_keeps_one_when_room():
    # sweep gives 0.3, 0.6, 0.9, 1.0, 1.0 ; 1 - 0.9 < s so no sensor at 1 survives
    out, _ = mv_algorithm(P([0.3, 0.3, 0.3, 0.3, 0.3]), MVParams(0.45, 0.3))
    np.testing.assert_array_equal(out.active, [True, True, True, False, False])
    # here 1 - 0.8 >= s: one sensor at 1 stays
    out, _ = mv_algorithm(P([0.2, 0.2, 0.2, 0.2, 0.2, 0.2]), MVParams(0.3, 0.2))
    np.testing.assert_array_equal(out.active, [True, True, True, True, True, False])


def test_mv_single_sensor_shifts():
    out, rep = mv_algorithm(P([0.9]), MVParams(0.4, 0.1))
    assert out.current[0] == pytest.approx(0.2)
    assert rep.total == pytest.approx(0.7)


def test_mv_params_validation():
    with pytest.raises(ValueError):
        MVParams(0.1, 0.2)
    with pytest.raises(ValueError):
        MVParams(0.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 400), st.floats(1.05, 3.0), st.floats(0.0, 0.95), st.integers(0, 2**32 - 1))
def test_mv_properties_hold(n, rho_n, s_n, seed):
    prm = MVParams.from_multiples(n, rho_n, s_n)
    p = sample_sorted_uniform_1d(n, SeedSpec(seed))
    out, rep = mv_algorithm(p, prm)
    assert verify_mv_properties(out, prm)
    assert np.all(rep.per_sensor_phasewise >= rep.per_sensor)


def test_verify_mv_properties_detects():
    prm = MVParams(0.3, 0.1)
    assert verify_mv_properties(P([0.1, 0.15]), prm).clause == "spacing"
    assert verify_mv_properties(P([0.1, 0.5]), prm).clause == "spacing"
    assert verify_mv_properties(P([0.1, 0.3]), prm)
    assert verify_mv_properties(P([0.16, 0.4]), prm).clause == "leftmost"


# CV1

def test_cv1_case_a_free_after_mv():
    n = 4
    prm = CV1Params(1.2 / (2 * n), 0.5 / n, 1.0)
    xs = anchors_1d(n)
    out, rep, case = cv1_algorithm(P(xs), prm)
    assert case == "A"
    assert rep.total == 0.0


def test_cv1_case_b():
    n = 100
    prm = CV1Params(1.2 / (2 * n), 0.5 / n, 1.0)
    xs = np.linspace(0.0, 0.2, n)
    out, rep, case = cv1_algorithm(P(xs), prm)
    assert case == "B"
    np.testing.assert_allclose(out.current, anchors_1d(n))
    assert out.active.all()


def test_cv1_case_c():
    n = 100
    prm = CV1Params(1.2 / (2 * n), 0.5 / n, 1.0)
    xs = np.linspace(0.0, 0.96, n)
    out, _, case = cv1_algorithm(P(xs), prm)
    assert case == "C"
    assert out.current[-1] == pytest.approx(1 - prm.r1)
    assert verify_ci_1d(out, CandIParams(1, prm.r1, prm.s))


def test_cv1_rejects_bad_params():
    with pytest.raises(ValueError):
        cv1_algorithm(P([0.2, 0.7]), CV1Params(0.25, 0.1))
    with pytest.raises(ValueError):
        cv1_algorithm(P([0.2, 0.7]), CV1Params(0.3, 0.5))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 2000), st.floats(1.01, 2.5), st.floats(0.0, 0.99),
       st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0]), st.integers(0, 2**32 - 1))
def test_cv1_always_solves(n, r_2n, s_n, a, seed):
    prm = CV1Params.from_multiples(n, r_2n, s_n, a)
    p = sample_sorted_uniform_1d(n, SeedSpec(seed))
    out, _, _ = cv1_algorithm(p, prm)
    res = verify_ci_1d(out, CandIParams(1, prm.r1, prm.s))
    assert res, res.message


def test_cv1_case_b_rare_and_shrinking():
    def freq(n, trials):
        prm = CV1Params.from_multiples(n, 1.2, 0.5, 1.0)
        hits = sum(cv1_algorithm(sample_sorted_uniform_1d(n, SeedSpec(99, t)), prm)[2] == "B"
                   for t in range(trials))
        return hits / trials

    f3, f4 = freq(1000, 2000), freq(10000, 2000)
    assert f3 <= 0.05 and f4 <= 0.05
    assert f4 <= f3
