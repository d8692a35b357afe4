import math

import pytest
from hypothesis import given, settings, strategies as st

from urllc_ec.oracle_sim import enumerate_reliability
from urllc_ec.reliability import (
    attempt_probs,
    dvp,
    reliability,
    reliability_ceiling,
    unreliability,
    unreliability_floor,
)

from .conftest import make_scenario, perfect_scenario, random_scenarios

probs = st.floats(0.0, 1.0)


def test_attempt_probs_examples():
    ev = attempt_probs(1, 1, 1)
    assert (ev.p_success, ev.p_timeout, ev.p_feed) == (1, 0, 0)
    ev = attempt_probs(0, 0.7, 0.3)
    assert ev.p_timeout == 1 and ev.p_feed == 0
    ev = attempt_probs(1, 0, 1)
    assert ev.p_feed == 1 and ev.p_timeout == 0
    with pytest.raises(ValueError):
        attempt_probs(1.1, 0.5, 0.5)


@given(probs, probs, probs)
def test_outcomes_partition(p1, p2, p3):
    ev = attempt_probs(p1, p2, p3)
    assert ev.p_success + ev.p_timeout + ev.p_feed == pytest.approx(1.0, abs=1e-15)
    assert ev.p_fail == pytest.approx(ev.p_timeout + ev.p_feed, abs=1e-15)


@given(probs, probs)
def test_perfect_feedback_timeout_is_control_loss(p1, p2):
    assert attempt_probs(p1, p2, 1.0).p_timeout == pytest.approx(1 - p1, abs=1e-15)


def test_dvp_examples():
    assert dvp(2.0, 0.0) == 1.0
    assert dvp(1.0, -0.3) == 1.0
    assert dvp(1e6, 0.5) == 0.0
    assert dvp(1.0, 0.5393) == pytest.approx(math.exp(-0.5393))
    assert dvp(1.0, 0.5393) == pytest.approx(0.5832, abs=1e-4)
    with pytest.raises(ValueError):
        dvp(0.0, 1.0)


def test_perfect_channels_single_attempt():
    s = perfect_scenario()
    assert reliability(s, 1e4, 1).value == 1.0


def test_large_theta_limit_is_channel_success():
    s = make_scenario(d_max=1.0)
    assert reliability(s, 1e4, 1).value == pytest.approx(s.p_success, abs=1e-15)


def test_calibrated_single_attempt_saturation():
    s = make_scenario(d_max=1.0, n_max=1)
    assert reliability(s, 100.0, 1).value == pytest.approx(0.9994, abs=1e-6)
    assert reliability_ceiling(s, 1) == pytest.approx(0.9994, abs=1e-12)


def test_two_attempts_match_direct_expansion():
    s = make_scenario(d_max=3.0, p3=0.7, n_max=2)
    ev = attempt_probs(s.p1, s.p2, s.p3)
    th = 1.7
    det = s.d_gnb + s.d_ue + s.t_tx
    r1 = (1 - math.exp(-th * (s.d_max - det))) * s.p1 * s.p2
    r2 = (
        r1
        + (1 - math.exp(-th * (s.d_max - 2 * det - s.d_timeout))) * ev.p_timeout * s.p1 * s.p2
        + (1 - math.exp(-th * (s.d_max - 2 * det - s.d_feed))) * ev.p_feed * s.p1 * s.p2
    )
    assert reliability(s, th, 2).value == pytest.approx(r2, abs=1e-15)


def test_dead_paths_contribute_nothing():
    s = perfect_scenario(p2=0.5, d_max=1.0)  # second attempt cannot fit in 1 ms
    res = reliability(s, 5.0, 2)
    assert res.per_attempt_terms[1] == 0.0
    assert all(t.slack_ms <= 0 for t in res.per_path_terms[1])


def test_result_decomposition():
    s = make_scenario(p3=0.6)
    res = reliability(s, 2.0, 3)
    assert res.value == pytest.approx(math.fsum(res.per_attempt_terms), abs=1e-16)
    assert all(x >= 0 for x in res.per_attempt_terms)
    assert [len(g) for g in res.per_path_terms] == [1, 2, 3]
    assert res.value + res.unreliability == pytest.approx(1.0, abs=1e-15)


def test_n_out_of_range():
    s = make_scenario(n_max=2)
    with pytest.raises(ValueError):
        reliability(s, 1.0, 3)
    with pytest.raises(ValueError):
        reliability(s, 1.0, 0)
    with pytest.raises(ValueError):
        reliability(s, 0.0, 1)


def test_unreliability_resolves_nine_nines():
    s = make_scenario(d_max=10.0, n_max=3)
    loss = unreliability(s, 50.0, 3)
    q = 1 - 0.9994
    # at large theta only retry exhaustion remains: (1 - p1p2)^3
    assert loss == pytest.approx(q**3, rel=1e-6)
    assert unreliability_floor(s, 3) == pytest.approx(q**3, rel=1e-6)


def test_diminishing_returns_in_saturation():
    s = make_scenario(d_max=5.0)
    th = 20.0
    r1, r2, r3 = (reliability(s, th, n).value for n in (1, 2, 3))
    assert r3 - r2 <= r2 - r1


@pytest.mark.parametrize("seed", range(5))
def test_matches_enumeration(seed):
    for s in random_scenarios(20, seed):
        for n in range(1, 5):
            for th in (0.1, 1.0, 10.0):
                assert abs(reliability(s, th, n).value - enumerate_reliability(s, th, n)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_bounded_and_monotone(seed):
    s = random_scenarios(1, seed)[0]
    thetas = [0.05 * 1.6**k for k in range(20)]
    for n in range(1, 5):
        values = [reliability(s, th, n).value for th in thetas]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
    for th in (0.3, 3.0):
        by_n = [reliability(s, th, n).value for n in range(1, 5)]
        assert all(b >= a - 1e-15 for a, b in zip(by_n, by_n[1:]))
