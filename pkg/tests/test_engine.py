import math

import numpy as np
import pytest

from mazer import engine
from mazer.engine import (AUTO, AUTO_STEP_LIMIT, EXACT, SEMICLASSICAL,
                          InfeasibleEngine, choose_engine, gain_curve,
                          outcomes_batch, outcomes_point, spot_check)
from mazer.profiles import ModeProfile

PI = math.pi
MESA = ModeProfile("mesa")
SIN = ModeProfile("sinusoidal")


def test_auto_policy_small_coupling_is_exact():
    which = choose_engine(SIN, np.array([1.0]), np.array([300.0]), AUTO)
    assert list(which) == [EXACT]


def test_auto_policy_realistic_coupling_is_semiclassical():
    kap = 30000 * PI
    which = choose_engine(SIN, np.array([0.01 * kap]), np.array([kap]), AUTO)
    assert list(which) == [SEMICLASSICAL]


def test_auto_policy_mesa_always_exact():
    kap = 30000 * PI
    which = choose_engine(MESA, np.array([0.01 * kap]), np.array([kap]), AUTO)
    assert list(which) == [EXACT]


def test_exact_refusal_at_realistic_coupling():
    kap = 30000 * PI
    with pytest.raises(InfeasibleEngine, match="auto"):
        choose_engine(SIN, np.array([0.01 * kap]), np.array([kap]), EXACT)


def test_outcomes_agree_between_engines_at_moderate_scale():
    # semiclassical chain vs exact integration where both are comfortable
    kaps = np.linspace(315.2, 316.8, 9)
    kl = 0.01 * kaps
    exact = outcomes_batch(SIN, kl, kaps, EXACT)
    semi = outcomes_batch(SIN, kl, kaps, SEMICLASSICAL)
    np.testing.assert_allclose(semi.Pem, exact.Pem, atol=0.03)
    np.testing.assert_allclose(semi.T, exact.T, atol=0.03)


def test_outcomes_sum_to_one_both_engines():
    kaps = np.linspace(40.0, 60.0, 7)
    kl = 0.02 * kaps
    for eng in (EXACT, SEMICLASSICAL):
        o = outcomes_batch(SIN, kl, kaps, eng)
        np.testing.assert_allclose(o.Te + o.Tf + o.Re + o.Rf, 1.0, atol=1e-8)


def test_semiclassical_above_barrier_falls_back():
    # k above the barrier peak: plus channel has no turning point
    o = outcomes_point(SIN, 50.0, 30.0, SEMICLASSICAL)
    assert o.Te + o.Tf + o.Re + o.Rf == pytest.approx(1.0, abs=1e-6)


def test_gain_curve_matches_pointwise():
    g = gain_curve(SIN, 60.0, 0.01, 4, EXACT)
    for n in range(4):
        o = outcomes_point(SIN, 0.6, 60.0 * (n + 1) ** 0.25, EXACT)
        assert g[n] == pytest.approx(o.Pem, abs=1e-10)


def test_spot_check_records():
    kaps = np.linspace(100.0, 130.0, 12)
    recs = spot_check(SIN, 0.01 * kaps, kaps, max_points=3)
    assert len(recs) == 3
    for r in recs:
        assert r["abs_error_Pem"] == pytest.approx(
            abs(r["Pem_exact"] - r["Pem_semiclassical"]), abs=1e-15)
        assert r["abs_error_Pem"] < 0.05


def test_estimate_steps_monotone_in_coupling():
    est = engine.estimate_exact_steps(SIN, np.array([1.0, 1.0]),
                                      np.array([10.0, 1000.0]))
    assert est[1] > est[0]
