import math

import numpy as np
import pytest

from mazer.mesa import (mesa_amplitudes, mesa_logderivs_batch,
                        mesa_logderivs_exact, mesa_resonance_positions,
                        mesa_t2_minus)
from mazer.profiles import ModeProfile
from mazer.scattering import Channel, amplitudes_from_logderivs

PI = math.pi
MESA = ModeProfile("mesa")


def test_minus_channel_example():
    q = math.hypot(0.01, 1.0)
    pair = mesa_logderivs_exact(Channel.MINUS, 0.01, 1.0)
    assert pair.betaE_timesL == pytest.approx(q * math.tan(q / 2), rel=1e-14)
    assert abs(pair.betaE_timesL) == pytest.approx(0.5464, abs=2e-4)
    assert pair.betaO_timesL == pytest.approx(-q / math.tan(q / 2), rel=1e-14)


def test_plus_channel_deep_barrier_limit():
    # k << kappa_n, kappa_n L >> 1: both parities approach -kappa_n
    pair = mesa_logderivs_exact(Channel.PLUS, 0.5, 50.0)
    kp = math.sqrt(50.0 ** 2 - 0.25)
    assert pair.betaE_timesL == pytest.approx(-kp, rel=1e-10)
    assert pair.betaO_timesL == pytest.approx(-kp, rel=1e-10)


def test_free_particle():
    pair = mesa_logderivs_exact(Channel.MINUS, 1.0, 0.0)
    assert pair.betaE_timesL == pytest.approx(math.tan(0.5), rel=1e-15)
    assert pair.betaO_timesL == pytest.approx(-1 / math.tan(0.5), rel=1e-15)


def test_above_barrier_plus_channel():
    # k > kappa_n: oscillatory interior with q' = sqrt(k^2 - kappa_n^2)
    qp = math.sqrt(2.0 ** 2 - 1.0)
    pair = mesa_logderivs_exact(Channel.PLUS, 2.0, 1.0)
    assert pair.betaE_timesL == pytest.approx(qp * math.tan(qp / 2), rel=1e-13)
    assert pair.betaO_timesL == pytest.approx(-qp / math.tan(qp / 2), rel=1e-13)


def test_threshold_continuity():
    # k = kappa_n is a removable 0/0; the series branch must join smoothly
    below = mesa_logderivs_exact(Channel.PLUS, 1.0, 1.0 + 1e-9)
    at = mesa_logderivs_exact(Channel.PLUS, 1.0, 1.0)
    above = mesa_logderivs_exact(Channel.PLUS, 1.0 + 1e-9, 1.0)
    for a, b in ((below, at), (at, above)):
        assert a.betaE_timesL == pytest.approx(b.betaE_timesL, abs=1e-7)
        assert a.betaO_timesL == pytest.approx(b.betaO_timesL, abs=1e-7)
    assert at.betaO_timesL == pytest.approx(-2.0, abs=1e-7)


def test_pole_clamp_keeps_amplitudes_continuous():
    # qL/2 at a tan pole: beta_e explodes, amplitudes must stay smooth
    kap = math.sqrt(PI ** 2 - 0.01)  # qL ~ pi at kL = 0.1
    eps = 1e-11
    vals = []
    for kapv in (kap - eps, kap, kap + eps):
        amp = mesa_amplitudes(Channel.MINUS, 0.1, kapv)
        vals.append((abs(amp.r), abs(amp.t)))
    for (r1, t1), (r2, t2) in zip(vals, vals[1:]):
        assert abs(r1 - r2) < 1e-8
        assert abs(t1 - t2) < 1e-8


def test_small_k_approximations_error_bound():
    # dropping the (k/kappa_n)^2 correction in q costs at most ~3 (k/kappa)^2
    # in relative error away from the tan/cot poles and zeros
    for rho in (0.01, 0.03, 0.05):
        for kap in np.linspace(0.6, 2.6, 21):
            half = kap / 2
            if min(abs(math.tan(half)), abs(1 / math.tan(half))) < 0.3:
                continue
            kl = rho * kap
            exact = mesa_logderivs_exact(Channel.MINUS, kl, kap)
            approx_e = kap * math.tan(half)
            approx_o = -kap / math.tan(half)
            assert abs(approx_e / exact.betaE_timesL - 1) <= 3 * rho ** 2
            assert abs(approx_o / exact.betaO_timesL - 1) <= 3 * rho ** 2
        # barrier channel: tanh/coth forms
        for kap in (5.0, 20.0):
            kl = rho * kap
            exact = mesa_logderivs_exact(Channel.PLUS, kl, kap)
            approx_e = -kap * math.tanh(kap / 2)
            approx_o = -kap / math.tanh(kap / 2)
            assert abs(approx_e / exact.betaE_timesL - 1) <= 3 * rho ** 2
            assert abs(approx_o / exact.betaO_timesL - 1) <= 3 * rho ** 2


def test_resonance_positions_and_drift():
    rho = 0.01
    positions = mesa_resonance_positions(rho, [1, 99])
    # peaks sit at q L = j pi, i.e. a factor 1/sqrt(1 + rho^2) below j pi
    for j, pos in zip([1, 99], positions):
        exact = j * PI / math.sqrt(1 + rho ** 2)
        assert pos == pytest.approx(exact, abs=2e-6)
    assert abs(positions[1] - 99 * PI) < 0.02  # paper rounds this to 99 pi


def test_resonance_width_4k_over_kappa():
    rho = 0.01
    (pos,) = mesa_resonance_positions(rho, [100])
    half = 0.5  # peak value is 1
    lo, hi = pos, pos
    while mesa_t2_minus(lo, rho) > half:
        lo -= 1e-3
    while mesa_t2_minus(hi, rho) > half:
        hi += 1e-3
    # bisect each side
    from mazer.resonances import _bisect_half
    f = lambda x: float(mesa_t2_minus(np.asarray([x]), rho)[0])
    left = _bisect_half(f, half, pos, lo)
    right = _bisect_half(f, half, pos, hi)
    fwhm = right - left
    assert fwhm == pytest.approx(4 * rho, rel=0.2)


def test_amplitudes_match_integrator_large_coupling():
    from mazer.scattering import logderivs_batch
    kl = np.array([3.17])
    kap = np.array([1000.0])
    for channel in (Channel.MINUS, Channel.PLUS):
        ce, co = mesa_logderivs_batch(channel, kl, kap)
        be, bo = logderivs_batch(MESA, kl, kap, channel)
        d = abs(np.arctan2(ce[0], kl[0]) - np.arctan2(be[0], kl[0]))
        assert min(d, PI - d) < 1e-6
