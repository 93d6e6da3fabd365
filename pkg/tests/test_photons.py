import math

import numpy as np
import pytest

from mazer.photons import (FieldState, GainCurveExhausted, MicromaserConfig,
                           NonNormalizable, PhotonDistribution,
                           conventional_emission, conventional_gain,
                           ensemble_average, evolve_master_equation,
                           field_weights, master_equation_rhs,
                           steady_state_distribution)


# ------------------------------------------------------------- weights

def test_number_state_weights():
    w = field_weights(FieldState("number", 2))
    assert w[2] == 1.0
    assert w.sum() == 1.0
    assert np.count_nonzero(w) == 1


def test_coherent_weights_poisson():
    w = field_weights(FieldState("coherent", 2.0))
    assert w[2] == pytest.approx(math.exp(-2) * 4 / 2, rel=1e-10)
    assert w[2] == pytest.approx(0.2707, abs=5e-5)
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    # pre-renormalization tail below 1e-12
    n = np.arange(w.size)
    raw = np.exp(-2.0) * 2.0 ** n / np.array([math.factorial(int(i)) for i in n])
    assert 1.0 - raw.sum() < 1e-12


def test_thermal_weights_geometric():
    w = field_weights(FieldState("thermal", 1.0))
    for n in range(5):
        assert w[n] == pytest.approx(2.0 ** -(n + 1), rel=1e-10)


def test_explicit_truncation_respected_and_raised():
    w = field_weights(FieldState("coherent", 0.25, truncation=40))
    assert w.size >= 41
    # too-small truncation is auto-raised until the tail is captured
    w2 = field_weights(FieldState("coherent", 5.0, truncation=3))
    assert w2.size > 4


def test_field_state_validation():
    with pytest.raises(ValueError):
        FieldState("squeezed", 1.0)
    with pytest.raises(ValueError):
        FieldState("number", 1.5)
    with pytest.raises(ValueError):
        FieldState("thermal", -1.0)


# ------------------------------------------------------------ averages

def test_ensemble_average_delta_and_uniform():
    w = field_weights(FieldState("number", 3))
    per = np.linspace(0.0, 1.0, w.size)
    assert ensemble_average(w, per) == pytest.approx(per[3], rel=1e-15)
    const = np.full(10, 0.37)
    wts = np.full(10, 0.1)
    assert ensemble_average(wts, const) == pytest.approx(0.37, rel=1e-14)


def test_ensemble_average_length_mismatch():
    with pytest.raises(ValueError):
        ensemble_average(np.ones(3) / 3, np.ones(4))


# ------------------------------------------------------- conventional gain

def test_conventional_emission_values():
    assert conventional_emission(0.0) == 0.0
    assert conventional_emission(math.pi / 2) == pytest.approx(1.0, rel=1e-15)
    assert conventional_emission(math.pi / 4) == pytest.approx(0.5, rel=1e-14)


def test_conventional_gain_curve():
    g = conventional_gain(10.0, 0.1, 4)
    kl = 1.0
    for n in range(4):
        kap = 10.0 * (n + 1) ** 0.25
        assert g[n] == pytest.approx(math.sin(kap ** 2 / (2 * kl)) ** 2, rel=1e-12)


# ------------------------------------------------------- stationary state

def test_zero_gain_is_thermal():
    cfg = MicromaserConfig(nex=1000.0, nb=1.0, gain=np.zeros(200))
    dist = steady_state_distribution(cfg)
    for n in range(6):
        assert dist.p[n] == pytest.approx(2.0 ** -(n + 1), rel=1e-9)
    assert dist.p.sum() == pytest.approx(1.0, abs=1e-12)


def test_detailed_balance_recursion():
    rng = np.random.default_rng(21)
    gain = rng.uniform(0.0, 1.0, 400)
    cfg = MicromaserConfig(nex=80.0, nb=0.7, gain=gain)
    dist = steady_state_distribution(cfg)
    p = dist.p
    loss = 1.0
    r = cfg.nex * loss
    for n in range(1, p.size):
        lhs = r * p[n - 1] * gain[n - 1] + loss * cfg.nb * n * p[n - 1]
        rhs = loss * (cfg.nb + 1.0) * n * p[n]
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-280)


def test_stationarity_of_master_equation_rhs():
    rng = np.random.default_rng(5)
    for _ in range(50):
        nex = float(rng.uniform(0.1, 500.0))
        nb = float(rng.uniform(0.01, 3.0))
        gain = rng.uniform(0.0, 1.0, 2000)
        loss = float(rng.uniform(0.1, 10.0))
        cfg = MicromaserConfig(nex=nex, nb=nb, gain=gain,
                               rate_r=nex * loss, loss_rate=loss)
        p = steady_state_distribution(cfg).p
        rhs = master_equation_rhs(p, cfg)
        max_rate = max(cfg.rate_r, loss)
        assert np.max(np.abs(rhs)) < 1e-10 * max_rate


def test_thermal_limit_kl_divergence():
    # N_ex -> 0 recovers the bath distribution
    nb = 1.3
    cfg = MicromaserConfig(nex=1e-8, nb=nb, gain=np.full(400, 0.8))
    p = steady_state_distribution(cfg).p
    n = np.arange(p.size)
    q = (nb / (nb + 1)) ** n / (nb + 1)
    q /= q.sum()
    mask = p > 0
    kl = float(np.sum(p[mask] * np.log(p[mask] / q[mask])))
    assert kl < 1e-12


def test_gain_exhausted_error():
    cfg = MicromaserConfig(nex=1000.0, nb=1.0, gain=np.full(5, 0.5))
    with pytest.raises(GainCurveExhausted) as exc:
        steady_state_distribution(cfg)
    assert exc.value.needed > 5


def test_non_normalizable_at_ceiling():
    cfg = MicromaserConfig(nex=1e5, nb=1.0, gain=np.ones(5000))
    with pytest.raises(NonNormalizable):
        steady_state_distribution(cfg, nmax_ceiling=3000)


def test_distribution_validation():
    with pytest.raises(ValueError):
        PhotonDistribution(np.array([0.5, 0.4]))
    with pytest.raises(ValueError):
        PhotonDistribution(np.array([1.5, -0.5]))


# ------------------------------------------------------------- evolution

def _random_config(rng, size=250):
    nex = 40.0
    loss = 2.0
    gain = rng.uniform(0.0, 1.0, size)
    return MicromaserConfig(nex=nex, nb=0.8, gain=gain,
                            rate_r=nex * loss, loss_rate=loss)


def test_evolution_preserves_stationary_state():
    rng = np.random.default_rng(17)
    cfg = _random_config(rng)
    p0 = steady_state_distribution(cfg)
    out = evolve_master_equation(p0, cfg, t_end=2.0 / cfg.loss_rate)
    np.testing.assert_allclose(out.p, p0.p, atol=1e-9)


def test_pure_damping_relaxes_to_thermal():
    nb = 0.5
    cfg = MicromaserConfig(nex=0.0, nb=nb, gain=np.zeros(60),
                           rate_r=0.0, loss_rate=1.0)
    start = np.zeros(60)
    start[5] = 1.0
    out = evolve_master_equation(PhotonDistribution(start), cfg, t_end=40.0)
    n = np.arange(60)
    q = (nb / (nb + 1)) ** n / (nb + 1)
    np.testing.assert_allclose(out.p, q / q.sum(), atol=1e-8)


def test_probability_conservation_drift():
    rng = np.random.default_rng(23)
    cfg = _random_config(rng, size=100)
    start = rng.uniform(0.0, 1.0, 100)
    start /= start.sum()
    out = evolve_master_equation(PhotonDistribution(start), cfg,
                                 t_end=5.0 / cfg.loss_rate)
    assert abs(out.p.sum() - 1.0) < 1e-10


def test_relaxation_back_to_stationary():
    rng = np.random.default_rng(29)
    cfg = _random_config(rng)
    stat = steady_state_distribution(cfg)
    kick = stat.p.copy()
    kick[0] *= 1.5
    kick /= kick.sum()
    out = evolve_master_equation(PhotonDistribution(kick), cfg,
                                 t_end=50.0 / cfg.loss_rate)
    assert np.abs(out.p - stat.p).sum() < 1e-6


def test_config_consistency_check():
    with pytest.raises(ValueError):
        MicromaserConfig(nex=10.0, nb=1.0, gain=np.zeros(4),
                         rate_r=3.0, loss_rate=1.0)
    with pytest.raises(ValueError):
        MicromaserConfig(nex=10.0, nb=1.0, gain=np.array([0.5, 1.7]))
    with pytest.raises(ValueError):
        master_equation_rhs(np.ones(4) / 4,
                            MicromaserConfig(nex=1.0, nb=0.0, gain=np.zeros(4)))
