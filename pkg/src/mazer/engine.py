"""Per-point engine selection and batch outcome evaluation.

Exact integration cost grows linearly with kappa_n L (times the accuracy
refinement); realistic couplings (kappa_0 L ~ 1e5) would need ~1e8 RK4 steps
per point, where the semiclassical chain is both cheap and accurate.  The
auto policy picks exact numerics whenever the estimated work is at most
AUTO_STEP_LIMIT steps per point, else the semiclassical chain, optionally
validated by exact spot checks that land in the run metadata.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import scattering as sc
from .mesa import mesa_logderivs_batch
from .profiles import MESA, ModeProfile, turning_points
from .scattering import Channel, _amplitudes_arrays
from .semiclassical import (AboveBarrier, airy_barrier_logderivs,
                            minus_amplitudes_auto)

EXACT = "exact"
SEMICLASSICAL = "semiclassical"
AUTO = "auto"

#: auto policy: exact numerics when the estimated RK4 work per point
#: (both Richardson passes) stays below this.
AUTO_STEP_LIMIT = 10_000_000

#: the CLI refuses an explicit exact request beyond this (Fig. 3 scale);
#: auto would have chosen the semiclassical chain long before.
EXACT_REFUSAL_LIMIT = 100_000_000


class InfeasibleEngine(RuntimeError):
    """Explicit exact request beyond the refusal threshold."""


def estimate_exact_steps(profile: ModeProfile, kL, kappaNL,
                         tol: float = sc.RICHARDSON_TOL):
    """Estimated total RK4 steps per point (N plus the 2N check pass)."""
    kl = np.asarray(kL, dtype=float)
    kap = np.asarray(kappaNL, dtype=float)
    n0 = sc._initial_steps(kl, kap, 1.0 if profile.kind == MESA else np.pi / 2, tol)
    return 3 * n0


def choose_engine(profile: ModeProfile, kL, kappaNL, engine: str = AUTO):
    """Engine per point, as an array of 'exact'/'semiclassical' strings."""
    kl = np.atleast_1d(np.asarray(kL, dtype=float))
    kap = np.broadcast_to(np.asarray(kappaNL, dtype=float), kl.shape)
    if engine == EXACT:
        # mesa closed forms are exact at any coupling: no refusal there
        if profile.kind != MESA:
            est = estimate_exact_steps(profile, kl, kap)
            if np.any(est > EXACT_REFUSAL_LIMIT):
                worst = float(kap[np.argmax(est)])
                raise InfeasibleEngine(
                    f"exact integration at kappa_n L = {worst:.4g} needs "
                    f"{np.max(est):.2e} steps per point; use --engine auto")
        return np.full(kl.shape, EXACT, dtype=object)
    if engine == SEMICLASSICAL:
        return np.full(kl.shape, SEMICLASSICAL, dtype=object)
    if engine != AUTO:
        raise ValueError(f"unknown engine {engine!r}")
    if profile.kind == MESA:
        return np.full(kl.shape, EXACT, dtype=object)
    est = estimate_exact_steps(profile, kl, kap)
    return np.where(est <= AUTO_STEP_LIMIT, EXACT, SEMICLASSICAL).astype(object)


@dataclass(frozen=True)
class OutcomeArrays:
    """Columnar outcome probabilities along a parameter sweep."""

    Te: np.ndarray
    Tf: np.ndarray
    Re: np.ndarray
    Rf: np.ndarray
    engine: np.ndarray  # 'exact' | 'semiclassical' per point

    @property
    def Pem(self):
        return self.Tf + self.Rf

    @property
    def T(self):
        return self.Te + self.Tf


def _combine(rp, tp, rm, tm):
    Te = np.abs(tp + tm) ** 2 / 4.0
    Tf = np.abs(tp - tm) ** 2 / 4.0
    Re = np.abs(rp + rm) ** 2 / 4.0
    Rf = np.abs(rp - rm) ** 2 / 4.0
    flush = lambda a: np.where(a < sc._FLUSH, 0.0, a)
    return flush(Te), flush(Tf), flush(Re), flush(Rf)


def _exact_channel_amps(profile, kl, kap, channel):
    if profile.kind == MESA:
        be, bo = mesa_logderivs_batch(channel, kl, kap)
    else:
        be, bo = sc.logderivs_batch(profile, kl, kap, channel)
    return _amplitudes_arrays(be, bo, kl)


def _semiclassical_amps_point(profile, kl, kap):
    """(r+, t+, r-, t-) for one point via the semiclassical chain."""
    am = minus_amplitudes_auto(profile, kl, kap)
    if turning_points(profile, kl / kap if kap > 0 else np.inf) is None:
        # above the barrier the edge model has no turning point: integrate
        rp_arr, tp_arr = _exact_channel_amps(
            profile, np.asarray([kl]), np.asarray([kap]), Channel.PLUS)
        return rp_arr[0], tp_arr[0], am.r, am.t
    pair = airy_barrier_logderivs(profile, kl, kap)
    rp, tp = _amplitudes_arrays(np.asarray([pair.betaE_timesL]),
                                np.asarray([pair.betaO_timesL]), kl)
    return rp[0], tp[0], am.r, am.t


def outcomes_batch(profile: ModeProfile, kL, kappaNL,
                   engine: str = AUTO) -> OutcomeArrays:
    """Outcome probabilities for arrays of (kL, kappa_n L) points."""
    kl = np.atleast_1d(np.asarray(kL, dtype=float))
    kap = np.broadcast_to(np.asarray(kappaNL, dtype=float), kl.shape).copy()
    which = choose_engine(profile, kl, kap, engine)
    rp = np.empty(kl.shape, dtype=complex)
    tp = np.empty(kl.shape, dtype=complex)
    rm = np.empty(kl.shape, dtype=complex)
    tm = np.empty(kl.shape, dtype=complex)
    ex = which == EXACT
    if np.any(ex):
        rp[ex], tp[ex] = _exact_channel_amps(profile, kl[ex], kap[ex], Channel.PLUS)
        rm[ex], tm[ex] = _exact_channel_amps(profile, kl[ex], kap[ex], Channel.MINUS)
    for i in np.nonzero(~ex)[0]:
        rp[i], tp[i], rm[i], tm[i] = _semiclassical_amps_point(
            profile, float(kl[i]), float(kap[i]))
    Te, Tf, Re, Rf = _combine(rp, tp, rm, tm)
    return OutcomeArrays(Te, Tf, Re, Rf, which)


def outcomes_point(profile: ModeProfile, kL: float, kappaNL: float,
                   engine: str = AUTO) -> sc.OutcomeProbabilities:
    o = outcomes_batch(profile, kL, kappaNL, engine)
    return sc.OutcomeProbabilities(float(o.Te[0]), float(o.Tf[0]),
                                   float(o.Re[0]), float(o.Rf[0]))


def gain_curve(profile: ModeProfile, kappa0L: float, k_over_kappa0: float,
               count: int, engine: str = AUTO) -> np.ndarray:
    """Emission probabilities g_n = P_em^n for n = 0..count-1.

    The atom's kL is fixed by k_over_kappa0 * kappa0L; the coupling seen with
    n photons present is kappa0L (n+1)^(1/4).
    """
    n = np.arange(count)
    kap = kappa0L * (n + 1) ** 0.25
    kl = np.full(count, k_over_kappa0 * kappa0L)
    return outcomes_batch(profile, kl, kap, engine).Pem


def spot_check(profile: ModeProfile, kL, kappaNL, max_points: int = 10) -> list[dict]:
    """Exact-vs-semiclassical validation at evenly spaced sweep points;
    the records go into run metadata.

    Bypasses the exact-engine refusal threshold on purpose: a handful of
    slow reference points is the whole point of the check.
    """
    kl = np.atleast_1d(np.asarray(kL, dtype=float))
    kap = np.broadcast_to(np.asarray(kappaNL, dtype=float), kl.shape)
    if kl.size == 0 or max_points <= 0:
        return []
    idx = np.unique(np.linspace(0, kl.size - 1, min(max_points, kl.size)).astype(int))
    ks, kaps = kl[idx], kap[idx]
    rp, tp = _exact_channel_amps(profile, ks, kaps, Channel.PLUS)
    rm, tm = _exact_channel_amps(profile, ks, kaps, Channel.MINUS)
    Te, Tf, Re, Rf = _combine(rp, tp, rm, tm)
    records = []
    for j, i in enumerate(idx):
        semi = outcomes_point(profile, float(kl[i]), float(kap[i]), SEMICLASSICAL)
        pem_exact = float(Tf[j] + Rf[j])
        t_exact = float(Te[j] + Tf[j])
        records.append({
            "kL": float(kl[i]),
            "kappaNL": float(kap[i]),
            "Pem_exact": pem_exact,
            "Pem_semiclassical": semi.Pem,
            "T_exact": t_exact,
            "T_semiclassical": semi.T,
            "abs_error_Pem": abs(pem_exact - semi.Pem),
            "abs_error_T": abs(t_exact - semi.T),
        })
    return records
