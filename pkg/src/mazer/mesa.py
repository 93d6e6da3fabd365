"""Closed-form logarithmic derivatives and resonance structure for the
constant (mesa) mode.

Inside a mesa cavity the channel equation has constant coefficients, so the
even/odd solutions are elementary:

  well (-):      q  = sqrt(k^2 + kappa_n^2):  beta_e =  q tan(qL/2),
                                              beta_o = -q cot(qL/2)
  barrier (+),
   k < kappa_n:  kp = sqrt(kappa_n^2 - k^2):  beta_e = -kp tanh(kp L/2),
                                              beta_o = -kp coth(kp L/2)
   k > kappa_n:  the well forms apply with q -> sqrt(k^2 - kappa_n^2).

The odd-parity cotangent carries a minus sign: it is the literal phi'/phi of
sin-like solutions at z = -L/2, and the free-particle limit (r = 0, |t| = 1)
pins it.  Serves as the reference oracle for the integrator and as the
comparison baseline for the sinusoidal mode.
"""
from __future__ import annotations

import numpy as np

from .scattering import (BETA_CLAMP, Channel, ChannelAmplitudes,
                         LogDerivativePair, _amplitudes_arrays)

#: below this argument tan/tanh switch to series to remove the 0/0 at the
#: channel threshold k = kappa_n.
_SMALL_ARG = 1e-4


def _tan_forms(qL):
    """(beta_e L, beta_o L) = (q tan(q/2), -q cot(q/2)) with pole clamping."""
    qL = np.asarray(qL, dtype=float)
    half = 0.5 * qL
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.tan(half)
        be = np.where(np.abs(half) < _SMALL_ARG,
                      qL * half * (1 + half * half / 3.0), qL * t)
        bo = np.where(np.abs(half) < _SMALL_ARG,
                      -2.0 + qL * half / 3.0, -qL / t)
    be = np.clip(np.nan_to_num(be, nan=BETA_CLAMP, posinf=BETA_CLAMP,
                               neginf=-BETA_CLAMP), -BETA_CLAMP, BETA_CLAMP)
    bo = np.clip(np.nan_to_num(bo, nan=-BETA_CLAMP, posinf=BETA_CLAMP,
                               neginf=-BETA_CLAMP), -BETA_CLAMP, BETA_CLAMP)
    return be, bo


def _tanh_forms(kpL):
    """(beta_e L, beta_o L) = (-kp tanh(kp/2), -kp coth(kp/2)), series near 0."""
    kpL = np.asarray(kpL, dtype=float)
    half = 0.5 * kpL
    with np.errstate(divide="ignore", invalid="ignore"):
        th = np.tanh(half)
        be = np.where(half < _SMALL_ARG,
                      -kpL * half * (1 - half * half / 3.0), -kpL * th)
        bo = np.where(half < _SMALL_ARG, -2.0 - kpL * half / 3.0, -kpL / th)
    return be, bo


def mesa_logderivs_batch(channel: Channel, kL, kappaNL):
    """Vectorized exact mesa logarithmic derivatives (values of beta*L)."""
    kl = np.atleast_1d(np.asarray(kL, dtype=float))
    kap = np.broadcast_to(np.asarray(kappaNL, dtype=float), kl.shape)
    if channel is Channel.MINUS:
        return _tan_forms(np.hypot(kl, kap))
    be = np.empty(kl.shape)
    bo = np.empty(kl.shape)
    below = kl <= kap
    if np.any(below):
        kp = np.sqrt(kap[below] ** 2 - kl[below] ** 2)
        be[below], bo[below] = _tanh_forms(kp)
    if np.any(~below):
        q = np.sqrt(kl[~below] ** 2 - kap[~below] ** 2)
        be[~below], bo[~below] = _tan_forms(q)
    return be, bo


def mesa_logderivs_exact(channel: Channel, kL: float,
                         kappaNL: float) -> LogDerivativePair:
    """Exact mesa logarithmic derivatives for one parameter point."""
    if not kL > 0:
        raise ValueError("kL must be positive")
    be, bo = mesa_logderivs_batch(channel, kL, kappaNL)
    return LogDerivativePair(float(be[0]), float(bo[0]))


def mesa_amplitudes(channel: Channel, kL: float, kappaNL: float) -> ChannelAmplitudes:
    be, bo = mesa_logderivs_batch(channel, kL, kappaNL)
    r, t = _amplitudes_arrays(be, bo, np.asarray([kL]))
    return ChannelAmplitudes(complex(r[0]), complex(t[0]))


def mesa_t2_minus(kappaNL, k_over_kappa_n: float):
    """|t_-|^2 along a scan of kappa_n L at fixed k/kappa_n."""
    kap = np.asarray(kappaNL, dtype=float)
    kl = k_over_kappa_n * kap
    be, bo = mesa_logderivs_batch(Channel.MINUS, kl, kap)
    _, t = _amplitudes_arrays(be, bo, kl)
    return np.abs(t) ** 2


def mesa_resonance_positions(k_over_kappa_n: float, j_range) -> list[float]:
    """Transmission resonance positions in kappa_n L near j*pi, located by
    maximizing |t_-|^2 (golden-section).

    Sharp statement holds for k << kappa_n; the exact maxima sit a factor
    1/sqrt(1 + (k/kappa_n)^2) below j*pi.
    """
    out = []
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    for j in j_range:
        if j < 1:
            continue
        lo = j * np.pi - 0.5
        hi = j * np.pi + 0.5
        a, b = lo, hi
        c = b - inv_phi * (b - a)
        d = a + inv_phi * (b - a)
        fc = mesa_t2_minus(c, k_over_kappa_n)
        fd = mesa_t2_minus(d, k_over_kappa_n)
        while b - a > 1e-12 * b:
            if fc > fd:
                b, d, fd = d, c, fc
                c = b - inv_phi * (b - a)
                fc = mesa_t2_minus(c, k_over_kappa_n)
            else:
                a, c, fc = c, d, fd
                d = a + inv_phi * (b - a)
                fd = mesa_t2_minus(d, k_over_kappa_n)
        out.append(float(0.5 * (a + b)))
    return out
