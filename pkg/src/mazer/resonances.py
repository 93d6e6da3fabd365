"""Locate and characterize transmission resonances of the well channel.

A resonance is a maximum of |t_-|^2 along kappa_n L at fixed k/kappa_n.  The
finder scans a grid fine enough to resolve the expected widths, brackets the
local maxima, refines each by golden section, and measures the full width at
half maximum by bisection on the half-height crossings.  Parity comes from
which logarithmic derivative is small at the peak.

The analytic localization condition for the sinusoidal mode,

    (kappa_n L / pi) * I(k/kappa_n) = m pi/2 + pi/12,    m = 0, 1, 2, ...

is linear in kappa_n L, so its roots are available in closed form once the
quadrature I is known; they double as a completeness check (every in-window
root must be matched by a detected peak, else the scan was too coarse).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mesa import mesa_logderivs_batch
from .profiles import MESA, ModeProfile
from .scattering import Channel, _amplitudes_arrays, logderivs_batch
from .semiclassical import minus_amplitudes_auto, wkb_integral

PI = math.pi

#: grid points per expected resonance width.
POINTS_PER_WIDTH = 25
#: seed width 4 k/kappa_n (the mesa value), inflated for the sinusoidal mode
#: whose resonances are wider.
SINUSOIDAL_WIDTH_FACTOR = 4.0
#: rises smaller than this are integrator noise, not structure.
NOISE_FLOOR = 3e-8

EVEN = "even"
ODD = "odd"


class WindowTooCoarse(RuntimeError):
    """A predicted resonance in the window has no detected peak."""

    def __init__(self, message, missing):
        super().__init__(message)
        self.missing = missing


@dataclass(frozen=True)
class ResonanceInfo:
    """One detected transmission resonance (positions in kappa_n L)."""

    position: float
    fwhm: float
    parity: str
    index: int
    peak_value: float
    shallow: bool


def resonance_condition_roots(k_over_kappa_n: float, m_range) -> list[float]:
    """Closed-form roots of the sinusoidal localization condition for each m."""
    if k_over_kappa_n < 0:
        raise ValueError("k/kappa_n must be nonnegative")
    I = wkb_integral(float(k_over_kappa_n))
    return [PI * (m * PI / 2.0 + PI / 12.0) / I for m in m_range]


def _evaluators(profile: ModeProfile, k_over_kappa_n: float, engine: str):
    """(t2(kappaNL array), betas(kappaNL scalar)) for the chosen engine.

    The mesa closed forms are exact, so both engines share them there.
    """
    engine = engine.lower()
    if engine not in ("exact", "semiclassical"):
        raise ValueError(f"unknown engine {engine!r}")

    if profile.kind == MESA:
        def t2(kap):
            kap = np.atleast_1d(np.asarray(kap, dtype=float))
            kl = k_over_kappa_n * kap
            be, bo = mesa_logderivs_batch(Channel.MINUS, kl, kap)
            _, t = _amplitudes_arrays(be, bo, kl)
            return np.abs(t) ** 2

        def betas(kap):
            kl = k_over_kappa_n * kap
            be, bo = mesa_logderivs_batch(Channel.MINUS, kl, kap)
            return float(be[0]), float(bo[0])

    elif engine == "exact":
        def t2(kap):
            kap = np.atleast_1d(np.asarray(kap, dtype=float))
            kl = k_over_kappa_n * kap
            be, bo = logderivs_batch(profile, kl, kap, Channel.MINUS)
            _, t = _amplitudes_arrays(be, bo, kl)
            return np.abs(t) ** 2

        def betas(kap):
            be, bo = logderivs_batch(profile, np.atleast_1d(k_over_kappa_n * kap),
                                     np.atleast_1d(kap), Channel.MINUS)
            return float(be[0]), float(bo[0])

    else:
        def t2(kap):
            kap = np.atleast_1d(np.asarray(kap, dtype=float))
            out = np.empty(kap.shape)
            for i, kv in enumerate(kap):
                amp = minus_amplitudes_auto(profile, k_over_kappa_n * kv, kv)
                out[i] = abs(amp.t) ** 2
            return out

        def betas(kap):
            from .semiclassical import (XI_LARGE, XI_SMALL, airy_logderivs,
                                        large_xi_logderivs, point_for,
                                        small_xi_logderivs)
            pt = point_for(profile, k_over_kappa_n * kap, kap)
            if pt.xi < XI_SMALL:
                pair = small_xi_logderivs(pt)
            elif pt.xi > XI_LARGE:
                pair = large_xi_logderivs(pt)
            else:
                pair = airy_logderivs(pt)
            return pair.betaE_timesL, pair.betaO_timesL

    return t2, betas


def _golden_max(f, a, b, rel_tol=1e-6):
    """Position and value of the maximum of f on [a, b]."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc = float(f(c))
    fd = float(f(d))
    while (b - a) > rel_tol * 1e-2 * max(abs(a), abs(b), 1e-12):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = float(f(c))
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = float(f(d))
    x = 0.5 * (a + b)
    return x, float(f(x))


def _bisect_half(f, half, x_in, x_out, tol=1e-9):
    """Crossing of f = half between x_in (above half) and x_out (below)."""
    if not (float(f(x_in)) >= half and float(f(x_out)) < half):
        return math.nan
    for _ in range(80):
        m = 0.5 * (x_in + x_out)
        if float(f(m)) >= half:
            x_in = m
        else:
            x_out = m
        if abs(x_in - x_out) < tol:
            break
    return 0.5 * (x_in + x_out)


def predicted_positions(profile: ModeProfile, k_over_kappa_n: float,
                        lo: float, hi: float) -> list[tuple[int, float]]:
    """(index, predicted kappa_n L) inside [lo, hi]: j*pi for the mesa,
    the localization-condition roots for the sinusoidal mode."""
    if profile.kind == MESA:
        return [(j, j * PI) for j in range(max(1, math.ceil(lo / PI)),
                                           math.floor(hi / PI) + 1)]
    I = wkb_integral(float(k_over_kappa_n))
    m_lo = math.ceil((lo * I / PI - PI / 12.0) / (PI / 2.0))
    m_hi = math.floor((hi * I / PI - PI / 12.0) / (PI / 2.0))
    return [(m, PI * (m * PI / 2.0 + PI / 12.0) / I)
            for m in range(max(0, m_lo), m_hi + 1)]


def find_resonances(profile: ModeProfile, k_over_kappa_n: float,
                    window: tuple[float, float], engine: str = "exact",
                    grid_step: float | None = None) -> list[ResonanceInfo]:
    """Detect all |t_-|^2 resonances in a kappa_n L window.

    Peaks whose maximum falls below 0.5 are reported with shallow=True
    rather than dropped (overlapping resonances at large kappa_n L smear the
    curve and the smeared structure is still wanted downstream); their FWHM
    is NaN when the curve never falls below half height on one side.
    """
    lo, hi = window
    if not (hi > lo > 0):
        raise ValueError("window must satisfy 0 < lo < hi")
    t2, betas = _evaluators(profile, k_over_kappa_n, engine)
    f1 = lambda x: t2(np.asarray([x]))[0]

    seed_width = 4.0 * k_over_kappa_n
    if profile.kind != MESA:
        seed_width *= SINUSOIDAL_WIDTH_FACTOR
    step = grid_step if grid_step is not None else seed_width / POINTS_PER_WIDTH

    for _scan_pass in range(2):
        n = max(int(math.ceil((hi - lo) / step)) + 1, 8)
        grid = np.linspace(lo, hi, n)
        y = t2(grid)
        ipk = [i for i in range(1, n - 1)
               if y[i] > y[i - 1] and y[i] >= y[i + 1]
               and y[i] - min(y[max(0, i - 3):i + 4]) > NOISE_FLOOR]
        results = []
        for which, i in enumerate(ipk):
            pos, peak = _golden_max(f1, grid[i - 1], grid[i + 1])
            half = peak / 2.0
            lo_idx = ipk[which - 1] if which > 0 else 0
            hi_idx = ipk[which + 1] if which < len(ipk) - 1 else n - 1
            left = right = math.nan
            jj = i
            while jj > lo_idx and y[jj] >= half:
                jj -= 1
            if y[jj] < half:
                left = _bisect_half(f1, half, pos, grid[jj])
            jj = i
            while jj < hi_idx and y[jj] >= half:
                jj += 1
            if y[jj] < half:
                right = _bisect_half(f1, half, pos, grid[jj])
            fwhm = right - left if math.isfinite(left) and math.isfinite(right) \
                else math.nan
            be, bo = betas(pos)
            parity = EVEN if abs(be) < abs(bo) else ODD
            results.append((pos, fwhm, parity, peak))

        widths = [w for _, w, _, _ in results if math.isfinite(w)]
        if grid_step is not None or not widths \
                or min(widths) >= step * POINTS_PER_WIDTH:
            break
        # seed under-resolved the narrowest measured width: rescan once
        step = min(widths) / (POINTS_PER_WIDTH + 5)

    preds = predicted_positions(profile, k_over_kappa_n, lo, hi)
    positions = [r[0] for r in results]
    spacing = PI if profile.kind == MESA \
        else PI * (PI / 2.0) / wkb_integral(k_over_kappa_n)
    missing = [(idx, p) for idx, p in preds
               if lo + seed_width <= p <= hi - seed_width
               and (not positions or min(abs(q - p) for q in positions) > spacing / 2.0)]
    if missing:
        raise WindowTooCoarse(
            f"{len(missing)} predicted resonance(s) without a detected peak "
            f"(first at kappa_n L = {missing[0][1]:.4f}); refine the scan grid",
            missing)

    out = []
    for pos, fwhm, parity, peak in results:
        idx = min(preds, key=lambda jp: abs(jp[1] - pos))[0] if preds else 0
        out.append(ResonanceInfo(position=pos, fwhm=fwhm, parity=parity,
                                 index=idx, peak_value=peak,
                                 shallow=peak < 0.5))
    return sorted(out, key=lambda r: r.position)
