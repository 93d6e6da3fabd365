"""Semiclassical approximation chain for the well (-) and barrier (+)
channels: WKB interior, linear-edge (Airy/Bessel) matching at the cavity
boundary, and the closed-form amplitude limits for weak and strong quantum
reflection.

Phase convention
----------------
The WKB phase phi is the positive half-cavity action

    phi = integral_0^{L/2} sqrt(k^2 + kappa_n^2 u(z)) dz  > 0.

The edge-matching ratios are evaluated at the edge-to-center orientation of
that phase, i.e. at -(phi + w0), where w0 = 1/(3 xi) is the action of the
linear-edge model accumulated between the cavity boundary and its virtual
turning point.  Including w0 is what makes the Bessel evaluation reduce to
both closed-form limits; dropping it breaks the oscillatory limit entirely.
With this orientation the transmission resonances fall at
phi = m pi/2 + pi/12, which exact numerics confirm.

The limit formulas below therefore read, in terms of the positive phi,

    xi << 1:  beta_e ~ -k (xi/2 - tan phi),   beta_o ~ -k (xi/2 + cot phi)
    xi >> 1:  beta_e ~ +alpha k xi^(1/3) chi(-psi),
              beta_o ~ +alpha k xi^(1/3) chi(-psi + pi/2),  psi = phi + w0

with chi(x) = -sin(x + pi/12)/cos(x - pi/12).  Both parities carry the same
overall sign in the strong-quantum limit; the closed-form amplitudes are
produced by feeding these beta values through the standard r/t formulas,
which keeps them exactly unitary and puts full transmission (not full
reflection) at the beta zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from .profiles import MESA, ModeProfile, turning_points
from .scattering import (Channel, ChannelAmplitudes, LogDerivativePair,
                         amplitudes_from_logderivs)

PI = math.pi

#: auto-engine regime boundaries: closed forms outside, full Bessel
#: evaluation in the band where neither series limit is accurate.
XI_SMALL = 0.2
XI_LARGE = 5.0


class AboveBarrier(ValueError):
    """Barrier formulas need a classical turning point; above the barrier the
    exact integrator should be used instead."""


def xi_parameter(kL: float, kappaNL: float) -> float:
    """Quantum-reflection parameter pi^2 (kappa_n/k)^3 / (4 kappa_n L)."""
    if not (kL > 0 and kappaNL > 0):
        raise ValueError("kL and kappaNL must be positive")
    return PI ** 2 * (kappaNL / kL) ** 3 / (4.0 * kappaNL)


@lru_cache(maxsize=4096)
def wkb_integral(rho: float) -> float:
    """I(rho) = integral_0^{pi/2} sqrt(rho^2 + (pi/2) cos(theta)) dtheta.

    The half-cavity phase of the sinusoidal well is (kappa_n L / pi) I(rho).
    Cached: sweeps at fixed k/kappa_n reuse a single quadrature.
    """
    f = lambda th: math.sqrt(rho * rho + (PI / 2.0) * math.cos(th))
    tol = 1e-12 * max(1.0, rho)  # absolute target scaled to the integral size
    return specfun.integrate_sqrt_endpoints(f, 0.0, PI / 2.0, tol,
                                            left=False, right=True)


def wkb_phase(profile: ModeProfile, kL: float, kappaNL: float) -> float:
    """Positive half-cavity WKB phase of the well channel."""
    if not (kL > 0 and kappaNL >= 0):
        raise ValueError("kL must be positive and kappaNL nonnegative")
    if kappaNL == 0.0:
        return 0.5 * kL
    if profile.kind == MESA:
        return 0.5 * math.hypot(kL, kappaNL)
    return kappaNL * wkb_integral(kL / kappaNL) / PI


def chi(phi: float) -> float:
    """Connection ratio -sin(phi + pi/12)/cos(phi - pi/12); pi-periodic.
    Poles map to signed infinity, which downstream Moebius forms absorb."""
    num = -math.sin(phi + PI / 12.0)
    den = math.cos(phi - PI / 12.0)
    if den == 0.0:
        return math.inf if num < 0 else -math.inf
    return num / den


@dataclass(frozen=True)
class SemiclassicalPoint:
    """(xi, phi) for one (kL, kappa_n L) pair of the sinusoidal well."""

    xi: float
    phi: float
    kappaNL: float
    kL: float

    def __post_init__(self):
        if not (self.xi > 0 and self.phi >= 0):
            raise ValueError("xi must be positive and phi nonnegative")
        ref = xi_parameter(self.kL, self.kappaNL)
        if abs(self.xi - ref) > 1e-12 * ref:
            raise ValueError(f"xi={self.xi} inconsistent with kL={self.kL}, "
                             f"kappaNL={self.kappaNL} (expected {ref})")

    @property
    def edge_action(self) -> float:
        """w0 = 1/(3 xi), the linear-edge action between boundary and
        virtual turning point."""
        return 1.0 / (3.0 * self.xi)


def point_for(profile: ModeProfile, kL: float, kappaNL: float) -> SemiclassicalPoint:
    return SemiclassicalPoint(xi=xi_parameter(kL, kappaNL),
                              phi=wkb_phase(profile, kL, kappaNL),
                              kappaNL=kappaNL, kL=kL)


def _connection_pair(psi: float, odd: bool):
    """Unnormalized (A, B) with A/B = chi(-psi) (even) or chi(-psi + pi/2)
    (odd); evaluating the pair rather than the ratio removes the chi poles."""
    if odd:
        psi = psi + PI / 2.0
    return math.sin(psi - PI / 12.0), math.cos(psi + PI / 12.0)


def airy_logderivs(point: SemiclassicalPoint) -> LogDerivativePair:
    """Well-channel logarithmic derivatives from the linear-edge solution:

        beta = k (xi + [A J'_{1/3} + B J'_{-1/3}] / [A J_{1/3} + B J_{-1/3}])

    at argument 1/(3 xi), with the connection pair taken at psi = phi + w0.
    Uniformly valid across the xi ~ 1 crossover; reduces to the closed-form
    limits on both sides.
    """
    x0 = 1.0 / (3.0 * point.xi)
    j13, dj13 = specfun.bessel_J_third(1 / 3, x0)
    jm13, djm13 = specfun.bessel_J_third(-1 / 3, x0)
    psi = point.phi + point.edge_action
    out = []
    for odd in (False, True):
        a, b = _connection_pair(psi, odd)
        num = a * dj13 + b * djm13
        den = a * j13 + b * jm13
        ratio = num / den if den != 0.0 else math.copysign(math.inf, num)
        out.append(point.kL * (point.xi + ratio))
    return LogDerivativePair(out[0], out[1])


def small_xi_logderivs(point: SemiclassicalPoint) -> LogDerivativePair:
    """Oscillatory-edge limit of airy_logderivs (xi << 1)."""
    k, xi, phi = point.kL, point.xi, point.phi
    return LogDerivativePair(-k * (xi / 2.0 - math.tan(phi)),
                             -k * (xi / 2.0 + 1.0 / math.tan(phi)))


def large_xi_logderivs(point: SemiclassicalPoint) -> LogDerivativePair:
    """Turning-point-edge limit of airy_logderivs (xi >> 1)."""
    k, xi = point.kL, point.xi
    s = specfun.ALPHA * xi ** (1.0 / 3.0)
    psi = point.phi + point.edge_action
    return LogDerivativePair(k * s * chi(-psi), k * s * chi(-psi + PI / 2.0))


def small_xi_amplitudes(point: SemiclassicalPoint) -> ChannelAmplitudes:
    """Well-channel amplitudes in the weak-quantum-reflection regime,
    evaluated at the edge-oriented phase."""
    xi, kL = point.xi, point.kL
    ph = -point.phi
    den = ((xi / 4.0) ** 2 * np.exp(-2j * ph)
           + (1.0 + 1j * xi / 4.0) ** 2 * np.exp(2j * ph))
    t = np.exp(-1j * kL) / den
    r = -1j * (xi / 4.0) * (math.cos(2 * ph) + (xi / 4.0) * math.sin(2 * ph)) * t
    return ChannelAmplitudes(complex(r), complex(t))


def large_xi_amplitudes(point: SemiclassicalPoint) -> ChannelAmplitudes:
    """Well-channel amplitudes in the strong-quantum-reflection regime.

    Formed by feeding the large-xi beta pair through the exact r/t formulas
    in a form scaled by the chi denominators, so chi poles are removable and
    |r|^2 + |t|^2 = 1 holds identically.
    """
    kL, xi = point.kL, point.xi
    s = specfun.ALPHA * xi ** (1.0 / 3.0)
    psi = point.phi + point.edge_action
    n1, d1 = _connection_pair(psi, odd=False)
    n2, d2 = _connection_pair(psi, odd=True)
    den = (d1 - 1j * s * n1) * (d2 - 1j * s * n2)
    phase = np.exp(-1j * kL)
    r = (d1 * d2 + s * s * n1 * n2) / den * phase
    t = 1j * s * (n1 * d2 - n2 * d1) / den * phase
    return ChannelAmplitudes(complex(r), complex(t))


def barrier_penetration(profile: ModeProfile, kL: float, kappaNL: float) -> float:
    """Theta = exp(-integral across the barrier of sqrt(kappa_n^2 u - k^2)).

    Requires a classical turning point; raises AboveBarrier otherwise.
    """
    if not (kL > 0 and kappaNL > 0):
        raise ValueError("kL and kappaNL must be positive")
    a = turning_points(profile, kL / kappaNL)
    if a is None:
        raise AboveBarrier(
            f"k/kappa_n = {kL / kappaNL:.4g} passes over the barrier; "
            "use the exact integrator for the + channel here")
    if profile.kind == MESA:
        action = math.sqrt(kappaNL ** 2 - kL ** 2)
    else:
        f = lambda z: math.sqrt(max(
            kappaNL ** 2 * (PI / 2.0) * math.cos(PI * z) - kL ** 2, 0.0))
        action = specfun.integrate_sqrt_endpoints(f, -a, a, 1e-10)
    return math.exp(-action) if action < 700.0 else 0.0


def barrier_amplitudes(profile: ModeProfile, kL: float,
                       kappaNL: float) -> ChannelAmplitudes:
    """WKB barrier-channel amplitudes: beta_{e,o} = -k (1 -/+ Theta), then
    the standard r/t formulas; r ~ -i e^{-ikL}, |t| ~ Theta.

    Valid where the cavity edge is many edge-model wavelengths from the
    turning point (w0 >~ 1); at w0 << 1 prefer airy_barrier_logderivs.
    """
    theta = barrier_penetration(profile, kL, kappaNL)
    pair = LogDerivativePair(-kL * (1.0 - theta), -kL * (1.0 + theta))
    return amplitudes_from_logderivs(pair, kL)


def airy_barrier_logderivs(profile: ModeProfile, kL: float,
                           kappaNL: float) -> LogDerivativePair:
    """Barrier-channel logarithmic derivatives from the linear-edge model.

    For the soft (sinusoidal) barrier at small k/kappa_n the cavity edge sits
    essentially at the classical turning point, so the edge values are Airy
    ratios at x0 = -(2 xi)^(-2/3) rather than the oscillatory WKB values:

        beta_{e,o} = k (2 xi)^(1/3) [Ai'(x0) +- (Theta/2) Bi'(x0)]
                                   / [Ai(x0)  +- (Theta/2) Bi(x0)]

    This reproduces the exact reflection phase where the plain WKB form
    (barrier_amplitudes) does not.  Mesa input is rejected: its edge is not
    linearizable and the closed forms are exact there anyway.
    """
    if profile.kind == MESA:
        raise ValueError("airy_barrier_logderivs applies to the soft barrier; "
                         "use the exact mesa closed forms")
    theta = barrier_penetration(profile, kL, kappaNL)
    xi = xi_parameter(kL, kappaNL)
    y = (2.0 * xi) ** (-2.0 / 3.0)
    ai, dai, bi, dbi = specfun.airy_neg(y)
    scale = kL * (2.0 * xi) ** (1.0 / 3.0)
    be = scale * (dai + 0.5 * theta * dbi) / (ai + 0.5 * theta * bi)
    bo = scale * (dai - 0.5 * theta * dbi) / (ai - 0.5 * theta * bi)
    return LogDerivativePair(be, bo)


def minus_amplitudes_auto(profile: ModeProfile, kL: float,
                          kappaNL: float) -> ChannelAmplitudes:
    """Well-channel amplitudes from the regime-appropriate approximation.

    Mesa input is exact (closed forms); for the sinusoidal mode the closed
    amplitude limits are used outside (XI_SMALL, XI_LARGE) and the full
    Bessel evaluation inside the band.
    """
    from .mesa import mesa_amplitudes
    if profile.kind == MESA:
        return mesa_amplitudes(Channel.MINUS, kL, kappaNL)
    if kappaNL == 0.0:
        return ChannelAmplitudes(0j, 1.0 + 0j)  # free particle
    xi = xi_parameter(kL, kappaNL)
    point = point_for(profile, kL, kappaNL)
    if xi < XI_SMALL:
        return small_xi_amplitudes(point)
    if xi > XI_LARGE:
        return large_xi_amplitudes(point)
    return amplitudes_from_logderivs(airy_logderivs(point), kL)
