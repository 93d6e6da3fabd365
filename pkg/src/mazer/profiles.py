"""Longitudinal cavity mode profiles u(z).

Everything is nondimensionalized: positions are z/L, so the cavity occupies
|z/L| <= 1/2 and both profiles satisfy the area normalization
integral of u over the cavity = 1 (i.e. the area under u(z) equals L).

Two profiles are supported:

  mesa        u = 1 inside the cavity, 0 outside (sharp edges)
  sinusoidal  u = (pi/2) cos(pi z/L) inside, 0 outside (one antinode)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MESA = "mesa"
SINUSOIDAL = "sinusoidal"

# kernel ids, see _kernels.rk4_logderiv_batch
_KIND_IDS = {MESA: 0, SINUSOIDAL: 1}


@dataclass(frozen=True)
class ModeProfile:
    """Spatial mode function u(z/L) of the cavity field.

    half_width is the cavity half-width in units of L; it is 1/2 by
    construction and kept as an explicit field so geometric quantities read
    off the profile rather than a scattered constant.
    """

    kind: str
    half_width: float = 0.5

    def __post_init__(self):
        if self.kind not in _KIND_IDS:
            raise ValueError(f"unknown profile kind {self.kind!r}; "
                             f"expected one of {sorted(_KIND_IDS)}")

    @property
    def kind_id(self) -> int:
        return _KIND_IDS[self.kind]

    @property
    def peak(self) -> float:
        """max u, attained at z = 0."""
        return 1.0 if self.kind == MESA else np.pi / 2

    def __call__(self, z_over_l):
        return evaluate_profile(self, z_over_l)


def from_name(name: str) -> ModeProfile:
    return ModeProfile(name.strip().lower())


def evaluate_profile(profile: ModeProfile, z_over_l):
    """u at z/L.  Accepts scalars or arrays.

    The mesa edge at |z/L| = 1/2 returns the inside value 1 by convention
    (measure-zero choice; the integrator never straddles the edge).
    """
    z = np.asarray(z_over_l, dtype=float)
    a = profile.half_width
    if profile.kind == MESA:
        u = np.where(np.abs(z) <= a, 1.0, 0.0)
    else:
        u = np.where(np.abs(z) < a, (np.pi / 2) * np.cos(np.pi * z), 0.0)
    return u if u.ndim else float(u)


def turning_points(profile: ModeProfile, k_over_kappa_n: float) -> float | None:
    """Classical turning point a/L of the barrier channel, k^2 = kappa_n^2 u(a).

    Returns None when the atom passes over the barrier (no turning point);
    that is a valid outcome, not an error.
    """
    if k_over_kappa_n < 0:
        raise ValueError("k/kappa_n must be nonnegative")
    r2 = k_over_kappa_n ** 2
    if profile.kind == MESA:
        return profile.half_width if k_over_kappa_n < 1.0 else None
    arg = 2.0 * r2 / np.pi
    if arg > 1.0:
        return None
    return float(np.arccos(arg) / np.pi)
