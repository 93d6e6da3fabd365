"""Field-state weights, ensemble averages, and the micromaser pump/loss
balance driven by the scattering gain curve.

The photon ladder obeys

  dp_n/dt = r (p_{n-1} g_{n-1} - p_n g_n)
            - (w/Q)(n_b+1) [n p_n - (n+1) p_{n+1}]
            - (w/Q) n_b    [(n+1) p_n - n p_{n-1}]

with g_n the one-atom emission probability with n photons present and
p_{-1} = 0.  The thermal absorption term couples p_{n-1} upward; that index
convention is the unique one stationary under

  p_n = p_0 prod_{j=1}^{n} (n_b + N_ex g_{j-1}/j) / (n_b + 1),  N_ex = r Q / w,

which is verified directly by the stationarity tests.  Products are taken in
log space so N_ex ~ 1e3 populations far into the tail stay representable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_TAIL_TOL = 1e-12


class GainCurveExhausted(RuntimeError):
    """The supplied gain curve is shorter than the support of the stationary
    distribution; carries the number of entries needed so far."""

    def __init__(self, needed: int):
        super().__init__(f"gain curve exhausted; need at least {needed} entries")
        self.needed = needed


class NonNormalizable(RuntimeError):
    """Stationary recursion still growing at the photon-number ceiling."""


class StepSizeFailure(RuntimeError):
    """Master-equation step produced probabilities below -1e-12."""


@dataclass(frozen=True)
class FieldState:
    """Initial cavity field: photon-number weights |c_n|^2.

    kind is one of "number", "coherent", "thermal"; param is the photon
    number, the coherent mean n-bar, or the thermal mean n_b respectively.
    truncation may be given explicitly; it is raised automatically until the
    discarded tail mass is below 1e-12.
    """

    kind: str
    param: float
    truncation: int | None = None

    def __post_init__(self):
        if self.kind not in ("number", "coherent", "thermal"):
            raise ValueError(f"unknown field state kind {self.kind!r}")
        if self.param < 0:
            raise ValueError("state parameter must be nonnegative")
        if self.kind == "number" and int(self.param) != self.param:
            raise ValueError("number state needs an integer photon number")


def field_weights(state: FieldState) -> np.ndarray:
    """Weights |c_n|^2 for n = 0..N_max, renormalized to sum exactly 1."""
    if state.kind == "number":
        n = int(state.param)
        size = max(n + 1, (state.truncation or 0) + 1)
        w = np.zeros(size)
        w[n] = 1.0
        return w

    if state.kind == "coherent":
        nbar = state.param
        if nbar == 0.0:
            return field_weights(FieldState("number", 0, state.truncation))
        w = [math.exp(-nbar)]
        while sum(w) < 1.0 - _TAIL_TOL or (state.truncation is not None
                                           and len(w) <= state.truncation):
            w.append(w[-1] * nbar / len(w))
            if len(w) > 100000:
                raise NonNormalizable("coherent-state truncation ran away")
        w = np.asarray(w)
        return w / w.sum()

    nb = state.param
    if nb == 0.0:
        return field_weights(FieldState("number", 0, state.truncation))
    ratio = nb / (nb + 1.0)
    # tail mass beyond N is ratio^(N+1); choose N so it is < 1e-12
    n_max = int(math.ceil(math.log(_TAIL_TOL) / math.log(ratio))) + 1
    if state.truncation is not None:
        n_max = max(n_max, state.truncation)
    n = np.arange(n_max + 1)
    w = ratio ** n / (nb + 1.0)
    return w / w.sum()


def ensemble_average(weights, per_n) -> float:
    """Sum of weights[n] * per_n[n]; lengths must match."""
    w = np.asarray(weights, dtype=float)
    q = np.asarray(per_n, dtype=float)
    if w.shape != q.shape:
        raise ValueError(f"length mismatch: {w.shape} weights vs {q.shape} values")
    return float(np.dot(w, q))


def conventional_emission(rabi_angle) -> float | np.ndarray:
    """Hot-atom (Rabi-flopping) emission probability sin^2(theta_n), with
    theta_n = kappa_n^2 L / (2k) in nondimensional form."""
    out = np.sin(np.asarray(rabi_angle, dtype=float)) ** 2
    return out if out.ndim else float(out)


def conventional_gain(kappa0L: float, k_over_kappa0: float, count: int) -> np.ndarray:
    """Conventional-micromaser gain curve g_n = sin^2((kappa_n L)^2/(2 kL))."""
    n = np.arange(count)
    kap = kappa0L * (n + 1) ** 0.25
    kl = k_over_kappa0 * kappa0L
    return conventional_emission(kap ** 2 / (2.0 * kl))


@dataclass(frozen=True)
class PhotonDistribution:
    """Probabilities per photon number, 0..N_max."""

    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "p", p)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("p must be a nonempty 1-d array")
        if np.any(p < -1e-12):
            raise ValueError("negative probability entry")
        if abs(p.sum() - 1.0) > 1e-8:
            raise ValueError(f"probabilities sum to {p.sum()}, not 1")

    @property
    def n_max(self) -> int:
        return self.p.size - 1

    def mean(self) -> float:
        return float(np.dot(np.arange(self.p.size), self.p))


@dataclass(frozen=True)
class MicromaserConfig:
    """Pump/loss configuration: N_ex = r Q / w atoms per cavity lifetime,
    thermal occupation n_b, and the gain curve g_n.

    rate_r and loss_rate are only needed for time evolution; when both are
    given they must reproduce nex to 1e-12 relative.
    """

    nex: float
    nb: float
    gain: np.ndarray = field(repr=False)
    rate_r: float | None = None
    loss_rate: float | None = None

    def __post_init__(self):
        if self.nex < 0 or self.nb < 0:
            raise ValueError("nex and nb must be nonnegative")
        g = np.asarray(self.gain, dtype=float)
        object.__setattr__(self, "gain", g)
        if np.any(g < -1e-12) or np.any(g > 1.0 + 1e-12):
            raise ValueError("gain entries must lie in [0, 1]")
        if self.rate_r is not None and self.loss_rate is not None:
            implied = self.rate_r / self.loss_rate
            if abs(implied - self.nex) > 1e-12 * max(1.0, abs(self.nex)):
                raise ValueError(f"nex={self.nex} inconsistent with "
                                 f"r/loss={implied}")


def steady_state_distribution(config: MicromaserConfig,
                              nmax_ceiling: int = 1_000_000) -> PhotonDistribution:
    """Stationary photon distribution of the pump/loss balance.

    Computed from the detailed-balance recursion in log space and normalized;
    the support is grown until the tail mass drops below 1e-12 of the total.
    Raises GainCurveExhausted when the gain curve ends before the tail
    converges, and NonNormalizable at the hard photon-number ceiling.
    """
    nex, nb, g = config.nex, config.nb, config.gain
    log_down = math.log(nb + 1.0)
    logs = [0.0]
    peak = 0.0
    # stop after a sustained deeply-sub-peak, contracting stretch; a single
    # late resonant gain spike (a near-coincidence at some higher n) then
    # still gets captured because the counter resets on every growth step
    deep = math.log(_TAIL_TOL) - 5.0
    quiet = 0
    n = 1
    while True:
        if n > nmax_ceiling:
            raise NonNormalizable(
                f"stationary recursion still growing at n = {nmax_ceiling}")
        if n - 1 >= g.size:
            raise GainCurveExhausted(n)
        up = nb + nex * g[n - 1] / n
        if up == 0.0:
            break  # exact cutoff: all higher populations vanish
        ratio_log = math.log(up) - log_down
        logs.append(logs[-1] + ratio_log)
        peak = max(peak, logs[-1])
        if ratio_log < math.log(0.95) and logs[-1] - peak < deep:
            quiet += 1
            if quiet >= 30:
                break
        else:
            quiet = 0
        n += 1
    logp = np.asarray(logs)
    logp -= logp.max()
    p = np.exp(logp)
    return PhotonDistribution(p / p.sum())


def master_equation_rhs(p: np.ndarray, config: MicromaserConfig) -> np.ndarray:
    """Right-hand side of the photon master equation on a closed ladder.

    The top rung has its upward flows (gain and thermal absorption) switched
    off so probability is conserved exactly on the truncated support; choose
    the truncation deep in the tail for faithful physics.
    """
    if config.rate_r is None or config.loss_rate is None:
        raise ValueError("time evolution needs rate_r and loss_rate")
    N = p.size
    if config.gain.size < N:
        raise GainCurveExhausted(N)
    g = config.gain[:N]
    n = np.arange(N)
    up = config.rate_r * g * p + config.loss_rate * config.nb * (n + 1) * p
    up[-1] = 0.0
    down = config.loss_rate * (config.nb + 1.0) * n * p
    dp = -(up + down)
    dp[1:] += up[:-1]
    dp[:-1] += down[1:]
    return dp


def evolve_master_equation(p0: PhotonDistribution, config: MicromaserConfig,
                           t_end: float, max_steps: int = 20_000_000
                           ) -> PhotonDistribution:
    """Integrate the master equation to t_end with fixed-step RK4, step
    bounded by 0.1 / max total outflow rate."""
    p = p0.p.copy()
    N = p.size
    n = np.arange(N)
    g = config.gain[:N] if config.gain.size >= N else None
    if g is None:
        raise GainCurveExhausted(N)
    out_rate = (config.rate_r * g
                + config.loss_rate * (config.nb * (n + 1) + (config.nb + 1.0) * n))
    max_rate = float(np.max(out_rate))
    if max_rate == 0.0 or t_end <= 0.0:
        return PhotonDistribution(p)
    h = 0.1 / max_rate
    steps = int(math.ceil(t_end / h))
    if steps > max_steps:
        raise StepSizeFailure(f"{steps} steps needed, exceeds {max_steps}")
    h = t_end / steps
    for _ in range(steps):
        k1 = master_equation_rhs(p, config)
        k2 = master_equation_rhs(p + 0.5 * h * k1, config)
        k3 = master_equation_rhs(p + 0.5 * h * k2, config)
        k4 = master_equation_rhs(p + h * k3, config)
        p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if float(p.min()) < -1e-12:
            raise StepSizeFailure(
                f"negative probability {p.min():.3e} during evolution")
    return PhotonDistribution(p)
