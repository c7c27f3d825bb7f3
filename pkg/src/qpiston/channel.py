"""Reduced description of the piston mode: a gain/loss birth-death channel.

Once the qubit has settled at its carrier-line balance point, the piston
sees a linear amplifier channel with downward rate kappa_down and upward
rate kappa_up. The pair is parameterized by the drift gamma = kappa_down -
kappa_up and the diffusion D = kappa_up, so the occupation obeys
d<n>/dt = -gamma <n> + D and the amplitude d<a>/dt = -(gamma/2) <a>.
Negative gamma means gain.

Three propagation lanes are offered: a dense density-matrix integrator
with automatic truncation growth, a populations-only integrator for
number-diagonal states, and exact closed-form flow on the displaced
thermal family.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .baths import combined
from .dynamics import EngineParams, qubit_steady_state
from .errors import ConfigError, PositivityError, ValidationError
from .operators import (
    DensityMatrix,
    TAIL_TOL,
    annihilation,
    displaced_thermal_state,
    expectation,
    thermal_state,
)

logger = logging.getLogger("qpiston.channel")

EXTEND_THRESHOLD = 1e-10
POSITIVITY_ABORT = -1e-6
CHECK_INTERVAL = 100
DEFAULT_MAX_DIM = 512


@dataclass(frozen=True)
class PistonChannel:
    """Drift/diffusion pair for the reduced piston dynamics.

    ``allow_negative_kappa`` unlocks drift-dominated overrides whose
    downward rate gamma + D is negative. Such a generator is not a
    completely positive map; it is still a well-defined linear flow, and
    the dense propagator keeps its positivity monitor armed so any state
    actually leaving the physical set aborts the run.
    """

    gamma: float
    diffusion: float
    nu: float
    allow_negative_kappa: bool = False

    def __post_init__(self):
        if self.nu <= 0:
            raise ConfigError(f"nu must be positive, got {self.nu}")
        if self.diffusion < 0:
            raise ConfigError(f"diffusion must be nonnegative, got {self.diffusion}")
        if self.kappa_down < 0 and not self.allow_negative_kappa:
            raise ConfigError(
                f"kappa_down = gamma + D = {self.kappa_down:.3e} is negative; "
                f"pass allow_negative_kappa=True to accept a non-contractive override"
            )

    @property
    def kappa_up(self) -> float:
        return self.diffusion

    @property
    def kappa_down(self) -> float:
        return self.gamma + self.diffusion


def drift_diffusion(params: EngineParams, steady: tuple = None) -> tuple:
    """Half-rate drift and diffusion coefficients from the bath samples.

    gamma = (g/nu)^2 [ (G(nu+) - G(nu-)) p_e + (G(-nu-) - G(-nu+)) p_g ]
    D     = (g/nu)^2 [ G(nu-) p_e + G(-nu+) p_g ]

    where G is the combined bath response and (p_g, p_e) the carrier-line
    balance point. These are the coefficients of the occupation evolution
    in the convention where each sideband block carries a 1/2; see
    ``derive_channel`` for the matching factor.
    """
    if steady is None:
        steady = qubit_steady_state(params)
    p_g, p_e = steady
    baths_ = (params.cold, params.hot)
    ratio2 = (params.g / params.nu) ** 2
    g_up_plus = combined(baths_, params.nu_plus)
    g_up_minus = combined(baths_, params.nu_minus)
    g_dn_plus = combined(baths_, -params.nu_plus)
    g_dn_minus = combined(baths_, -params.nu_minus)
    gamma = ratio2 * ((g_up_plus - g_up_minus) * p_e + (g_dn_minus - g_dn_plus) * p_g)
    diffusion = ratio2 * (g_up_minus * p_e + g_dn_plus * p_g)
    return (gamma, diffusion)


def derive_channel(
    params: EngineParams,
    steady: tuple = None,
    halved_sidebands: bool = False,
    allow_negative_kappa: bool = False,
) -> PistonChannel:
    """Reduced channel consistent with the joint generator's normalization.

    The joint sideband blocks built without halving produce occupation
    drift at twice the half-rate coefficients, so the default doubles the
    ``drift_diffusion`` values; with ``halved_sidebands`` the coefficients
    are used as they stand.
    """
    gamma, diffusion = drift_diffusion(params, steady)
    factor = 1.0 if halved_sidebands else 2.0
    return PistonChannel(
        gamma=factor * gamma,
        diffusion=factor * diffusion,
        nu=params.nu,
        allow_negative_kappa=allow_negative_kappa,
    )


def _phi(x: np.ndarray) -> np.ndarray:
    """(exp(x) - 1)/x, stable through x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + 0.5 * x, np.expm1(safe) / safe)


def mean_occupation(ch: PistonChannel, t, n0: float):
    """Closed-form <n>(t) = n0 e^{-gamma t} + D t phi(-gamma t)."""
    t = np.asarray(t, dtype=float)
    x = -ch.gamma * t
    out = n0 * np.exp(x) + ch.diffusion * t * _phi(x)
    return out if out.ndim else float(out)


def mean_energy(ch: PistonChannel, t, initial_energy: float):
    """Closed-form piston energy nu <n>(t) from the initial energy."""
    return ch.nu * mean_occupation(ch, t, initial_energy / ch.nu)


def coherent_amplitude(ch: PistonChannel, t, alpha0: complex):
    """Closed-form <a>(t) = alpha0 e^{-gamma t / 2}."""
    t = np.asarray(t, dtype=float)
    out = alpha0 * np.exp(-0.5 * ch.gamma * t)
    return out if np.ndim(out) else complex(out)


def integrate_occupation(ch: PistonChannel, n0, times: np.ndarray, dt: float = None):
    """RK4 integration of d<n>/dt = -gamma <n> + D at the sample times.

    Kept as an independent numerical route to the closed form; ``n0`` may
    be a vector, in which case all trajectories step together.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ValidationError("times must be a 1d array")
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValidationError("times must start at 0 and increase")
    if dt is None:
        scale = abs(ch.gamma) + ch.diffusion
        dt = 0.05 / scale if scale > 0 else times[-1]
    n = np.array(n0, dtype=float)
    out = np.empty((times.size,) + n.shape, dtype=float)
    out[0] = n
    rhs = lambda y: -ch.gamma * y + ch.diffusion
    for i in range(1, times.size):
        span = times[i] - times[i - 1]
        steps = max(1, int(math.ceil(span / dt - 1e-12)))
        h = span / steps
        for _ in range(steps):
            k1 = rhs(n)
            k2 = rhs(n + 0.5 * h * k1)
            k3 = rhs(n + 0.5 * h * k2)
            k4 = rhs(n + h * k3)
            n = n + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i] = n
    return out


def _channel_rhs_ops(dim: int):
    a = annihilation(dim)
    ad = a.conj().T
    return a, ad, ad @ a, a @ ad


def _extend(rho: DensityMatrix, new_dim: int) -> DensityMatrix:
    out = np.zeros((new_dim, new_dim), dtype=complex)
    d = rho.shape[0]
    out[:d, :d] = rho
    return out


def _stability_cap(kd: float, ku: float, dim: int) -> float:
    """Largest safe RK4 step for a dim-level ladder.

    Gershgorin bounds the generator's spectral radius by
    2 (|kd| + |ku|) dim and RK4 reaches ~2.8 along the real axis, so
    1.2/((|kd| + |ku|) dim) keeps a margin.
    """
    s = (abs(kd) + abs(ku)) * dim
    return 1.2 / s if s > 0 else math.inf


def _segment_plan(remaining: float, h_request: float, cap: float):
    """Step size and count for the next monitored batch of RK4 steps."""
    h = min(h_request, cap) if h_request is not None else 0.25 * cap
    if not math.isfinite(h) or h <= 0:
        return remaining, 1
    steps = int(math.ceil(remaining / h - 1e-12))
    if steps <= CHECK_INTERVAL:
        return remaining / steps, steps
    return h, CHECK_INTERVAL


def channel_propagate(
    rho0: DensityMatrix,
    ch: PistonChannel,
    t_final: float,
    dt: float = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> DensityMatrix:
    """Dense integration of the reduced channel on a truncated ladder.

    The top Fock level is watched during the run; when it starts to
    populate, the ladder is enlarged in place (up to ``max_dim``) so gain
    runs are not silently clipped. ``dt`` is a request: whenever the
    ladder outgrows its stability cap the effective step shrinks to
    match. Positivity is monitored and a PositivityError aborts once an
    eigenvalue passes -1e-6.
    """
    rho = np.array(rho0, dtype=complex)
    dim = rho.shape[0]
    kd, ku = ch.kappa_down, ch.kappa_up
    if t_final < 0:
        raise ValidationError(f"t_final must be nonnegative, got {t_final}")

    a, ad, nda, nad = _channel_rhs_ops(dim)

    def rhs(r):
        return (
            kd * (a @ r @ ad - 0.5 * (nda @ r + r @ nda))
            + ku * (ad @ r @ a - 0.5 * (nad @ r + r @ nad))
        )

    t_done = 0.0
    while t_final - t_done > 1e-12 * max(1.0, t_final):
        h, steps = _segment_plan(t_final - t_done, dt, _stability_cap(kd, ku, dim))
        for _ in range(steps):
            k1 = rhs(rho)
            k2 = rhs(rho + 0.5 * h * k1)
            k3 = rhs(rho + 0.5 * h * k2)
            k4 = rhs(rho + h * k3)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_done += h * steps
        rho = 0.5 * (rho + rho.conj().T)
        tr = np.trace(rho).real
        if abs(tr - 1.0) > 1e-8:
            logger.warning(
                "channel trace drift %.3e at t=%.4g; renormalizing",
                abs(tr - 1.0),
                t_done,
            )
        rho = rho / tr
        w_min = float(np.linalg.eigvalsh(rho)[0])
        if w_min < POSITIVITY_ABORT:
            raise PositivityError(
                f"channel state eigenvalue {w_min:.3e} fell below "
                f"{POSITIVITY_ABORT:.0e} at t={t_done:.4g}"
            )
        if rho[dim - 1, dim - 1].real > EXTEND_THRESHOLD and dim < max_dim:
            dim = min(max_dim, max(dim + 8, int(1.3 * dim)))
            logger.info("extending channel ladder to %d levels", dim)
            rho = _extend(rho, dim)
            a, ad, nda, nad = _channel_rhs_ops(dim)
    if rho[dim - 1, dim - 1].real > TAIL_TOL:
        raise PositivityError(
            f"top-level population {rho[dim - 1, dim - 1].real:.3e} at the "
            f"dimension cap {dim}; result would be clipped"
        )
    return rho


def propagate_populations(
    p0: np.ndarray,
    ch: PistonChannel,
    t_final: float,
    dt: float = None,
    max_dim: int = 4096,
) -> np.ndarray:
    """Birth-death integration for states diagonal in the Fock basis.

    The channel never creates number coherences, so diagonal states stay
    diagonal and the full evolution lives on the populations vector:
    dp_n/dt = kd [(n+1) p_{n+1} - n p_n] + ku [n p_{n-1} - (n+1) p_n].
    The ladder auto-extends like the dense route and ``dt`` is likewise
    a request, shrunk when the ladder's stability cap demands it.
    """
    p = np.array(p0, dtype=float)
    if p.ndim != 1:
        raise ValidationError("populations must be a 1d vector")
    kd, ku = ch.kappa_down, ch.kappa_up
    if t_final < 0:
        raise ValidationError(f"t_final must be nonnegative, got {t_final}")

    # room for the early transient spread; lazy extension takes over later
    n0 = float(np.dot(np.arange(p.size), p))
    n_pred = max(n0, mean_occupation(ch, t_final, n0))
    dim_pred = min(max_dim, int(math.ceil(n_pred + 10.0 * math.sqrt(n_pred + 1.0) + 10)))
    if p.size < dim_pred:
        p = np.concatenate([p, np.zeros(dim_pred - p.size)])

    def make_rhs(d):
        n = np.arange(d, dtype=float)

        def rhs(q):
            out = -(kd * n + ku * (n + 1.0)) * q
            out[:-1] += kd * n[1:] * q[1:]
            out[1:] += ku * n[1:] * q[:-1]
            return out

        return rhs

    rhs = make_rhs(p.size)
    t_done = 0.0
    while t_final - t_done > 1e-12 * max(1.0, t_final):
        h, steps = _segment_plan(
            t_final - t_done, dt, _stability_cap(kd, ku, p.size)
        )
        for _ in range(steps):
            k1 = rhs(p)
            k2 = rhs(p + 0.5 * h * k1)
            k3 = rhs(p + 0.5 * h * k2)
            k4 = rhs(p + h * k3)
            p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_done += h * steps
        s = p.sum()
        if abs(s - 1.0) > 1e-8:
            logger.warning(
                "populations drifted off normalization by %.3e; rescaling",
                abs(s - 1.0),
            )
        p = p / s
        if p.min() < POSITIVITY_ABORT:
            raise PositivityError(
                f"population {p.min():.3e} fell below {POSITIVITY_ABORT:.0e} "
                f"at t={t_done:.4g}"
            )
        if p[-1] > EXTEND_THRESHOLD and p.size < max_dim:
            new = min(max_dim, max(p.size + 16, int(1.3 * p.size)))
            p = np.concatenate([p, np.zeros(new - p.size)])
            rhs = make_rhs(new)
    if p[-1] > TAIL_TOL:
        raise PositivityError(
            f"top-level population {p[-1]:.3e} at the dimension cap {p.size}"
        )
    return p


@dataclass(frozen=True)
class GaussianPistonState:
    """Displaced thermal state of the piston: amplitude plus thermal floor."""

    alpha: complex
    n_th: float

    def __post_init__(self):
        if self.n_th < -1e-12:
            raise ValidationError(f"thermal occupation must be nonnegative, got {self.n_th}")

    @property
    def mean_occupation(self) -> float:
        return abs(self.alpha) ** 2 + max(self.n_th, 0.0)

    def energy(self, nu: float) -> float:
        return nu * self.mean_occupation

    def max_work(self, nu: float) -> float:
        """Ergotropy of the family: all of it sits in the displacement."""
        return nu * abs(self.alpha) ** 2

    def entropy(self) -> float:
        n = max(self.n_th, 0.0)
        if n <= 0.0:
            return 0.0
        return (n + 1.0) * math.log(n + 1.0) - n * math.log(n)

    def temperature(self, nu: float) -> float:
        n = max(self.n_th, 0.0)
        if n <= 0.0:
            return 0.0
        return nu / math.log(1.0 + 1.0 / n)

    def materialize(self, fock_dim: int) -> DensityMatrix:
        return displaced_thermal_state(self.alpha, max(self.n_th, 0.0), fock_dim)


def gaussian_propagate(
    state: GaussianPistonState, ch: PistonChannel, t: float
) -> GaussianPistonState:
    """Exact channel flow on the displaced thermal family.

    alpha picks up e^{-gamma t/2}; the thermal part follows the occupation
    law with the displacement removed. The family is closed under the
    channel, so this is exact for any gamma and D, including overrides.
    """
    x = -ch.gamma * t
    alpha = state.alpha * math.exp(0.5 * x)
    n_th = state.n_th * math.exp(x) + ch.diffusion * t * float(_phi(x))
    return GaussianPistonState(alpha=alpha, n_th=n_th)


def thermal_fixed_point(ch: PistonChannel) -> GaussianPistonState:
    """Stationary state for contracting channels (gamma > 0)."""
    if ch.gamma <= 0:
        raise ValidationError("only gamma > 0 channels have a thermal fixed point")
    return GaussianPistonState(alpha=0.0, n_th=ch.diffusion / ch.gamma)


def thermal_fixed_point_state(ch: PistonChannel, fock_dim: int) -> DensityMatrix:
    return thermal_state(thermal_fixed_point(ch).n_th, fock_dim)
