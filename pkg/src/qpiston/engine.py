"""Named experiment scenarios over the reduced and joint engines.

A Scenario bundles parameters, an initial piston state, a duration in
cycles, and which engine to run; run_scenario turns it into a Report of
trajectory tables plus optional Husimi snapshots. The micromaser
comparison lives here too.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import work
from .baths import combined
from .channel import (
    GaussianPistonState,
    PistonChannel,
    channel_propagate,
    coherent_amplitude,
    derive_channel,
    gaussian_propagate,
    mean_occupation,
    propagate_populations,
)
from .dynamics import (
    EngineParams,
    Trajectory,
    build_liouvillian,
    entropy_production,
    propagate,
)
from .errors import ConfigError, QpistonError, ValidationError
from .operators import (
    DensityMatrix,
    annihilation,
    coherent_state,
    displaced_thermal_state,
    fock_state,
    kron,
    thermal_state,
    von_neumann_entropy,
)
from .phasespace import PhaseGrid, quasiprobability_grid, suggested_extent

logger = logging.getLogger(__name__)

MODES = ("reduced", "full_joint", "both")
LANES = ("auto", "gaussian", "populations", "dense")
STATE_KINDS = ("fock", "coherent", "thermal", "displaced_thermal")
MASER_INTERACTION_LIMIT = 0.1


def _amplitude_text(alpha: complex) -> str:
    alpha = complex(alpha)
    if alpha.imag == 0.0:
        return f"{alpha.real:g}"
    return f"{alpha.real:g}{alpha.imag:+g}j"


@dataclass(frozen=True)
class StateSpec:
    """Initial piston state: fock(n), coherent(a), thermal(nbar), or both."""

    kind: str
    n: int = 0
    alpha: complex = 0j
    nbar: float = 0.0

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ConfigError(
                f"unknown state kind {self.kind!r}; expected one of {STATE_KINDS}"
            )
        if self.kind == "fock" and self.n < 0:
            raise ConfigError(f"fock index must be nonnegative, got {self.n}")
        if self.nbar < 0:
            raise ConfigError(f"nbar must be nonnegative, got {self.nbar}")

    @classmethod
    def parse(cls, text: str) -> "StateSpec":
        """Parse 'fock:3', 'coherent:2.0', 'thermal:1.5',
        'displaced_thermal:2.0,0.5' (amplitude accepts complex syntax)."""
        kind, _, arg = text.partition(":")
        kind = kind.strip()
        try:
            if kind == "fock":
                return cls(kind="fock", n=int(arg))
            if kind == "coherent":
                return cls(kind="coherent", alpha=complex(arg))
            if kind == "thermal":
                return cls(kind="thermal", nbar=float(arg))
            if kind == "displaced_thermal":
                a_text, _, n_text = arg.partition(",")
                return cls(
                    kind="displaced_thermal",
                    alpha=complex(a_text),
                    nbar=float(n_text),
                )
        except ValueError as exc:
            raise ConfigError(f"cannot parse state spec {text!r}: {exc}") from None
        raise ConfigError(
            f"unknown state kind {kind!r}; expected one of {STATE_KINDS}"
        )

    @property
    def mean_occupation(self) -> float:
        if self.kind == "fock":
            return float(self.n)
        return abs(self.alpha) ** 2 + self.nbar

    def gaussian(self) -> GaussianPistonState:
        """Closed-form family member, or None for Fock inputs."""
        if self.kind == "fock":
            return None
        return GaussianPistonState(alpha=complex(self.alpha), n_th=self.nbar)

    def populations(self, dim: int) -> np.ndarray:
        """Fock-basis populations, or None when coherences are present."""
        if self.kind == "fock":
            p = np.zeros(dim)
            p[self.n] = 1.0
            return p
        if self.kind == "thermal":
            return np.diag(thermal_state(self.nbar, dim)).real.copy()
        return None

    def build(self, fock_dim: int) -> DensityMatrix:
        if self.kind == "fock":
            return fock_state(self.n, fock_dim)
        if self.kind == "coherent":
            return coherent_state(self.alpha, fock_dim)
        if self.kind == "thermal":
            return thermal_state(self.nbar, fock_dim)
        return displaced_thermal_state(self.alpha, self.nbar, fock_dim)

    def describe(self) -> str:
        if self.kind == "fock":
            return f"fock:{self.n}"
        if self.kind == "coherent":
            return f"coherent:{_amplitude_text(self.alpha)}"
        if self.kind == "thermal":
            return f"thermal:{self.nbar:g}"
        return f"displaced_thermal:{_amplitude_text(self.alpha)},{self.nbar:g}"


@dataclass(frozen=True)
class Scenario:
    """One named engine run; either engine params, a channel, or both."""

    state: StateSpec
    duration_cycles: float
    params: EngineParams = None
    channel_override: PistonChannel = None
    mode: str = "reduced"
    lane: str = "auto"
    records: int = 121
    snapshot_cycles: tuple = ()
    fock_dim: int = 40
    halved_sidebands: bool = False
    dressing: str = "leading"
    label: str = "scenario"

    def __post_init__(self):
        if self.duration_cycles <= 0:
            raise ConfigError(
                f"duration_cycles must be positive, got {self.duration_cycles}"
            )
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.lane not in LANES:
            raise ConfigError(f"lane must be one of {LANES}, got {self.lane!r}")
        if self.records < 3:
            raise ConfigError(f"records must be at least 3, got {self.records}")
        if self.params is None and self.channel_override is None:
            raise ConfigError("scenario needs engine params or a channel override")
        if self.mode in ("full_joint", "both") and self.params is None:
            raise ConfigError(f"mode {self.mode!r} requires engine params")
        if self.params is not None and self.channel_override is not None:
            if self.channel_override.nu != self.params.nu:
                raise ConfigError(
                    "channel override nu "
                    f"{self.channel_override.nu} disagrees with params nu "
                    f"{self.params.nu}"
                )
        for c in self.snapshot_cycles:
            if not 0.0 <= c <= self.duration_cycles:
                raise ConfigError(
                    f"snapshot cycle {c} outside [0, {self.duration_cycles}]"
                )

    @property
    def nu(self) -> float:
        if self.params is not None:
            return self.params.nu
        return self.channel_override.nu

    def channel(self) -> PistonChannel:
        if self.channel_override is not None:
            return self.channel_override
        return derive_channel(self.params, halved_sidebands=self.halved_sidebands)

    def resolved_lane(self) -> str:
        if self.lane != "auto":
            return self.lane
        return "populations" if self.state.kind == "fock" else "gaussian"

    def config_dict(self) -> dict:
        out = {
            "label": self.label,
            "state": self.state.describe(),
            "duration_cycles": self.duration_cycles,
            "mode": self.mode,
            "lane": self.resolved_lane(),
            "records": self.records,
            "snapshot_cycles": list(self.snapshot_cycles),
            "fock_dim": self.fock_dim,
            "halved_sidebands": self.halved_sidebands,
            "dressing": self.dressing,
        }
        if self.params is not None:
            p = self.params
            out["system"] = {
                "omega0": p.omega0,
                "nu": p.nu,
                "g": p.g,
                "fock_dim": p.fock_dim,
            }
            out["baths"] = {
                "hot": {
                    "temperature": p.hot.temperature,
                    "profile": repr(p.hot.profile),
                },
                "cold": {
                    "temperature": p.cold.temperature,
                    "profile": repr(p.cold.profile),
                },
            }
        if self.channel_override is not None:
            ch = self.channel_override
            out["channel_override"] = {
                "gamma": ch.gamma,
                "diffusion": ch.diffusion,
                "nu": ch.nu,
            }
        return out


@dataclass(frozen=True)
class QGridSnapshot:
    cycle: float
    grid: PhaseGrid
    values: np.ndarray


@dataclass
class Report:
    """Trajectory tables for one scenario run; absent values are NaN."""

    config: dict
    mode: str
    lane: str
    times: np.ndarray
    cycles: np.ndarray
    occupation: np.ndarray
    energy: np.ndarray
    amplitude_sq: np.ndarray
    qubit_energy: np.ndarray
    ergotropy: np.ndarray
    entropy: np.ndarray
    passive_temperature: np.ndarray
    power_bound: np.ndarray
    heat_cold: np.ndarray
    heat_hot: np.ndarray
    sigma: np.ndarray
    eta: np.ndarray
    eta_bound: float
    qgrids: list = field(default_factory=list)
    deltas: dict = None

    def validate(self):
        computed = self.sigma[~np.isnan(self.sigma)]
        if computed.size and computed.min() < -1e-8:
            raise ValidationError(
                f"entropy production row fell to {computed.min():.3e}"
            )
        if np.any(self.ergotropy[~np.isnan(self.ergotropy)] < 0.0):
            raise ValidationError("negative ergotropy row in report")


def _grad(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.gradient(y, t, edge_order=2)


def _sideband_weight(params: EngineParams, halved: bool) -> float:
    f = (params.g / params.nu) ** 2
    return f if halved else 2.0 * f


def loaded_qubit_populations(params: EngineParams, occupation, halved=False):
    """Qubit (ground, excited) balancing carrier and sideband rates.

    The sideband rates scale with the piston occupation, so the balance
    point drifts as the piston fills; using it keeps the reported heat
    currents consistent with the piston energy flow.
    """
    n = np.asarray(occupation, dtype=float)
    baths = (params.hot, params.cold)
    f = _sideband_weight(params, halved)
    w0, np_, nm = params.omega0, params.nu_plus, params.nu_minus
    up = combined(baths, -w0) + f * (
        combined(baths, -np_) * (n + 1.0) + combined(baths, -nm) * n
    )
    down = combined(baths, w0) + f * (
        combined(baths, np_) * n + combined(baths, nm) * (n + 1.0)
    )
    total = up + down
    if np.any(total <= 0.0):
        raise ConfigError("no bath weight at any qubit transition")
    return down / total, up / total


def reduced_heat_currents(params: EngineParams, occupation, halved=False):
    """Per-bath energy currents (J_cold, J_hot) at given piston occupation.

    Each bath exchanges quanta at the bare qubit line and the two
    sidebands; rates factorize over the loaded qubit populations and the
    piston occupation. With that balance the currents sum exactly to
    the piston energy flow.
    """
    n = np.asarray(occupation, dtype=float)
    p_g, p_e = loaded_qubit_populations(params, n, halved=halved)
    f = _sideband_weight(params, halved)
    w0, np_, nm = params.omega0, params.nu_plus, params.nu_minus

    def one_bath(bath):
        g = lambda w: combined((bath,), w)
        carrier = w0 * (g(-w0) * p_g - g(w0) * p_e)
        upper = np_ * f * (g(-np_) * p_g * (n + 1.0) - g(np_) * p_e * n)
        lower = nm * f * (g(-nm) * p_g * n - g(nm) * p_e * (n + 1.0))
        return carrier + upper + lower

    return one_bath(params.cold), one_bath(params.hot)


@dataclass(frozen=True)
class EfficiencyResult:
    """Work-capacity growth over hot heat input, where that is defined."""

    eta: np.ndarray
    eta_bound: float
    validated: np.ndarray


def efficiency(report: Report, params: EngineParams) -> EfficiencyResult:
    """eta(t) = d(ergotropy)/dt / J_hot on rows with positive hot input.

    Rows with J_hot <= 0 stay NaN. The bound nu/nu_plus is stated for
    amplitude-dominated runs, so rows with |<a>| <= 3 are left out of
    the validated mask.
    """
    power = _grad(report.ergotropy, report.times)
    eta = np.full(report.times.shape, np.nan)
    ok = report.heat_hot > 0.0
    eta[ok] = power[ok] / report.heat_hot[ok]
    validated = ok & (np.sqrt(report.amplitude_sq) > 3.0)
    return EfficiencyResult(
        eta=eta, eta_bound=params.nu / params.nu_plus, validated=validated
    )


def _annotated(exc: QpistonError, label: str) -> QpistonError:
    exc.args = (f"scenario {label!r}: {exc.args[0]}",) + exc.args[1:]
    return exc


def _materialize(gs: GaussianPistonState, start_dim: int) -> DensityMatrix:
    from .errors import TruncationError

    try:
        return gs.materialize(start_dim)
    except TruncationError as exc:
        return gs.materialize(exc.minimal_dim)


def _snapshot(rho: DensityMatrix, cycle: float) -> QGridSnapshot:
    grid = PhaseGrid(extent=suggested_extent(rho), points=101)
    return QGridSnapshot(cycle=cycle, grid=grid, values=quasiprobability_grid(rho, grid))


def _nearest_rows(times: np.ndarray, wanted: np.ndarray) -> np.ndarray:
    return np.array([int(np.argmin(np.abs(times - w))) for w in wanted], dtype=int)


def _reduced_tables(s: Scenario, times: np.ndarray) -> Report:
    ch = s.channel()
    nu = s.nu
    lane = s.resolved_lane()
    n_rows = times.size
    snap_times = np.asarray(s.snapshot_cycles, dtype=float) * 2.0 * math.pi / nu
    snap_rows = _nearest_rows(times, snap_times)

    amplitude = np.zeros(n_rows)
    qgrids = []

    if lane == "gaussian":
        gs0 = s.state.gaussian()
        if gs0 is None:
            raise ConfigError("gaussian lane needs a coherent or thermal input")
        occupation = mean_occupation(ch, times, gs0.mean_occupation)
        alpha_t = coherent_amplitude(ch, times, gs0.alpha)
        amplitude = np.abs(np.asarray(alpha_t)) ** 2
        ergo = nu * amplitude
        n_th = occupation - amplitude
        entropy = np.empty(n_rows)
        t_passive = np.empty(n_rows)
        for i in range(n_rows):
            gs_i = GaussianPistonState(alpha=0.0, n_th=max(n_th[i], 0.0))
            entropy[i] = gs_i.entropy()
            t_passive[i] = gs_i.temperature(nu)
        for row, cyc in zip(snap_rows, s.snapshot_cycles):
            gs_t = gaussian_propagate(gs0, ch, times[row])
            dim = int(math.ceil(gs_t.mean_occupation + 30))
            qgrids.append(_snapshot(_materialize(gs_t, dim), cyc))
    elif lane == "populations":
        p = s.state.populations(max(s.fock_dim, 16))
        if p is None:
            raise ConfigError("populations lane needs a Fock-diagonal input")
        occupation = np.empty(n_rows)
        ergo = np.empty(n_rows)
        entropy = np.empty(n_rows)
        t_passive = np.empty(n_rows)
        snap_lookup = dict(zip(snap_rows, s.snapshot_cycles))
        for i in range(n_rows):
            if i > 0:
                p = propagate_populations(p, ch, times[i] - times[i - 1])
            levels = nu * np.arange(p.size)
            occupation[i] = float(np.dot(np.arange(p.size), p))
            ergo[i] = work.ergotropy_from_populations(p, levels)
            entropy[i] = work.entropy_from_populations(p)
            t_passive[i] = work.effective_temperature_for_spectrum(
                levels, entropy[i]
            )
            if i in snap_lookup:
                qgrids.append(
                    _snapshot(np.diag(p).astype(complex), snap_lookup[i])
                )
    elif lane == "dense":
        rho = s.state.build(s.fock_dim)
        occupation = np.empty(n_rows)
        ergo = np.empty(n_rows)
        entropy = np.empty(n_rows)
        t_passive = np.empty(n_rows)
        amp = np.empty(n_rows, dtype=complex)
        snap_lookup = dict(zip(snap_rows, s.snapshot_cycles))
        for i in range(n_rows):
            if i > 0:
                rho = channel_propagate(rho, ch, times[i] - times[i - 1])
            dim = rho.shape[0]
            a = annihilation(dim)
            h_p = nu * np.diag(np.arange(dim, dtype=float)).astype(complex)
            occupation[i] = float(np.trace(rho @ (a.conj().T @ a)).real)
            amp[i] = np.trace(rho @ a)
            ergo[i] = work.ergotropy(rho, h_p)
            entropy[i] = von_neumann_entropy(rho)
            t_passive[i] = work.effective_temperature(rho, h_p)
            if i in snap_lookup:
                qgrids.append(_snapshot(rho, snap_lookup[i]))
        amplitude = np.abs(amp) ** 2
    else:
        raise ConfigError(f"unknown lane {lane!r}")

    energy = nu * occupation
    power_bound = _grad(energy, times) - t_passive * _grad(entropy, times)

    heat_cold = np.full(n_rows, np.nan)
    heat_hot = np.full(n_rows, np.nan)
    sigma = np.full(n_rows, np.nan)
    eta = np.full(n_rows, np.nan)
    eta_bound = math.nan
    qubit_energy = np.full(n_rows, np.nan)
    if s.params is not None:
        heat_cold, heat_hot = reduced_heat_currents(
            s.params, occupation, halved=s.halved_sidebands
        )
        _, p_e = loaded_qubit_populations(
            s.params, occupation, halved=s.halved_sidebands
        )
        qubit_energy = s.params.omega0 * p_e
        sigma = (
            _grad(entropy, times)
            - heat_cold / s.params.cold.temperature
            - heat_hot / s.params.hot.temperature
        )

    report = Report(
        config=s.config_dict(),
        mode="reduced",
        lane=lane,
        times=times,
        cycles=times * nu / (2.0 * math.pi),
        occupation=occupation,
        energy=energy,
        amplitude_sq=amplitude,
        qubit_energy=qubit_energy,
        ergotropy=ergo,
        entropy=entropy,
        passive_temperature=t_passive,
        power_bound=power_bound,
        heat_cold=heat_cold,
        heat_hot=heat_hot,
        sigma=sigma,
        eta=eta,
        eta_bound=eta_bound,
        qgrids=qgrids,
    )
    if s.params is not None:
        res = efficiency(report, s.params)
        report.eta = res.eta
        report.eta_bound = res.eta_bound
    return report


def _joint_tables(s: Scenario) -> Report:
    params = s.params
    nu = params.nu
    t_final = s.duration_cycles * 2.0 * math.pi / nu
    liou = build_liouvillian(
        params, halved_sidebands=s.halved_sidebands, dressing=s.dressing
    )
    qubit_ground = np.zeros((2, 2), dtype=complex)
    qubit_ground[0, 0] = 1.0
    rho_p = s.state.build(params.fock_dim)
    rho0 = kron(qubit_ground, rho_p)

    dt_cap = 0.05 / liou.max_rate()
    per = max(1, int(math.ceil(t_final / (s.records - 1) / dt_cap)))
    n_steps = per * (s.records - 1)
    traj = propagate(
        rho0, liou, t_final, dt=t_final / n_steps, record_every=per
    )

    n_rows = traj.times.size
    ergo = np.empty(n_rows)
    t_passive = np.empty(n_rows)
    h_p = nu * np.diag(np.arange(params.fock_dim, dtype=float)).astype(complex)
    for i, rho_i in enumerate(traj.piston_states):
        ergo[i] = work.ergotropy(rho_i, h_p)
        t_passive[i] = work.effective_temperature(rho_i, h_p)
    power_bound = _grad(traj.piston_energy, traj.times) - t_passive * _grad(
        traj.piston_entropy, traj.times
    )
    snap_times = np.asarray(s.snapshot_cycles, dtype=float) * 2.0 * math.pi / nu
    qgrids = [
        _snapshot(traj.piston_states[row], cyc)
        for row, cyc in zip(_nearest_rows(traj.times, snap_times), s.snapshot_cycles)
    ]

    report = Report(
        config=s.config_dict(),
        mode="full_joint",
        lane="dense",
        times=traj.times,
        cycles=traj.cycles,
        occupation=traj.piston_energy / nu,
        energy=traj.piston_energy,
        amplitude_sq=np.abs(traj.coherent_amplitude) ** 2,
        qubit_energy=traj.qubit_energy,
        ergotropy=ergo,
        entropy=traj.piston_entropy,
        passive_temperature=t_passive,
        power_bound=power_bound,
        heat_cold=traj.heat_cold,
        heat_hot=traj.heat_hot,
        sigma=entropy_production(traj),
        eta=np.full(n_rows, np.nan),
        eta_bound=params.nu / params.nu_plus,
        qgrids=qgrids,
    )
    res = efficiency(report, params)
    report.eta = res.eta
    return report


def run_scenario(s: Scenario) -> Report:
    """Evolve the scenario and assemble its Report.

    reduced mode evolves the piston channel alone; full_joint evolves
    the qubit-piston pair from the qubit ground state; both runs the
    two on one record grid and attaches cross-validation deltas.
    """
    try:
        if s.mode == "reduced":
            t_final = s.duration_cycles * 2.0 * math.pi / s.nu
            times = np.linspace(0.0, t_final, s.records)
            report = _reduced_tables(s, times)
        elif s.mode == "full_joint":
            report = _joint_tables(s)
        else:
            joint = _joint_tables(s)
            red = _reduced_tables(s, joint.times)
            scale_n = max(float(np.max(np.abs(joint.occupation))), 1.0)
            scale_a = max(float(np.max(np.abs(joint.amplitude_sq))), 1.0)
            joint.deltas = {
                "occupation": float(
                    np.max(np.abs(red.occupation - joint.occupation)) / scale_n
                ),
                "amplitude": float(
                    np.max(
                        np.abs(
                            np.sqrt(red.amplitude_sq) - np.sqrt(joint.amplitude_sq)
                        )
                    )
                    / math.sqrt(scale_a)
                ),
            }
            joint.mode = "both"
            report = joint
    except QpistonError as exc:
        raise _annotated(exc, s.label)
    report.validate()
    return report


@dataclass(frozen=True)
class MaserComparison:
    """Small-interaction micromaser rates next to the quantized bound."""

    rate: float
    generated_power: float
    input_power: float
    eta_max: float
    quantized_eta_bound: float


def micromaser_compare(
    r_a: float, g: float, tau: float, nu: float, omega0: float
) -> MaserComparison:
    """Photon generation R = r_a (g tau)^2 and the two efficiency bounds.

    The closed forms hold for a small interaction parameter; beyond
    g*tau = 0.1 a warning is logged and the numbers are still returned.
    """
    if r_a < 0 or g < 0 or tau < 0:
        raise ConfigError("micromaser arguments must be nonnegative")
    if nu <= 0 or omega0 <= 0 or nu > omega0:
        raise ConfigError(f"need 0 < nu <= omega0, got nu={nu}, omega0={omega0}")
    if g * tau > MASER_INTERACTION_LIMIT:
        logger.warning(
            "interaction parameter g*tau=%.3g exceeds %.1f; closed forms "
            "are outside their stated validity",
            g * tau,
            MASER_INTERACTION_LIMIT,
        )
    rate = r_a * (g * tau) ** 2
    return MaserComparison(
        rate=rate,
        generated_power=nu * rate,
        input_power=omega0 * rate,
        eta_max=nu / omega0,
        quantized_eta_bound=nu / (omega0 + nu),
    )
