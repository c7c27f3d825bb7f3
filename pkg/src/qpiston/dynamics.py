"""Joint qubit-oscillator dynamics of the heat-pumped amplifier.

The system is a qubit (gap omega0) coupled to a piston mode (frequency nu)
through g (a + a^dag) sigma_z, with two thermal baths driving the qubit.
In the polaron frame the bath coupling splits into a carrier line at
omega0 and two sidebands at omega0 +- nu; each line contributes one pair
of absorption/emission dissipators per bath, six blocks in total. All
generators here are written in the interaction picture, so the free phase
rotation is removed and the piston sees pure gain/loss.

Two operator sets are available. "leading" keeps the lowest order in
g/nu: the carrier acts on the qubit alone and the sidebands through
sigma_-+ a, sigma_-+ a^dag. "exact" conjugates the bare operators with the
polaron transform, which adds conditional-displacement corrections of
order g/nu.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .baths import BathSpectrum, combined, sample
from .errors import ConfigError, PositivityError, ValidationError
from .operators import (
    DensityMatrix,
    HilbertLayout,
    Operator,
    annihilation,
    expectation,
    identity,
    kron,
    matrix_exponential_unitary,
    partial_trace_qubit,
    require_density_matrix,
    sigma_minus,
    sigma_plus,
    sigma_z,
    von_neumann_entropy,
)

logger = logging.getLogger("qpiston.dynamics")

MAX_COUPLING_RATIO = 0.1
MIN_FOCK_DIM = 20
MAX_JOINT_FOCK_DIM = 64
TRAJECTORY_TRACE_TOL = 1e-8
POSITIVITY_ABORT = -1e-6
POSITIVITY_CHECK_INTERVAL = 100
DT_RATE_FACTOR = 0.05


@dataclass(frozen=True)
class EngineParams:
    """System constants plus the two bath spectra."""

    omega0: float
    nu: float
    g: float
    fock_dim: int
    hot: BathSpectrum
    cold: BathSpectrum

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ConfigError(f"omega0 must be positive, got {self.omega0}")
        if not 0 < self.nu < self.omega0:
            raise ConfigError(f"nu must be < omega0, got nu={self.nu}, omega0={self.omega0}")
        if self.g < 0:
            raise ConfigError(f"g must be nonnegative, got {self.g}")
        if self.g / self.nu > MAX_COUPLING_RATIO:
            raise ConfigError(
                f"g/nu = {self.g / self.nu:.3f} exceeds the weak-coupling cap "
                f"{MAX_COUPLING_RATIO}"
            )
        if self.fock_dim < MIN_FOCK_DIM:
            raise ConfigError(
                f"fock_dim must be at least {MIN_FOCK_DIM}, got {self.fock_dim}"
            )
        if self.fock_dim > MAX_JOINT_FOCK_DIM:
            raise ConfigError(
                f"joint simulation is capped at fock_dim {MAX_JOINT_FOCK_DIM}, "
                f"got {self.fock_dim}"
            )

    @property
    def nu_plus(self) -> float:
        return self.omega0 + self.nu

    @property
    def nu_minus(self) -> float:
        return self.omega0 - self.nu

    @property
    def layout(self) -> HilbertLayout:
        return HilbertLayout(self.fock_dim)

    @property
    def cycle_time(self) -> float:
        return 2.0 * math.pi / self.nu


def qubit_hamiltonian(params: EngineParams) -> Operator:
    """omega0 |e><e| lifted to the joint space."""
    h = np.diag([0.0, params.omega0]).astype(complex)
    return kron(h, identity(params.fock_dim))


def piston_hamiltonian(params: EngineParams) -> Operator:
    n_op = np.diag(np.arange(params.fock_dim, dtype=float)).astype(complex)
    return params.nu * kron(identity(2), n_op)


def coupling_hamiltonian(params: EngineParams) -> Operator:
    a = annihilation(params.fock_dim)
    return params.g * kron(sigma_z(), a + a.conj().T)


def dressed_transform(params: EngineParams) -> Operator:
    """Polaron unitary exp((g/nu) sigma_z (a^dag - a)) on the joint space."""
    a = annihilation(params.fock_dim)
    gen = (params.g / params.nu) * kron(sigma_z(), a.conj().T - a)
    return matrix_exponential_unitary(gen)


def transition_operators(params: EngineParams, dressing: str = "leading") -> dict:
    """Jump operators for the carrier and the two sidebands.

    Keys: "carrier_down"/"carrier_up" at omega0, "upper_down"/"upper_up"
    at omega0 + nu, "lower_down"/"lower_up" at omega0 - nu. "Down" lowers
    the system energy (emission into the bath); "up" is its adjoint.
    """
    if dressing not in ("leading", "exact"):
        raise ConfigError(f"dressing must be 'leading' or 'exact', got {dressing!r}")
    N = params.fock_dim
    a = annihilation(N)
    ident = identity(N)
    if dressing == "leading":
        sm = kron(sigma_minus(), ident)
        upper_down = kron(sigma_minus(), a)
        lower_down = kron(sigma_minus(), a.conj().T)
    else:
        u = dressed_transform(params)
        sm = u.conj().T @ kron(sigma_minus(), ident) @ u
        upper_down = u.conj().T @ kron(sigma_minus(), a) @ u
        lower_down = u.conj().T @ kron(sigma_minus(), a.conj().T) @ u
    return {
        "carrier_down": sm,
        "carrier_up": sm.conj().T,
        "upper_down": upper_down,
        "upper_up": upper_down.conj().T,
        "lower_down": lower_down,
        "lower_up": lower_down.conj().T,
    }


@dataclass
class Liouvillian:
    """Dissipative generator: stacked jump operators with their rates.

    ``terms`` maps a bath label to a list of (rate, operator) pairs; the
    generator is the sum over both baths of standard dissipators
    rate * (L rho L^dag - (1/2){L^dag L, rho}).
    """

    params: EngineParams
    terms: dict
    samples: dict
    halved_sidebands: bool
    dressing: str
    _stack: np.ndarray = field(default=None, repr=False)
    _stack_dag: np.ndarray = field(default=None, repr=False)
    _anticomm: np.ndarray = field(default=None, repr=False)

    def _compile(self):
        ops = []
        for pairs in self.terms.values():
            for rate, op in pairs:
                if rate < 0:
                    raise ValidationError(f"negative dissipator rate {rate!r}")
                if rate > 0:
                    ops.append(math.sqrt(rate) * op)
        if not ops:
            dim = 2 * self.params.fock_dim
            self._stack = np.zeros((0, dim, dim), dtype=complex)
            self._stack_dag = self._stack.copy()
            self._anticomm = np.zeros((dim, dim), dtype=complex)
            return
        self._stack = np.array(ops)
        self._stack_dag = np.conj(np.swapaxes(self._stack, 1, 2)).copy()
        self._anticomm = np.matmul(self._stack_dag, self._stack).sum(axis=0)

    @property
    def stack(self) -> np.ndarray:
        if self._stack is None:
            self._compile()
        return self._stack

    @property
    def anticommutator_core(self) -> np.ndarray:
        """Sum of L^dag L over all scaled jump operators."""
        if self._anticomm is None:
            self._compile()
        return self._anticomm

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        """Action of the full generator on a state."""
        stack = self.stack
        m = self.anticommutator_core
        if stack.shape[0] == 0:
            return np.zeros_like(rho)
        sandwich = np.matmul(np.matmul(stack, rho), self._stack_dag).sum(axis=0)
        return sandwich - 0.5 * (m @ rho + rho @ m)

    def apply_bath(self, rho: DensityMatrix, label: str) -> DensityMatrix:
        """Action of one bath's blocks only."""
        out = np.zeros_like(rho)
        for rate, op in self.terms[label]:
            if rate == 0:
                continue
            od = op.conj().T
            core = od @ op
            out = out + rate * (op @ rho @ od - 0.5 * (core @ rho + rho @ core))
        return out

    def max_rate(self) -> float:
        """Crude spectral scale used for the integration step cap."""
        stack = self.stack
        if stack.shape[0] == 0:
            return 0.0
        return float(np.max(np.abs(self.anticommutator_core)))


def build_liouvillian(
    params: EngineParams,
    halved_sidebands: bool = False,
    dressing: str = "leading",
) -> Liouvillian:
    """Assemble the six dissipator blocks from the two bath spectra.

    Each bath contributes a carrier pair sampled at +-omega0 with weight
    1/2 and a sideband pair per line sampled at +-(omega0 +- nu) with
    weight (g/nu)^2. ``halved_sidebands`` applies an extra 1/2 to the
    sideband blocks; the default keeps the bare double-commutator
    normalization, which makes the reduced-channel coefficients come out
    at twice the half-rate convention (see channel.derive_channel).
    """
    ops = transition_operators(params, dressing=dressing)
    ratio2 = (params.g / params.nu) ** 2
    side = 0.5 * ratio2 if halved_sidebands else ratio2
    terms = {}
    samples = {}
    for bath in (params.cold, params.hot):
        pairs = []
        for line, down_key, up_key, weight in (
            (params.omega0, "carrier_down", "carrier_up", 0.5),
            (params.nu_plus, "upper_down", "upper_up", side),
            (params.nu_minus, "lower_down", "lower_up", side),
        ):
            g_down = sample(bath, line)
            g_up = sample(bath, -line)
            samples[(bath.label, line)] = g_down
            samples[(bath.label, -line)] = g_up
            pairs.append((2.0 * weight * g_down, ops[down_key]))
            pairs.append((2.0 * weight * g_up, ops[up_key]))
        terms[bath.label] = pairs
    liou = Liouvillian(
        params=params,
        terms=terms,
        samples=samples,
        halved_sidebands=halved_sidebands,
        dressing=dressing,
    )
    _check_trace_annihilation(liou)
    return liou


def _check_trace_annihilation(liou: Liouvillian, tol: float = 1e-10) -> None:
    dim = 2 * liou.params.fock_dim
    rng = np.random.default_rng(0)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    probe = g @ g.conj().T
    probe = probe / np.trace(probe).real
    drift = abs(np.trace(liou.apply(probe)))
    if drift > tol:
        raise ValidationError(
            f"generator does not annihilate the trace: drift {drift:.3e}"
        )


def qubit_steady_state(params: EngineParams) -> tuple:
    """Carrier-line detailed balance point (p_ground, p_excited).

    The population ratio is fixed by the combined bath response at the
    qubit gap: p_e / p_g = G(-omega0) / G(omega0).
    """
    baths_ = (params.cold, params.hot)
    g_down = combined(baths_, params.omega0)
    g_up = combined(baths_, -params.omega0)
    if g_down == 0.0:
        raise ConfigError(
            "no bath response at the qubit gap; the carrier line cannot thermalize"
        )
    ratio = g_up / g_down
    p_g = 1.0 / (1.0 + ratio)
    return (p_g, p_g * ratio)


@dataclass
class Trajectory:
    """Recorded snapshots of a joint propagation."""

    params: EngineParams
    times: np.ndarray
    cycles: np.ndarray
    piston_energy: np.ndarray
    qubit_energy: np.ndarray
    coherent_amplitude: np.ndarray
    piston_entropy: np.ndarray
    joint_entropy: np.ndarray
    heat_cold: np.ndarray
    heat_hot: np.ndarray
    piston_states: list
    final_state: DensityMatrix
    renorm_events: int


def _rk4_step(rho, dt, rhs):
    k1 = rhs(rho)
    k2 = rhs(rho + 0.5 * dt * k1)
    k3 = rhs(rho + 0.5 * dt * k2)
    k4 = rhs(rho + dt * k3)
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def propagate(
    rho0: DensityMatrix,
    liou: Liouvillian,
    t_final: float,
    dt: float = None,
    record_every: int = 1,
    check_interval: int = POSITIVITY_CHECK_INTERVAL,
) -> Trajectory:
    """Fixed-step RK4 integration of the joint master equation.

    Records every ``record_every`` steps (plus the endpoint). The state is
    rehermitized at every check, the trace is renormalized with a logged
    warning when the drift exceeds 1e-8, and a PositivityError aborts the
    run if any eigenvalue falls below -1e-6.
    """
    params = liou.params
    require_density_matrix(rho0)
    if rho0.shape != (2 * params.fock_dim, 2 * params.fock_dim):
        raise ValidationError(
            f"state dimension {rho0.shape[0]} does not match the joint space "
            f"{2 * params.fock_dim}"
        )
    rate = liou.max_rate()
    dt_cap = DT_RATE_FACTOR / rate if rate > 0 else t_final
    if dt is None:
        dt = dt_cap
    if dt > dt_cap:
        raise ValidationError(
            f"dt={dt:.3g} exceeds the stability cap {dt_cap:.3g} (0.05/max rate)"
        )
    n_steps = max(1, int(math.ceil(t_final / dt - 1e-12)))
    dt = t_final / n_steps

    h_q = qubit_hamiltonian(params)
    h_p = piston_hamiltonian(params)
    a_lift = kron(identity(2), annihilation(params.fock_dim))

    rho = np.array(rho0, dtype=complex)
    renorms = 0
    rec_t, rec_ep, rec_eq, rec_alpha = [], [], [], []
    rec_sp, rec_sj, rec_jc, rec_jh, rec_states = [], [], [], [], []

    def record(t, state):
        rec_t.append(t)
        rec_ep.append(expectation(state, h_p))
        rec_eq.append(expectation(state, h_q))
        rec_alpha.append(complex(np.trace(state @ a_lift)))
        rho_p = partial_trace_qubit(state, params.fock_dim)
        rec_states.append(rho_p)
        rec_sp.append(von_neumann_entropy(rho_p))
        rec_sj.append(von_neumann_entropy(state))
        h_total = h_q + h_p
        rec_jc.append(expectation(liou.apply_bath(state, params.cold.label), h_total))
        rec_jh.append(expectation(liou.apply_bath(state, params.hot.label), h_total))

    record(0.0, rho)
    for step in range(1, n_steps + 1):
        rho = _rk4_step(rho, dt, liou.apply)
        if step % check_interval == 0 or step == n_steps:
            rho = 0.5 * (rho + rho.conj().T)
            tr = np.trace(rho).real
            drift = abs(tr - 1.0)
            if drift > TRAJECTORY_TRACE_TOL:
                renorms += 1
                logger.warning(
                    "trace drift %.3e at t=%.4g exceeded %.1e; renormalizing",
                    drift,
                    step * dt,
                    TRAJECTORY_TRACE_TOL,
                )
            rho = rho / tr
            w_min = float(np.linalg.eigvalsh(rho)[0])
            if w_min < POSITIVITY_ABORT:
                raise PositivityError(
                    f"state eigenvalue {w_min:.3e} fell below {POSITIVITY_ABORT:.0e} "
                    f"at t={step * dt:.4g}"
                )
        if step % record_every == 0 or step == n_steps:
            record(step * dt, rho)

    times = np.array(rec_t)
    return Trajectory(
        params=params,
        times=times,
        cycles=times / params.cycle_time,
        piston_energy=np.array(rec_ep),
        qubit_energy=np.array(rec_eq),
        coherent_amplitude=np.array(rec_alpha),
        piston_entropy=np.array(rec_sp),
        joint_entropy=np.array(rec_sj),
        heat_cold=np.array(rec_jc),
        heat_hot=np.array(rec_jh),
        piston_states=rec_states,
        final_state=rho,
        renorm_events=renorms,
    )


def heat_currents(rho: DensityMatrix, liou: Liouvillian) -> tuple:
    """(J_cold, J_hot): energy flow from each bath into the system.

    J_j = tr(H (L_j rho)) with H the bare qubit plus piston Hamiltonian.
    """
    params = liou.params
    h_total = qubit_hamiltonian(params) + piston_hamiltonian(params)
    j_c = expectation(liou.apply_bath(rho, params.cold.label), h_total)
    j_h = expectation(liou.apply_bath(rho, params.hot.label), h_total)
    return (j_c, j_h)


def entropy_production(traj: Trajectory) -> np.ndarray:
    """Irreversible entropy rate along a trajectory.

    sigma = dS_joint/dt - J_C/T_C - J_H/T_H, with the entropy derivative
    taken by centered differences (one-sided second order at the ends).
    Snapshots must be uniformly spaced.
    """
    t = traj.times
    if t.size < 3:
        raise ValidationError("entropy production needs at least 3 snapshots")
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise ValidationError("entropy production needs uniform snapshot spacing")
    ds = np.gradient(traj.joint_entropy, t[1] - t[0], edge_order=2)
    return (
        ds
        - traj.heat_cold / traj.params.cold.temperature
        - traj.heat_hot / traj.params.hot.temperature
    )
