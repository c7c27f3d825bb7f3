"""Finite-dimensional operator and state utilities.

Conventions used throughout the package: the working Hilbert space is a
qubit tensored with a Fock ladder truncated to ``fock_dim`` levels, ordered
qubit first, so joint operators are built as ``kron(qubit_op, fock_op)``.
Qubit basis index 0 is the ground state and index 1 the excited state;
``sigma_z`` therefore carries +1 on the ground block. States are plain
complex ndarrays; ``require_density_matrix`` is the structural gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationError, ValidationError

# Type aliases; both are square complex ndarrays.
Operator = np.ndarray
DensityMatrix = np.ndarray

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
TAIL_TOL = 1e-6
ENTROPY_EIG_CUTOFF = 1e-14


def sigma_z() -> Operator:
    return np.diag([1.0, -1.0]).astype(complex)


def sigma_plus() -> Operator:
    """Raising operator taking the ground state (index 0) to the excited state."""
    out = np.zeros((2, 2), dtype=complex)
    out[1, 0] = 1.0
    return out


def sigma_minus() -> Operator:
    return sigma_plus().conj().T


def identity(dim: int) -> Operator:
    return np.eye(dim, dtype=complex)


def annihilation(fock_dim: int) -> Operator:
    if fock_dim < 2:
        raise ValidationError(f"fock_dim must be >= 2, got {fock_dim}")
    a = np.zeros((fock_dim, fock_dim), dtype=complex)
    n = np.arange(1, fock_dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def creation(fock_dim: int) -> Operator:
    return annihilation(fock_dim).conj().T


def number_operator(fock_dim: int) -> Operator:
    return np.diag(np.arange(fock_dim, dtype=float)).astype(complex)


def kron(a: Operator, b: Operator) -> Operator:
    """Tensor product with the qubit-first ordering used everywhere here."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise ValidationError("kron expects two matrices")
    return np.kron(a, b)


@dataclass(frozen=True)
class HilbertLayout:
    """Dimension bookkeeping for the qubit x Fock joint space."""

    fock_dim: int

    @property
    def qubit_dim(self) -> int:
        return 2

    @property
    def joint_dim(self) -> int:
        return 2 * self.fock_dim

    def lift_qubit(self, op: Operator) -> Operator:
        if op.shape != (2, 2):
            raise ValidationError(f"expected a 2x2 operator, got {op.shape}")
        return kron(op, identity(self.fock_dim))

    def lift_fock(self, op: Operator) -> Operator:
        if op.shape != (self.fock_dim, self.fock_dim):
            raise ValidationError(
                f"expected a {self.fock_dim}x{self.fock_dim} operator, got {op.shape}"
            )
        return kron(identity(2), op)


def require_hermitian(m: Operator, tol: float = HERMITIAN_TOL, name: str = "matrix") -> None:
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol:
        raise ValidationError(f"{name} is not hermitian: max deviation {dev:.3e} > {tol:.1e}")


def require_density_matrix(
    rho: DensityMatrix,
    trace_tol: float = TRACE_TOL,
    name: str = "rho",
) -> None:
    """Check hermiticity, unit trace and spectral positivity of a state."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {rho.shape}")
    require_hermitian(rho, name=name)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValidationError(f"{name} trace {tr!r} deviates from 1 by more than {trace_tol:.1e}")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w[0] < EIGENVALUE_FLOOR:
        raise ValidationError(f"{name} has negative eigenvalue {w[0]:.3e}")


def hermitian_eig(m: Operator, tol: float = HERMITIAN_TOL):
    """Eigenvalues (ascending) and eigenvectors of a hermitian matrix."""
    require_hermitian(m, tol=tol)
    return np.linalg.eigh(m)


def matrix_exponential_unitary(a: Operator, tol: float = 1e-10) -> Operator:
    """exp(A) for anti-hermitian A, via the spectral form of iA.

    The result is checked to be unitary to within ``tol``.
    """
    a = np.asarray(a, dtype=complex)
    dev = np.max(np.abs(a + a.conj().T))
    if dev > 1e-12 * max(1.0, np.max(np.abs(a))):
        raise ValidationError(f"matrix is not anti-hermitian: deviation {dev:.3e}")
    h = 1j * a
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    u = (v * np.exp(-1j * w)) @ v.conj().T
    udev = np.max(np.abs(u @ u.conj().T - np.eye(a.shape[0])))
    if udev > tol:
        raise ValidationError(f"exponential lost unitarity: deviation {udev:.3e}")
    return u


def displacement(alpha: complex, fock_dim: int) -> Operator:
    """Coherent displacement unitary on the truncated ladder."""
    a = annihilation(fock_dim)
    return matrix_exponential_unitary(alpha * a.conj().T - np.conj(alpha) * a)


def partial_trace_qubit(rho: DensityMatrix, fock_dim: int) -> DensityMatrix:
    """Trace out the qubit from a joint state, leaving the Fock mode."""
    rho = np.asarray(rho)
    if rho.shape != (2 * fock_dim, 2 * fock_dim):
        raise ValidationError(
            f"joint state shape {rho.shape} does not match fock_dim {fock_dim}"
        )
    return np.einsum("iaib->ab", rho.reshape(2, fock_dim, 2, fock_dim))


def partial_trace_fock(rho: DensityMatrix, fock_dim: int) -> DensityMatrix:
    """Trace out the Fock mode from a joint state, leaving the qubit."""
    rho = np.asarray(rho)
    if rho.shape != (2 * fock_dim, 2 * fock_dim):
        raise ValidationError(
            f"joint state shape {rho.shape} does not match fock_dim {fock_dim}"
        )
    return np.einsum("iaja->ij", rho.reshape(2, fock_dim, 2, fock_dim))


def expectation(rho: DensityMatrix, op: Operator) -> float:
    """tr(rho op) for a hermitian observable, returned as a real float."""
    return float(np.trace(rho @ op).real)


def fock_state(n: int, fock_dim: int) -> DensityMatrix:
    if n < 0:
        raise ValidationError(f"fock level must be nonnegative, got {n}")
    if n >= fock_dim - 1:
        raise TruncationError(
            f"fock level {n} needs fock_dim at least {n + 2} "
            f"(one empty sentinel level on top), got {fock_dim}",
            minimal_dim=n + 2,
        )
    rho = np.zeros((fock_dim, fock_dim), dtype=complex)
    rho[n, n] = 1.0
    return rho


def vacuum_state(fock_dim: int) -> DensityMatrix:
    return fock_state(0, fock_dim)


def _coherent_amplitudes(alpha: complex, fock_dim: int) -> np.ndarray:
    c = np.zeros(fock_dim, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, fock_dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def coherent_state(alpha: complex, fock_dim: int) -> DensityMatrix:
    """Coherent state as a density matrix, built from exact Fock amplitudes."""
    c = _coherent_amplitudes(alpha, fock_dim)
    pops = np.abs(c) ** 2
    if pops[-1] > TAIL_TOL:
        # extend until the Poisson tail clears the threshold
        m = fock_dim
        top = pops[-1]
        amp = c[-1]
        while top > TAIL_TOL:
            amp = amp * alpha / math.sqrt(m)
            top = abs(amp) ** 2
            m += 1
        raise TruncationError(
            f"coherent state alpha={alpha} needs fock_dim at least {m}, got {fock_dim}",
            minimal_dim=m,
        )
    rho = np.outer(c, c.conj())
    return rho / np.trace(rho).real


def thermal_state(nbar: float, fock_dim: int) -> DensityMatrix:
    """Bose-Einstein diagonal state with mean occupation nbar."""
    if nbar < 0:
        raise ValidationError(f"nbar must be nonnegative, got {nbar}")
    if nbar == 0:
        return vacuum_state(fock_dim)
    ratio = nbar / (1.0 + nbar)
    pops = np.exp(np.arange(fock_dim) * math.log(ratio)) / (1.0 + nbar)
    if pops[-1] > TAIL_TOL:
        # p_n = ratio^n / (1+nbar): solve for the first level below threshold
        n_min = math.ceil(math.log(TAIL_TOL * (1.0 + nbar)) / math.log(ratio))
        raise TruncationError(
            f"thermal state nbar={nbar} needs fock_dim at least {n_min + 1}, got {fock_dim}",
            minimal_dim=n_min + 1,
        )
    rho = np.diag(pops).astype(complex)
    return rho / np.trace(rho).real


def displaced_thermal_state(alpha: complex, nbar: float, fock_dim: int) -> DensityMatrix:
    """Thermal state displaced by alpha, constructed in a padded space.

    The displacement is applied at a larger dimension so boundary error from
    the truncated unitary stays far below the tail tolerance, then the state
    is cut back to ``fock_dim`` and renormalized (adjustment <= the tail
    bound by construction).
    """
    if nbar < 0:
        raise ValidationError(f"nbar must be nonnegative, got {nbar}")
    if alpha == 0:
        return thermal_state(nbar, fock_dim)
    if nbar == 0:
        return coherent_state(alpha, fock_dim)
    spread = abs(alpha) ** 2 + nbar * (2.0 * abs(alpha) ** 2 + nbar + 1.0)
    pad = int(math.ceil(abs(alpha) ** 2 + nbar + 12.0 * math.sqrt(spread) + 20))
    # the bare thermal tail can need more room than the variance estimate
    ratio = nbar / (1.0 + nbar)
    thermal_min = math.ceil(math.log(TAIL_TOL * (1.0 + nbar) * 1e-3) / math.log(ratio)) + 2
    pad = max(pad, thermal_min, fock_dim + 8)
    base = thermal_state(nbar, pad)
    disp = displacement(alpha, pad)
    rho_pad = disp @ base @ disp.conj().T
    pops = np.diag(rho_pad).real
    if pops[fock_dim - 1] > TAIL_TOL:
        below = np.flatnonzero(pops <= TAIL_TOL)
        below = below[below > np.argmax(pops)]
        minimal = int(below[0]) + 1 if below.size else pad
        raise TruncationError(
            f"displaced thermal state alpha={alpha}, nbar={nbar} needs fock_dim "
            f"at least {minimal}, got {fock_dim}",
            minimal_dim=minimal,
        )
    rho = rho_pad[:fock_dim, :fock_dim].copy()
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -tr(rho ln rho), dropping eigenvalues below 1e-14."""
    w = np.linalg.eigvalsh(0.5 * (rho + np.asarray(rho).conj().T))
    w = w[w >= ENTROPY_EIG_CUTOFF]
    return float(-np.sum(w * np.log(w)))
