"""Ergotropy, passive states and work-extraction bounds.

The passive counterpart of a state pairs its eigenvalues, sorted in
descending order, with the energy levels sorted ascending; no unitary can
extract energy from the result. Ergotropy is the energy gap to that
counterpart. The power bound combines the energy derivative with the
entropy derivative weighted by the entropy-equivalent temperature.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import TruncationError, ValidationError
from .operators import (
    DensityMatrix,
    Operator,
    TAIL_TOL,
    displacement,
    expectation,
    hermitian_eig,
    von_neumann_entropy,
)

ERGOTROPY_CLAMP = -1e-10
TEMPERATURE_ENTROPY_TOL = 1e-10
TEMPERATURE_MAX_ITER = 200


def passive_state(rho: DensityMatrix, hamiltonian: Operator) -> DensityMatrix:
    """Energy-minimizing state with the same spectrum as rho."""
    levels, basis = hermitian_eig(hamiltonian)
    occ, _ = hermitian_eig(rho)
    descending = occ[::-1]
    return (basis * descending) @ basis.conj().T


def ergotropy(rho: DensityMatrix, hamiltonian: Operator) -> float:
    """Unitarily extractable work: tr(rho H) minus the passive energy."""
    levels, basis = hermitian_eig(hamiltonian)
    occ = np.linalg.eigvalsh(0.5 * (rho + np.asarray(rho).conj().T))
    passive_energy = float(np.dot(occ[::-1], levels))
    w = expectation(rho, hamiltonian) - passive_energy
    if w < ERGOTROPY_CLAMP:
        raise ValidationError(f"ergotropy came out at {w:.3e}; state or H is malformed")
    return max(w, 0.0)


def ergotropy_from_populations(populations: np.ndarray, levels: np.ndarray) -> float:
    """Ergotropy of a state diagonal in the (ascending) energy eigenbasis."""
    p = np.asarray(populations, dtype=float)
    eps = np.asarray(levels, dtype=float)
    if np.any(np.diff(eps) < 0):
        raise ValidationError("levels must be sorted ascending")
    w = float(np.dot(p, eps) - np.dot(np.sort(p)[::-1], eps))
    if w < ERGOTROPY_CLAMP:
        raise ValidationError(f"ergotropy came out at {w:.3e}; populations are malformed")
    return max(w, 0.0)


def entropy_from_populations(populations: np.ndarray) -> float:
    p = np.asarray(populations, dtype=float)
    p = p[p >= 1e-14]
    return float(-np.sum(p * np.log(p)))


def gibbs_entropy(levels: np.ndarray, temperature: float) -> float:
    """Entropy of exp(-H/T)/Z for the given (any order) energy levels."""
    eps = np.asarray(levels, dtype=float)
    if temperature <= 0:
        ground = np.isclose(eps, eps.min()).sum()
        return math.log(ground)
    x = (eps - eps.min()) / temperature
    w = np.exp(-x)
    z = w.sum()
    return float(math.log(z) + np.dot(x, w) / z)


def effective_temperature_for_spectrum(
    levels: np.ndarray, target_entropy: float
) -> float:
    """Temperature whose Gibbs state on ``levels`` matches ``target_entropy``.

    Bisection runs until the entropy mismatch is at most 1e-10 or 200
    iterations have elapsed, whichever comes first.
    """
    eps = np.asarray(levels, dtype=float)
    if eps.max() == eps.min():
        return 0.0
    if target_entropy <= TEMPERATURE_ENTROPY_TOL:
        return 0.0
    lo = 0.0
    hi = max(1.0, eps.max() - eps.min())
    for _ in range(80):
        if gibbs_entropy(eps, hi) >= target_entropy:
            break
        hi *= 2.0
    for _ in range(TEMPERATURE_MAX_ITER):
        mid = 0.5 * (lo + hi)
        s = gibbs_entropy(eps, mid)
        if abs(s - target_entropy) <= TEMPERATURE_ENTROPY_TOL:
            return mid
        if s < target_entropy:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def effective_temperature(rho: DensityMatrix, hamiltonian: Operator) -> float:
    """Entropy-equivalent temperature of rho with respect to H."""
    levels, _ = hermitian_eig(hamiltonian)
    return effective_temperature_for_spectrum(levels, von_neumann_entropy(rho))


def power_bound(times: np.ndarray, states, hamiltonian: Operator) -> np.ndarray:
    """Extractable-power ceiling along a trajectory of state snapshots.

    Computed as dE/dt - T_eff dS/dt with centered differences inside the
    grid and one-sided second-order stencils at the ends. Needs at least
    three uniformly spaced snapshots.
    """
    t = np.asarray(times, dtype=float)
    if t.size < 3:
        raise ValidationError("power_bound needs at least 3 snapshots")
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise ValidationError("power_bound needs uniformly spaced snapshots")
    levels, _ = hermitian_eig(hamiltonian)
    energy = np.array([expectation(r, hamiltonian) for r in states])
    entropy = np.array([von_neumann_entropy(r) for r in states])
    temp = np.array(
        [effective_temperature_for_spectrum(levels, s) for s in entropy]
    )
    de = np.gradient(energy, t[1] - t[0], edge_order=2)
    ds = np.gradient(entropy, t[1] - t[0], edge_order=2)
    return de - temp * ds


def delta_w_max(
    rho_before: DensityMatrix, rho_after: DensityMatrix, hamiltonian: Operator
) -> float:
    """Change of extractable work between two states."""
    return ergotropy(rho_after, hamiltonian) - ergotropy(rho_before, hamiltonian)


def ignite(rho: DensityMatrix, alpha: complex) -> DensityMatrix:
    """Displace a state by alpha, seeding a coherent component.

    The displaced state must still respect the truncation tail rule in the
    same Fock dimension; otherwise a TruncationError points at the needed
    room.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    d = displacement(alpha, dim)
    out = d @ rho @ d.conj().T
    out = 0.5 * (out + out.conj().T)
    top = float(out[dim - 1, dim - 1].real)
    if top > TAIL_TOL:
        raise TruncationError(
            f"ignition by alpha={alpha} pushes top-level population to {top:.3e}; "
            f"rebuild the state in a larger Fock dimension first",
            minimal_dim=None,
        )
    return out / np.trace(out).real
