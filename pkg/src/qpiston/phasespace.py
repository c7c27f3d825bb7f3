"""Husimi phase-space views of piston states.

The Q function exists for every density matrix, so ring-shaped gain
states and smooth thermal states live on the same footing. The radial
indicator summarizes the angle-averaged profile; it is advisory, the
operational passivity call is ergotropy.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .operators import DensityMatrix, require_density_matrix

__all__ = [
    "PhaseGrid",
    "RadialIndicator",
    "husimi",
    "quasiprobability_grid",
    "grid_mass",
    "suggested_extent",
    "radial_profile",
    "radial_slope",
    "radial_nonpassivity_indicator",
]


@dataclass(frozen=True)
class PhaseGrid:
    """Square sampling window |Re a|, |Im a| <= extent with points^2 nodes."""

    extent: float
    points: int = 101

    def __post_init__(self):
        if self.extent <= 0:
            raise ValidationError(f"extent must be positive, got {self.extent}")
        if self.points < 2:
            raise ValidationError(f"points must be >= 2, got {self.points}")

    def axis(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.points)

    @property
    def step(self) -> float:
        return 2.0 * self.extent / (self.points - 1)


def _coherent_rows(alphas: np.ndarray, dim: int) -> np.ndarray:
    """Rows <n|alpha> for a flat array of phase-space points.

    The e^{-|a|^2/2} prefactor is folded in from the start so every
    entry stays a square-root Poisson weight, representable far past
    the amplitudes this package ever visits.
    """
    alphas = np.asarray(alphas, dtype=complex).ravel()
    rows = np.empty((alphas.size, dim), dtype=complex)
    rows[:, 0] = np.exp(-0.5 * np.abs(alphas) ** 2)
    for n in range(1, dim):
        rows[:, n] = rows[:, n - 1] * alphas / math.sqrt(n)
    return rows


def husimi(rho: DensityMatrix, alphas) -> np.ndarray:
    """Q(a) = <a|rho|a>/pi evaluated at arbitrary complex points."""
    require_density_matrix(rho)
    alphas = np.asarray(alphas, dtype=complex)
    rows = _coherent_rows(alphas, rho.shape[0])
    vals = np.einsum("pn,nm,pm->p", rows.conj(), rho, rows).real / math.pi
    return vals.reshape(alphas.shape)


def quasiprobability_grid(rho: DensityMatrix, grid: PhaseGrid) -> np.ndarray:
    """Husimi Q sampled on the grid; out[iy, ix] = Q(x[ix] + i y[iy])."""
    ax = grid.axis()
    pts = ax[None, :] + 1j * ax[:, None]
    return husimi(rho, pts)


def grid_mass(grid: PhaseGrid, values: np.ndarray) -> float:
    """Trapezoid estimate of the integral of a grid field over the plane."""
    ax = grid.axis()
    return float(np.trapezoid(np.trapezoid(values, ax, axis=1), ax))


def suggested_extent(rho: DensityMatrix) -> float:
    """Window half-width covering the state's occupied radii."""
    p = np.diag(rho).real
    occupied = np.nonzero(p > 1e-12)[0]
    top = int(occupied[-1]) if occupied.size else 0
    return math.sqrt(top + 1.0) + 3.0


def _log_factorials(dim: int) -> np.ndarray:
    if dim == 1:
        return np.zeros(1)
    return np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, dim, dtype=float)))])


def _poisson_table(populations: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """t[k, n] = e^{-r_k^2} r_k^{2n} / n! via logs; rows for each radius."""
    dim = populations.size
    r2 = radii**2
    n = np.arange(dim, dtype=float)
    logt = -r2[:, None] + np.log(r2)[:, None] * n - _log_factorials(dim)[None, :]
    return np.exp(logt)


def _as_populations(populations) -> np.ndarray:
    p = np.asarray(populations, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValidationError("populations must be a 1d array")
    return p


def _check_radii(radii: np.ndarray):
    if radii.ndim != 1 or radii.size < 1 or np.any(radii <= 0):
        raise ValidationError("radii must be a 1d array of positive values")


def radial_profile(populations, radii) -> np.ndarray:
    """Angle-averaged Q at each radius.

    Coherences carry e^{i(m-n)phi} factors that integrate to zero, so
    the average depends on the populations alone:
    Q_rad(r) = (1/pi) sum_n p_n e^{-r^2} r^{2n} / n!.
    """
    p = _as_populations(populations)
    radii = np.asarray(radii, dtype=float)
    _check_radii(radii)
    return (_poisson_table(p, radii) @ p) / math.pi


def radial_slope(populations, radii) -> np.ndarray:
    """Exact d/dr of the angle-averaged Q at each radius."""
    p = _as_populations(populations)
    radii = np.asarray(radii, dtype=float)
    _check_radii(radii)
    t = _poisson_table(p, radii)
    n = np.arange(p.size, dtype=float)
    inner = (t * (n[None, :] - radii[:, None] ** 2)) @ p
    return (2.0 / (math.pi * radii)) * inner


@dataclass(frozen=True)
class RadialIndicator:
    """Largest radial derivative of the angle-averaged Q and where it sits."""

    max_slope: float
    radius: float

    @property
    def nonpassive(self) -> bool:
        return self.max_slope > 0.0


def radial_nonpassivity_indicator(
    rho: DensityMatrix, radii: np.ndarray = None
) -> RadialIndicator:
    """Scan the angle-averaged Q for a rising stretch.

    A positive maximum slope flags ring- or peak-shaped structure away
    from the origin; zero or negative means the profile only falls.
    """
    require_density_matrix(rho)
    p = np.diag(rho).real
    if radii is None:
        r_max = suggested_extent(rho)
        radii = np.linspace(0.0, r_max, 801)[1:]
    else:
        radii = np.asarray(radii, dtype=float)
        _check_radii(radii)
    slopes = radial_slope(p, radii)
    k = int(np.argmax(slopes))
    return RadialIndicator(max_slope=float(slopes[k]), radius=float(radii[k]))
