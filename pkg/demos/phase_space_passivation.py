"""Phase-space picture of passivation.

A displaced peak is the signature of extractable work; a profile that
only falls from the origin is passive. Evolving a coherent state and a
Fock state through the same amplifier shows the first keeping its
off-center peak and growing its work capacity, while the second smears
into a broad ring that has lost most of its initial capacity (the
rising stretch the indicator still finds is the shrinking remnant).
Writes passivation_q.svg.
"""

import pathlib

import numpy as np

from qpiston import PistonChannel, StateSpec, channel_propagate, ergotropy
from qpiston.phasespace import (
    PhaseGrid,
    grid_mass,
    quasiprobability_grid,
    radial_nonpassivity_indicator,
    suggested_extent,
)
from qpiston.svgplot import heat_panel

CYCLES = 300.0
ch = PistonChannel(gamma=-1.39e-4, diffusion=1.39e-3, nu=1.0)
t_final = CYCLES * 2 * np.pi

panels = []
for spec in ("coherent:2.0", "fock:4"):
    rho = StateSpec.parse(spec).build(48)
    rho = channel_propagate(rho, ch, t_final)
    dim = rho.shape[0]
    h_p = np.diag(np.arange(dim, dtype=float)).astype(complex)
    grid = PhaseGrid(extent=suggested_extent(rho), points=101)
    vals = quasiprobability_grid(rho, grid)
    ind = radial_nonpassivity_indicator(rho)
    print(f"{spec} after {CYCLES:.0f} cycles: W_max {ergotropy(rho, h_p):.4f}, "
          f"grid mass {grid_mass(grid, vals):.4f}, "
          f"max radial Q slope {ind.max_slope:+.2e} at r={ind.radius:.2f} "
          f"({'nonpassive' if ind.nonpassive else 'passive profile'})")
    panels.append((f"{spec} at cycle {CYCLES:.0f}", grid, vals))

out = pathlib.Path(__file__).with_name("passivation_q.svg")
heat_panel(out, panels, title="Husimi Q after amplification")
print(f"wrote {out}")
