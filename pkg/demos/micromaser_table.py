"""Micromaser rates next to the quantized-amplifier efficiency bound.

For a beam of excited atoms crossing the cavity, the photon generation
rate is R = r_a (g tau)^2 and the best-case efficiency is nu/omega0.
Treating the piston as a quantized system tightens that bound to
nu/(omega0 + nu): the upper sideband, not the bare line, carries the
heat input.
"""

from qpiston import micromaser_compare

NU, OMEGA0 = 1.0, 10.0

print(f"{'r_a':>6}  {'g*tau':>6}  {'rate':>10}  {'P_out':>10}  "
      f"{'P_in':>10}  {'eta_max':>8}  {'quantized':>10}")
for r_a in (0.5, 1.0, 2.0):
    for gtau in (0.02, 0.05, 0.1):
        mc = micromaser_compare(r_a=r_a, g=gtau, tau=1.0, nu=NU, omega0=OMEGA0)
        print(f"{r_a:>6.1f}  {gtau:>6.2f}  {mc.rate:>10.2e}  "
              f"{mc.generated_power:>10.2e}  {mc.input_power:>10.2e}  "
              f"{mc.eta_max:>8.4f}  {mc.quantized_eta_bound:>10.4f}")

print()
print(f"classical bound nu/omega0      = {NU / OMEGA0:.6f}")
print(f"quantized bound nu/(omega0+nu) = {NU / (OMEGA0 + NU):.6f}")
print("the quantized engine pays the sideband energy, so its ceiling is lower")
