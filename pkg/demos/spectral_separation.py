"""How bath spectra select gain or loss.

The qubit exchanges quanta at its bare line and at the two sidebands
shifted by the piston frequency. Sliding a narrow hot line across that
neighborhood flips the derived drift: hot weight on the upper sideband
pumps the piston (gain), weight on the lower one damps it. A single
bath can never pump, whatever its shape.
"""

import numpy as np

from qpiston import BathSpectrum, EngineParams, FlatWindow, Lorentzian, derive_channel

OMEGA0, NU = 10.0, 1.0
cold = BathSpectrum("cold", 2.0, FlatWindow(omega_lo=0.0, omega_hi=10.2, height=0.05))

print(f"{'hot line center':>16}  {'drift gamma':>12}  {'diffusion':>12}  regime")
for center in np.linspace(OMEGA0 - NU, OMEGA0 + NU, 9):
    hot = BathSpectrum("hot", 20.0, Lorentzian(center=float(center), width=0.2,
                                               height=0.05))
    params = EngineParams(omega0=OMEGA0, nu=NU, g=0.05, fock_dim=24,
                          hot=hot, cold=cold)
    ch = derive_channel(params)
    regime = "gain" if ch.gamma < 0 else "loss"
    print(f"{center:>16.2f}  {ch.gamma:>12.3e}  {ch.diffusion:>12.3e}  {regime}")

print()
print("same spectrum feeding both ports (one effective bath):")
for center in (OMEGA0 - NU, OMEGA0 + NU):
    prof = Lorentzian(center=float(center), width=0.2, height=0.05)
    spec = BathSpectrum("hot", 20.0, prof)
    params = EngineParams(omega0=OMEGA0, nu=NU, g=0.05, fock_dim=24,
                          hot=spec, cold=BathSpectrum("cold", 20.0, prof))
    ch = derive_channel(params)
    print(f"  center {center:.1f}: gamma {ch.gamma:+.3e} (always loss)")
