"""
How large is the nonlinearity from a Helmholtz coil?
====================================================

A magnetized oscillator sits at the centre of a Helmholtz pair. The field
is flat to fourth order, and the quartic deficit sets beta.
"""
import numpy as np

from oscnl.coil import (
    CoilParams,
    beta_strength,
    exact_interaction_energy,
    field_deficit,
    interaction_energy_series,
    quartic_field_coefficient,
)

p = CoilParams(R=80e-9, I=1e-3, N_mag=1e6, a0=50e-12)
print(f"beta = {beta_strength(p):.2f} Hz")
print(f"quartic field coefficient {quartic_field_coefficient(p):.6f} (144/125 = {144 / 125})")

# %% the deficit is quartic at small displacement
for s in (1e-3, 1e-2, 0.1):
    print(f"x/R = {s:g}: deficit {field_deficit(s * p.R, p):.4e}, "
          f"quartic estimate {144 / 125 * s ** 4:.4e}")

x = 1e-3 * p.R
print(f"series vs exact energy at x/R = 1e-3: {interaction_energy_series(x, p) / exact_interaction_energy(x, p):.6f}")

# %% scaling with radius
for R in (50e-9, 80e-9, 120e-9):
    print(f"R = {R * 1e9:.0f} nm: beta = {beta_strength(CoilParams(R=R)):.1f} Hz")
