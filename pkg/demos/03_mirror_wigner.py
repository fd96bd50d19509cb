"""
Wigner function of a mirror driven by radiation pressure
========================================================

The cavity starts coherent, the mirror in vacuum. After tracing out the
cavity, the mirror is a Poisson mixture of small coherent branches, each
rotated by the mirror's own Kerr term. We compute W on a grid for a weak
and a stronger nonlinearity and look at its minimum.
"""
import numpy as np

from oscnl.quantify import WignerGrid, auto_wigner_grid, wigner, wigner_integral
from oscnl.scenarios import mirror_state

params = {"alpha2": 1.0, "eta": 0.0, "g_over_zeta": 1e-2, "omega_k": 10.0, "tol": 1e-12}
grid = WignerGrid.square(3.0, 81)

for beta in (0.0, 1e-4):
    rho = mirror_state(params, beta, np.pi / 4)
    W = wigner(rho, grid)
    print(f"beta/zeta = {beta:g}: min W = {W.min():.2e}, integral = {wigner_integral(W, grid):.6f}")

# %% the two engines give the same mirror state
a = mirror_state(params, 1e-4, np.pi / 4, "analytic")
b = mirror_state(params, 1e-4, np.pi / 4, "numeric")
d = min(a.space.dim, b.space.dim)
print(f"analytic vs numeric engine: max entry difference {np.abs(a.matrix[:d, :d] - b.matrix[:d, :d]).max():.1e}")

# %% stronger coupling and nonlinearity, for comparison; g/zeta = 0.3 is past the
# weak-coupling range of the closed form and triggers a warning
for g, beta in ((1e-2, 0.05), (0.3, 0.2)):
    rho = mirror_state({**params, "alpha2": 2.0, "g_over_zeta": g}, beta, np.pi / 4)
    grid2 = auto_wigner_grid(rho, resolution=121)
    print(f"g/zeta = {g}, beta/zeta = {beta}: min W = {wigner(rho, grid2).min():.2e}")
