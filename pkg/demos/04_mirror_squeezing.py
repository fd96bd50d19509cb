"""
Quadrature variances of the mirror
==================================

Variances are in units where the vacuum gives 1. Below 1 in either
quadrature is squeezing.
"""
import numpy as np

from oscnl import OptomechParams
from oscnl.analytic import mirror_reduced_series
from oscnl.dynamics import TimeGrid
from oscnl.quantify import quadrature_variances

grid = TimeGrid(0.0, 4 * np.pi, 801)

for alpha2, beta in ((5.0, 1e-4), (5.0, 0.0), (0.0, 1e-4)):
    p = OptomechParams.from_ratios(beta, 0.06)
    states = mirror_reduced_series(np.sqrt(alpha2), 0.0, p, grid.times, tol=1e-12)
    q = quadrature_variances(states, grid.times)
    k = np.argmin(q.min_variance)
    print(f"|alpha|^2 = {alpha2}, beta/zeta = {beta:g}: min variance {q.min_variance[k]:.8f} "
          f"at zeta t = {grid.times[k]:.3f}, min dQ^2 dP^2 = {(q.var_q * q.var_p).min():.10f}")
