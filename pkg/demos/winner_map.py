"""Which curve calls the exit where: buffer vs homogeneous re-emergence.

Two mechanisms compete to end the quiet phase.  Near a strong source
the quasi-steady response seeds the instability and the buffer curve
mu_stbc wins; far away, whatever is left of the initial data grows back
first and the exit locks to the homogeneous curve mu_h, flat near
-mu0.  This script maps the winner across the domain for order-one
cosine data over a sharp Gaussian source and prints where the two
curves trade places.

No PDE run involved - everything here is asymptotics.  Takes a few
seconds of root finding.  Usage: python demos/winner_map.py
"""

from itertools import groupby

import numpy as np

from slowhopf.analysis import classify_case, predicted_exit
from slowhopf.asymptotics import Cosine
from slowhopf.core import Grid, PhysParams
from slowhopf.sources import Gaussian

p = PhysParams(eps=0.01, omega0=0.5, alpha=0.6, d_R=3.0, d_I=1.0, mu0=-1.2)
source = Gaussian(sigma=0.25)
data = Cosine(n=10, amplitude=1.0, ell=50.0)
# dx = 0.4 keeps the sample points off the cosine's nodal lines, where
# nothing survives the dive and mu_h spikes above everything else
grid = Grid(50.0, 251)

pred = predicted_exit(source, data, p, grid)
report = classify_case(pred, p)

print(f"case {report.case}: mixed winner pattern" if report.case == 2 else f"case {report.case}")
print(f"crossovers at x = {', '.join(f'{c:+.1f}' for c in report.crossovers)}")
print()
print("winner runs across the domain:")
i = 0
for name, chunk in groupby(report.winner):
    n = len(list(chunk))
    lo, hi = grid.x[i], grid.x[i + n - 1]
    print(f"  [{lo:+6.1f}, {hi:+6.1f}]  {name}")
    i += n
print()
print("   x    mu_stbc-or-mu_h (winner)")
for x_want in (0.0, 20.0, 36.0, 40.0, 48.0):
    j = int(np.argmin(np.abs(grid.x - x_want)))
    print(f"{grid.x[j]:5.1f}   {pred.mu[j]:8.4f}  ({pred.winner[j]})")
print()
print(f"outside |x| ~ {abs(report.crossovers[-1]):.0f} the exits sit near -mu0 = {-p.mu0}:")
outer = np.abs(grid.x) >= abs(report.crossovers[-1]) + 2.0
flat = pred.mu[outer & np.isfinite(pred.mu)]
print(f"  {flat.min():.3f} .. {flat.max():.3f} over the outer wings")
