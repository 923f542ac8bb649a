"""Where the delayed response actually comes from, segment by segment.

The linear response is an integral over the ramp history.  Deformed
into the complex ramp plane it splits into four pieces: a small
oscillatory run along the real axis, two Stokes-line halves through the
saddle at mu + i omega0 that each carry sqrt(pi/2) |g| of weight, and a
steepest-ascent arc holding the exponentially growing part.  This
script integrates each piece numerically and lines it up with its
predicted size.

Usage: python demos/contour_anatomy.py
"""

import cmath
import math

import numpy as np

from slowhopf.contour import build_contour, integrate_segments
from slowhopf.core import PhysParams, logpolar_sum
from slowhopf.sources import Gaussian, kernel_g

p = PhysParams(eps=0.01, omega0=0.5, alpha=0.6, d_R=1.0, mu0=-1.0)
source = Gaussian(sigma=0.25)
x, mu = 2.0, 0.3

path = build_contour("Cr", p.mu0, mu, p)
parts = integrate_segments(path, source, x, p)
g = complex(np.asarray(kernel_g(source, x, mu + 1j * p.omega0, p.d)))

print(f"response at x = {x}, mu = {mu}  (eps = {p.eps}, saddle kernel |g| = {abs(g):.4g})")
print()
print("segment            |value|       vs expected")
half = math.sqrt(math.pi / 2)
for q in parts:
    size = math.exp(q["log_amp"])
    if q["kind"].startswith("Stokes"):
        note = f"sqrt(pi/2)|g| = {half * abs(g):.4g}  ({size / (half * abs(g)):.3f}x)"
    elif q["kind"] == "RealAxis":
        note = f"O(sqrt(eps))|g| ~ {math.sqrt(p.eps) * abs(g):.2g}"
    else:
        note = "exponentially grown remainder"
    print(f"{q['kind']:<16} {size:12.4g}   {note}")

la, ph = logpolar_sum(
    [(q["log_amp"], q["phase"]) for q in parts if q["kind"] != "SteepestAscent"]
)
prefactor = cmath.rect(math.exp(la), ph)
target = math.sqrt(2 * math.pi) * g
print()
print("the three pieces before the ascent arc assemble the Stokes prefactor:")
print(f"  numeric    {prefactor:.5g}")
print(f"  sqrt(2pi)g {target:.5g}")
print(f"  rel error  {abs(prefactor - target) / abs(target):.3f}  (shrinks like sqrt(eps))")
