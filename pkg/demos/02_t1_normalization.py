"""The five-dimensional T1 profile against its one-dimensional radial reduction.

T1 = -log(|z1|^2 + |t|^2) [z2 = 0] on C^2 x D(0, 1/2).  Reducing the mass
to a single radial integral leaves a prefactor c / r^2 in front.  With the
unit-mass normalization of dd^c the quadrature agrees with c = 4 to eight
digits, and the profile converges to log 2 / 2 + 1/4 instead of diverging.
With c = 2 every value is off by exactly a factor 2.
"""

import math

import numpy as np

from lelong import DirectionalBall, catalog, euclid, nu_limit, radial_profile
from lelong.oracles import t1_radial

r_euclid = np.array([0.4, 0.2, 0.1, 0.05, 0.025, 0.0125])
prof = radial_profile(catalog("T1"), euclid(), DirectionalBall.disc(0, 0.5), r_euclid ** 2, tol=1e-8)

print(f"{'r_euclid':>9} {'quadrature':>12} {'c = 4':>12} {'c = 2':>12} {'ratio to c=2':>13}")
for re, v in zip(r_euclid, prof.nu):
    four, two = t1_radial(re * re, prefactor=4.0), t1_radial(re * re, prefactor=2.0)
    print(f"{re:9.4f} {v:12.8f} {four:12.8f} {two:12.8f} {v / two:13.8f}")

print("\nlimit:", nu_limit(prof).describe())
print(f"log 2 / 2 + 1/4 = {math.log(2) / 2 + 0.25:.8f}")
