"""Full versus directional Lelong numbers.

T2 = [z2 = 0] in C^2 has normalized mass exactly 1 at every radius.  The
function -log|z|^2 on C^2 has no Lelong number at 0 (its profile grows like
-log r) but the same function seen on C x D(0, 1/2), sliced in the last
coordinate, has a finite directional limit log 2 / 2 + 1/4.
"""

import math

from lelong import DirectionalBall, catalog, euclid, geometric_grid, nu_at, nu_limit, radial_profile

phi = euclid()

print("T2 on D(0,1):")
for r in (0.5, 0.1, 0.01):
    est = nu_at(catalog("T2"), phi, DirectionalBall.disc(0, 1.0), r, tol=1e-8)
    print(f"  r = {r:<5g} nu = {est.value:.12f} +/- {est.error:.1e}")

grid = geometric_grid(0.25, 0.5, 10)
full = radial_profile(catalog("T0"), phi, DirectionalBall.whole(), grid, tol=1e-7)
print("\n-log|z|^2 on C^2, whole space:")
for r, v in zip(full.grid, full.nu):
    print(f"  r = {r:.3e}  nu = {v:.6f}   1 - log r = {1 - math.log(r):.6f}")
print("  limit:", nu_limit(full).describe())

directional = radial_profile(catalog("T0", split=(1, 1)), phi, DirectionalBall.disc(0, 0.5), grid, tol=1e-7)
print("\n-log|z|^2 on C x D(0,1/2):")
print("  limit:", nu_limit(directional).describe(), f"(log 2 / 2 + 1/4 = {math.log(2) / 2 + 0.25:.6f})")
