"""Changing the weight: phi -> phi^p and phi -> psi.

For T2 the profile under |z|^4 still has limit 1, not p^(n-k) = 2; the
difference is carried exactly by the dd^c correction term.  For T3 the ratio
nu(psi) / nu(phi) is l^(n-k) when psi behaves like phi^l at 0.
"""

from lelong import (DirectionalBall, catalog, comparison_check, euclid, geometric_grid, power_weight, scaled,
                    scaling_check)

phi = euclid()
grid = geometric_grid(0.5, 0.5, 8)
one, half = DirectionalBall.disc(0, 1.0), DirectionalBall.disc(0, 0.5)

for name, B, p in (("T2", one, 2), ("T3", half, 2), ("T4", half, 3)):
    rep = scaling_check(catalog(name), phi, B, p, grid, tol=1e-6)
    print(f"{name}, p = {p}: limit under phi^p = {rep.lhs_limit.value:.6f}, predicted {rep.predicted:.6f}, "
          f"naive {rep.naive:.6f}, residuals within error: {rep.passes()}")

T3 = catalog("T3")
for label, psi, ell in (("|z|^4", power_weight(euclid(), 2), 2), ("3|z|^2", scaled(3.0), 1)):
    rep = comparison_check(T3, phi, psi, ell, half, geometric_grid(0.25, 0.5, 8), tol=1e-6)
    print(f"T3 ratio for psi = {label}: {rep.ratio:.6f} +/- {rep.ratio_error:.1e} (bound {rep.bound:g})")
