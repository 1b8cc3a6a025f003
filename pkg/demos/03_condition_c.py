"""Integrability of s -> nu(dd^c T, s) / s at 0 and the monotone function g.

T2: nu(dd^c T2, s) = -1, so the integral diverges and g is never formed.
T3: dd^c T3 has no mass near 0 and g is the constant 7/32.
TS: nu(dd^c TS, s) ~ s^2 and g(r) = 3r/2 - r^2/2 increases with r.
"""

from lelong import ConditionCError, DirectionalBall, catalog, condition_c, euclid, g_function, g_profile, geometric_grid

phi = euclid()
grid = geometric_grid(0.25, 0.5, 8)
cases = [("T2", DirectionalBall.disc(0, 1.0)), ("T3", DirectionalBall.disc(0, 0.5)),
         ("T4", DirectionalBall.disc(0, 0.5)), ("TS", DirectionalBall.disc(0, 1.0))]

for name, B in cases:
    rep = condition_c(catalog(name), phi, B, grid, tol=1e-7)
    print(f"{name}: {rep.verdict:16s} exponent {rep.exponent:6.3f}  tail integral {rep.tail_integral:.4g}")

try:
    g_function(catalog("T2"), phi, cases[0][1], 0.25)
except ConditionCError as exc:
    print("\ng(T2) refused:", exc)

print("\ng(TS) against 3r/2 - r^2/2:")
for r, g in zip(grid, g_profile(catalog("TS"), phi, cases[3][1], grid, tol=1e-8)):
    print(f"  r = {r:.5f}  g = {g.value:.8f} +/- {g.error:.1e}   closed form {1.5 * r - r * r / 2:.8f}")
