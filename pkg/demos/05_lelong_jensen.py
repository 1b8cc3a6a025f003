"""Lelong-Jensen balance on an annulus.

Weighted masses at r2 and r1, the annulus integral and the dd^c term must
cancel.  The residual is compared with the summed quadrature errors.
"""

from lelong import DirectionalBall, catalog, euclid, lelong_jensen_residual

one = DirectionalBall.disc(0, 1.0)
for name, p, q in (("TS", 1, 0), ("T2", 1, 0), ("TS4", 2, 1)):
    chk = lelong_jensen_residual(catalog(name), euclid(), one, 0.04, 0.25, p, q, tol=1e-6)
    terms = ", ".join(f"{k} = {v.value:+.6f}" for k, v in chk.terms.items())
    print(f"{name} (p={p}, q={q}): {terms}")
    print(f"    residual {chk.residual:+.2e}, combined error {chk.error:.2e}, passes: {chk.passes()}")
