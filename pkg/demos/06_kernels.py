"""Wedge coefficients by two routes and the quadrature calibration table."""

import numpy as np

from lelong import HermitianForm, mixed_wedge_by_permutations, mixed_wedge_coeff
from lelong.calibration import run_calibration

rng = np.random.default_rng(0)
for N in (1, 2, 3, 4):
    mats = []
    for _ in range(N):
        A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        mats.append(HermitianForm(A @ A.conj().T))
    a, b = mixed_wedge_coeff(mats), mixed_wedge_by_permutations(mats)
    print(f"N = {N}: polarization {a:.12g}, permutations {b:.12g}")

print(f"\n{'case':34} {'exact':>12} {'estimate':>12} {'true err':>9} {'reported':>9} honest")
for c in run_calibration(tol=1e-6):
    print(f"{c.name:34} {c.exact:12.8f} {c.estimate.value:12.8f} {c.true_error:9.1e} "
          f"{c.estimate.error:9.1e} {c.honest}")
