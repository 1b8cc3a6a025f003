"""Brute-force exterior algebra used as an independent oracle for wedge products of (1,1)-forms."""

import itertools


def _merge(a, b):
    """Concatenate two sorted index tuples; return (sign, merged) or (0, None) on repetition."""
    if set(a) & set(b):
        return 0, None
    seq = list(a) + list(b)
    inversions = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return (-1) ** inversions, tuple(sorted(seq))


def wedge(x, y):
    out = {}
    for ka, va in x.items():
        for kb, vb in y.items():
            sign, key = _merge(ka, kb)
            if sign:
                out[key] = out.get(key, 0) + sign * va * vb
    return out


def one_one_form(H):
    """``sum_jk H_jk dz_j ^ dzbar_k`` with generators dz_j -> 2j, dzbar_k -> 2k+1."""
    N = len(H)
    form = {}
    for j in range(N):
        for k in range(N):
            if H[j][k] != 0:
                sign, key = _merge((2 * j,), (2 * k + 1,))
                form[key] = form.get(key, 0) + sign * H[j][k]
    return form


def top_coefficient(mats):
    """Coefficient of ``prod_j dz_j ^ dzbar_j`` in the wedge of the given (1,1)-forms."""
    N = len(mats[0])
    acc = {(): 1}
    for H in mats:
        acc = wedge(acc, one_one_form(H))
    return acc.get(tuple(range(2 * N)), 0)
