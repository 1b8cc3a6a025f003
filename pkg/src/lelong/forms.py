"""Pointwise algebra of real (1,1)-forms stored as Hermitian coefficient matrices.

Convention used throughout the package: ``dd^c = (i/2pi) d dbar``.  A Hermitian
matrix ``H`` stands for the form ``(i/2pi) sum_jk H[j,k] dz_j ^ dzbar_k``, so the
Kaehler form ``dd^c|z|^2`` is the identity matrix and the unit disc has mass 1.
A wedge of ``N`` such forms on ``C^N`` is ``c * (i/2pi)^N dz_1 ^ dzbar_1 ^ ...``,
i.e. ``c * pi^{-N}`` times Lebesgue measure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ContractError, EvaluationError

MAX_DIM = 6
HERMITIAN_RTOL = 1e-12


def hermitize(H: np.ndarray) -> np.ndarray:
    """Return ``(H + H^*)/2`` over the last two axes."""
    H = np.asarray(H, dtype=complex)
    return 0.5 * (H + np.conj(np.swapaxes(H, -1, -2)))


@dataclass(frozen=True)
class CPoint:
    """A point ``(z, t)`` of ``C^n x C^m``."""

    coords: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=complex).reshape(-1)
        object.__setattr__(self, "coords", coords)
        if self.n < 0 or self.m < 0 or self.n + self.m < 1:
            raise ContractError(f"invalid split (n, m) = ({self.n}, {self.m})")
        if coords.size != self.n + self.m:
            raise ContractError(f"{coords.size} coordinates for split ({self.n}, {self.m})")

    @property
    def z(self) -> np.ndarray:
        return self.coords[: self.n]

    @property
    def t(self) -> np.ndarray:
        return self.coords[self.n:]


class HermitianForm:
    """Coefficient matrix of a real (1,1)-form at one point."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, check: bool = True):
        M = np.array(matrix, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ContractError(f"form matrix must be square, got shape {M.shape}")
        if check:
            scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
            if np.max(np.abs(M - M.conj().T), initial=0.0) > HERMITIAN_RTOL * scale:
                raise ContractError("form matrix is not Hermitian")
        M = hermitize(M)
        M.setflags(write=False)
        self.matrix = M

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_psd(self, rtol: float = 1e-10) -> bool:
        w = np.linalg.eigvalsh(self.matrix)
        return bool(w.min(initial=0.0) >= -rtol * max(1.0, np.abs(w).max(initial=0.0)))

    def __add__(self, other: "HermitianForm") -> "HermitianForm":
        return HermitianForm(self.matrix + other.matrix, check=False)

    def __mul__(self, a: float) -> "HermitianForm":
        return HermitianForm(a * self.matrix, check=False)

    __rmul__ = __mul__

    def __repr__(self):
        return f"HermitianForm({np.array2string(self.matrix, precision=4)})"


# ---------------------------------------------------------------------------
# scalar fields with complex derivatives
# ---------------------------------------------------------------------------

def _fd_step(x: np.ndarray) -> np.ndarray:
    return 1e-4 * np.maximum(1.0, np.linalg.norm(x, axis=-1))


def fd_gradient(value: Callable, x: np.ndarray) -> np.ndarray:
    """Central-difference ``du/dz_j = (u_x - i u_y)/2``, batched over leading axes."""
    x = np.asarray(x, dtype=complex)
    h = _fd_step(x)[..., None]
    dim = x.shape[-1]
    g = np.empty(x.shape, dtype=complex)
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        ux = (value(x + h * e) - value(x - h * e)) / (2 * h[..., 0])
        uy = (value(x + 1j * h * e) - value(x - 1j * h * e)) / (2 * h[..., 0])
        g[..., j] = 0.5 * (ux - 1j * uy)
    return g


def fd_hessian(value: Callable, x: np.ndarray) -> np.ndarray:
    """Central-difference ``d^2 u / dz_j dzbar_k`` from real second derivatives."""
    x = np.asarray(x, dtype=complex)
    dim = x.shape[-1]
    h = _fd_step(x)
    hb = h[..., None]
    # real directions: 0..dim-1 are x_j, dim..2dim-1 are y_j
    dirs = np.concatenate([np.eye(dim), 1j * np.eye(dim)]).astype(complex)
    D = np.empty(x.shape[:-1] + (2 * dim, 2 * dim))
    for a in range(2 * dim):
        for b in range(a, 2 * dim):
            ea, eb = dirs[a], dirs[b]
            v = (value(x + hb * (ea + eb)) - value(x + hb * (ea - eb))
                 - value(x + hb * (eb - ea)) + value(x - hb * (ea + eb))) / (4 * h * h)
            D[..., a, b] = D[..., b, a] = v
    Dxx = D[..., :dim, :dim]
    Dyy = D[..., dim:, dim:]
    Dxy = D[..., :dim, dim:]
    return hermitize(0.25 * (Dxx + Dyy) + 0.25j * (Dxy - np.swapaxes(Dxy, -1, -2)))


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real C^2 function of complex variables with optional analytic derivatives.

    ``value`` maps an array ``(..., dim)`` to ``(...)``.  ``gradient`` returns
    ``du/dz_j`` with shape ``(..., dim)`` and ``hessian`` returns
    ``d^2u/dz_j dzbar_k`` with shape ``(..., dim, dim)``.  Missing derivatives
    fall back to central differences.
    """

    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray] | None = None
    hessian: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "u"

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=complex))

    def grad(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        g = self.gradient(x) if self.gradient is not None else fd_gradient(self.value, x)
        _check_finite(g, x, self.name, "gradient")
        return g

    def hess(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        H = self.hessian(x) if self.hessian is not None else fd_hessian(self.value, x)
        _check_finite(H, x, self.name, "Hessian")
        return hermitize(H)


def _check_finite(arr, x, name, what):
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr.reshape(arr.shape[: x.ndim - 1] + (-1,))).any(-1))
        coord = x[tuple(bad[0])] if bad.size else x
        raise EvaluationError(f"non-finite {what} of {name} at {np.round(coord, 12)}", coordinate=coord)


def _as_point(p) -> np.ndarray:
    if isinstance(p, CPoint):
        return p.coords
    return np.asarray(p, dtype=complex).reshape(-1)


def complex_hessian(u: ScalarField, p) -> HermitianForm:
    """Coefficient matrix of ``dd^c u`` at ``p``: ``H[j,k] = d^2u/dz_j dzbar_k``."""
    return HermitianForm(u.hess(_as_point(p)), check=False)


def gradient_form(u: ScalarField, p) -> HermitianForm:
    """Coefficient matrix ``g g^*`` of ``du ^ d^c u`` at ``p`` with ``g = du/dz``."""
    g = u.grad(_as_point(p))
    return HermitianForm(np.outer(g, g.conj()), check=False)


def gradient_outer(g: np.ndarray) -> np.ndarray:
    """Batched ``g g^*`` for gradients of shape ``(..., dim)``."""
    return g[..., :, None] * np.conj(g[..., None, :])


# ---------------------------------------------------------------------------
# mixed wedge (mixed discriminant)
# ---------------------------------------------------------------------------

def _real_det(A: np.ndarray) -> np.ndarray:
    N = A.shape[-1]
    if N == 1:
        return A[..., 0, 0].real
    if N == 2:
        return (A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]).real
    return np.linalg.det(A).real


def mixed_wedge(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Batched wedge coefficient of ``N`` (1,1)-forms on ``C^N``.

    ``mats`` holds ``N`` arrays of shape ``(..., N, N)``; identical array objects
    are grouped so repeated factors such as ``beta^{n-k}`` cost fewer
    determinants.  Uses the inclusion-exclusion (polarization) formula
    ``c = sum_S (-1)^{N-|S|} det(sum_{l in S} A_l)``.
    """
    mats = list(mats)
    N = len(mats)
    if N == 0:
        return np.asarray(1.0)
    shape = mats[0].shape
    for A in mats:
        if A.shape[-2:] != (N, N):
            raise ContractError(f"{N} forms need {N}x{N} matrices, got {A.shape[-2:]}")
    if N > MAX_DIM:
        raise ContractError(f"dimension {N} exceeds the cap {MAX_DIM}")

    groups: list[tuple[np.ndarray, int]] = []
    for A in mats:
        for i, (B, mult) in enumerate(groups):
            if B is A:
                groups[i] = (B, mult + 1)
                break
        else:
            groups.append((A, 1))

    lead = np.broadcast_shapes(*(A.shape[:-2] for A in mats))
    total = np.zeros(lead)
    for counts in itertools.product(*(range(mult + 1) for _, mult in groups)):
        if not any(counts):
            continue
        coef = 1
        S = np.zeros(lead + (N, N), dtype=complex)
        for (A, mult), j in zip(groups, counts):
            coef *= math.comb(mult, j) * (-1) ** (mult - j)
            if j:
                S = S + j * A
        total = total + coef * _real_det(S)
    return total


def mixed_wedge_coeff(forms: Sequence[HermitianForm]) -> float:
    """Coefficient ``c`` with ``gamma_1 ^ ... ^ gamma_N = c (i/2pi)^N dz_1^dzbar_1^...``."""
    forms = list(forms)
    if not forms:
        return 1.0
    N = len(forms)
    for f in forms:
        if f.dim != N:
            raise ContractError(f"{N} forms need dimension {N}, got a form of dimension {f.dim}")
    return float(mixed_wedge([f.matrix for f in forms]))


def mixed_wedge_by_permutations(forms: Sequence[HermitianForm]) -> float:
    """Row-permutation expansion ``c = sum_pi det[row_i of A_{pi(i)}]``.

    Slower than :func:`mixed_wedge_coeff`; kept as an independent route.
    """
    mats = [f.matrix for f in forms]
    N = len(mats)
    total = 0.0
    for perm in itertools.permutations(range(N)):
        M = np.array([mats[perm[i]][i] for i in range(N)])
        total += float(np.linalg.det(M).real) if N else 1.0
    return total


def restrict_indices(N: int, J: Sequence[int]) -> np.ndarray:
    J = set(J)
    return np.array([i for i in range(N) if i not in J], dtype=int)


def restrict_matrix(H: np.ndarray, J: Sequence[int]) -> np.ndarray:
    """Batched principal submatrix deleting rows and columns in ``J``."""
    if not len(J):
        return H
    keep = restrict_indices(H.shape[-1], J)
    return H[..., keep[:, None], keep[None, :]]


def restrict_form(H: HermitianForm, J: Sequence[int]) -> HermitianForm:
    """Pullback to the slice ``{z_J = 0}``: delete rows and columns in ``J``."""
    return HermitianForm(restrict_matrix(H.matrix, list(J)), check=False)


def embed_block(H: np.ndarray, N: int, offset: int) -> np.ndarray:
    """Place a batched ``(..., d, d)`` block at ``[offset:offset+d]`` of an ``N x N`` zero matrix."""
    d = H.shape[-1]
    out = np.zeros(H.shape[:-2] + (N, N), dtype=complex)
    out[..., offset:offset + d, offset:offset + d] = H
    return out
