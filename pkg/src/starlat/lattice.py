"""Lattices in low dimension: construction, ball enumeration, primitivity.

A lattice is stored by the user-supplied basis (no silent reduction); all
enumeration goes through an orthogonalization-based coefficient-interval
search, never an unbounded grid scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import (
    BudgetExceeded,
    DimensionTooSmall,
    NotLatticePoint,
    SingularBasis,
)

DEFAULT_POINT_CAP = 10**8

# relative inflation applied to every enumeration interval so that floating
# point rounding can never drop a boundary point
_INFLATE = 1e-9
_SCALED_DET_TOL = 1e-12


@dataclass(frozen=True)
class Lattice:
    """A full-rank lattice given by d basis columns and its cached determinant."""

    dim: int
    basis: np.ndarray  # shape (d, d); columns are the basis vectors
    det: float

    def __post_init__(self):
        self.basis.setflags(write=False)


@dataclass(frozen=True)
class LatticePoint:
    """A lattice point together with its integer coordinates in the basis."""

    coords: tuple[float, ...]
    coeffs: tuple[int, ...]

    @property
    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.coords))

    def is_origin(self) -> bool:
        return all(c == 0 for c in self.coeffs)


def _abs_det(B: np.ndarray) -> float:
    if B.shape[0] == 2:
        # direct formula keeps cancellation error at machine scale even for
        # skewed unimodular bases
        return abs(B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0])
    return abs(np.linalg.det(B))


def make_lattice(columns) -> Lattice:
    """Build a lattice from basis columns, rejecting degenerate input."""
    B = np.array(columns, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise SingularBasis(f"basis must be square, got shape {B.shape}")
    d = B.shape[0]
    if d < 2:
        raise DimensionTooSmall(f"need dimension >= 2, got {d}")
    if not np.all(np.isfinite(B)):
        raise SingularBasis("basis entries must be finite")
    scale = float(np.max(np.linalg.norm(B, axis=0)))
    det = _abs_det(B)
    if scale == 0.0 or det / scale**d <= _SCALED_DET_TOL:
        raise SingularBasis("basis columns are numerically dependent")
    return Lattice(dim=d, basis=B, det=det)


def parse_basis(spec: str) -> np.ndarray:
    """Parse a basis spec like "1,0;0.5,0.866" (semicolons separate columns)."""
    cols = []
    for part in spec.split(";"):
        cols.append([float(tok) for tok in part.split(",")])
    arr = np.array(cols, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"malformed basis spec {spec!r}")
    return arr.T  # each parsed row is one column


def lattice_point(L: Lattice, coeffs) -> LatticePoint:
    c = np.asarray(coeffs, dtype=np.int64)
    x = L.basis @ c
    return LatticePoint(coords=tuple(float(v) for v in x),
                        coeffs=tuple(int(v) for v in c))


def golden_lattice() -> Lattice:
    """Planar lattice with basis (1,1) and ((1+sqrt 5)/2, (1-sqrt 5)/2).

    Every nonzero point has |x1*x2| = |m^2 + mn - n^2|, a nonzero integer,
    which makes it the classical example of a lattice admissible for the
    hyperbola body.
    """
    s = math.sqrt(5.0)
    return make_lattice([[1.0, (1.0 + s) / 2.0], [1.0, (1.0 - s) / 2.0]])


def is_primitive(L: Lattice, p: LatticePoint, tol: float = 1e-9) -> bool:
    """True iff p is nonzero and its integer coefficients are coprime."""
    c = np.asarray(p.coeffs, dtype=np.int64)
    x = L.basis @ c
    err = float(np.linalg.norm(x - np.asarray(p.coords)))
    if err > tol * (1.0 + float(np.linalg.norm(p.coords))):
        raise NotLatticePoint(
            f"coords {p.coords} do not match basis * {p.coeffs}")
    if p.is_origin():
        return False
    return reduce(math.gcd, (abs(int(v)) for v in p.coeffs)) == 1


def perturb_basis(L: Lattice, magnitude: float, seed: int) -> Lattice:
    """Independent uniform offsets of sup-norm <= magnitude on every entry."""
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    rng = np.random.default_rng(seed)
    offsets = rng.uniform(-magnitude, magnitude, size=(L.dim, L.dim))
    return make_lattice(L.basis + offsets)


def random_unimodular(d: int, seed: int, steps: int = 12) -> np.ndarray:
    """Integer matrix of determinant +-1 built from elementary column ops."""
    rng = np.random.default_rng(seed)
    U = np.eye(d, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.integers(0, d, size=2)
        if i == j:
            U[:, [0, i]] = U[:, [i, 0]]
            continue
        U[:, j] += int(rng.integers(-2, 3)) * U[:, i]
    return U


# ---------------------------------------------------------------------------
# enumeration


def _gauss_reduce_2d(B: np.ndarray):
    """Lagrange/Gauss reduction. Returns (W, U) with W = B @ U, det U = +-1."""
    W = B.astype(float).copy()
    U = np.eye(2, dtype=np.int64)
    for _ in range(256):
        if W[:, 1] @ W[:, 1] < W[:, 0] @ W[:, 0]:
            W = W[:, ::-1].copy()
            U = U[:, ::-1].copy()
        mu = round(float((W[:, 0] @ W[:, 1]) / (W[:, 0] @ W[:, 0])))
        if mu == 0:
            break
        W[:, 1] -= mu * W[:, 0]
        U[:, 1] -= mu * U[:, 0]
    return W, U


def _size_reduce(B: np.ndarray):
    """One pass of Gram-Schmidt size reduction (columns). W = B @ U."""
    d = B.shape[0]
    W = B.astype(float).copy()
    U = np.eye(d, dtype=np.int64)
    _, R = np.linalg.qr(W)
    for j in range(1, d):
        for i in range(j - 1, -1, -1):
            mu = round(float(R[i, j] / R[i, i]))
            if mu:
                W[:, j] -= mu * W[:, i]
                U[:, j] -= mu * U[:, i]
                R[:, j] -= mu * R[:, i]
    return W, U


def _reduced_basis(B: np.ndarray):
    if B.shape[0] == 2:
        return _gauss_reduce_2d(B)
    return _size_reduce(B)


def _enum_2d(W: np.ndarray, R: float, cap: int) -> np.ndarray:
    """All integer (m, n) with ||W @ (m, n)|| <= R (vectorized)."""
    G = W.T @ W
    q22 = G[1, 1]
    q11p = G[0, 0] - G[0, 1] ** 2 / q22
    R2 = (R * (1.0 + _INFLATE)) ** 2
    mmax = int(math.floor(math.sqrt(R2 / q11p) * (1.0 + _INFLATE)))
    m = np.arange(-mmax, mmax + 1, dtype=np.int64)
    rem = np.maximum(R2 - q11p * (m * m), 0.0)
    w = np.sqrt(rem / q22) * (1.0 + _INFLATE)
    cen = (-G[0, 1] / q22) * m
    lo = np.ceil(cen - w).astype(np.int64)
    hi = np.floor(cen + w).astype(np.int64)
    cnt = np.maximum(hi - lo + 1, 0)
    total = int(cnt.sum())
    if total > cap:
        raise BudgetExceeded(f"{total} candidates exceed cap {cap}")
    off = np.concatenate(([0], np.cumsum(cnt)[:-1]))
    row = np.repeat(np.arange(len(m)), cnt)
    n = lo[row] + (np.arange(total) - off[row])
    cred = np.stack([m[row], n], axis=1)
    xy = cred @ W.T
    keep = (xy * xy).sum(axis=1) <= R2
    return cred[keep]


def _enum_generic(W: np.ndarray, R: float, cap: int) -> np.ndarray:
    """Fincke-Pohst style recursive enumeration for d >= 3."""
    d = W.shape[0]
    G = W.T @ W
    T = np.linalg.cholesky(G).T  # upper triangular, ||W x||^2 = ||T x||^2
    R2 = (R * (1.0 + _INFLATE)) ** 2
    out: list[list[int]] = []
    xs = [0] * d

    def rec(i: int, rem: float):
        c = sum(T[i, j] * xs[j] for j in range(i + 1, d))
        bound = math.sqrt(max(rem, 0.0)) * (1.0 + _INFLATE)
        lo = math.ceil((-bound - c) / T[i, i])
        hi = math.floor((bound - c) / T[i, i])
        for xi in range(lo, hi + 1):
            val = T[i, i] * xi + c
            rem2 = rem - val * val
            if rem2 < -1e-12 * R2:
                continue
            xs[i] = xi
            if i == 0:
                if len(out) >= cap:
                    raise BudgetExceeded(f"enumeration exceeded cap {cap}")
                out.append(list(xs))
            else:
                rec(i - 1, rem2)
        xs[i] = 0

    rec(d - 1, R2)
    cred = np.array(out, dtype=np.int64).reshape(-1, d)
    xy = cred @ W.T
    keep = (xy * xy).sum(axis=1) <= R2
    return cred[keep]


def enumerate_ball_arrays(L: Lattice, R: float, cap: int = DEFAULT_POINT_CAP,
                          sort: bool = True):
    """All lattice points with Euclidean norm <= R, as arrays.

    Returns (coeffs, coords): integer coefficients w.r.t. the stored basis
    and real coordinates, rows sorted lexicographically by coefficients
    (callers that do order-independent reductions may pass sort=False).
    The origin row is included.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    d = L.dim
    vol = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * R**d
    if vol / L.det > cap:
        raise BudgetExceeded(
            f"predicted point count {vol / L.det:.3g} exceeds cap {cap}")
    W, U = _reduced_basis(L.basis)
    if d == 2:
        cred = _enum_2d(W, R, cap)
    else:
        cred = _enum_generic(W, R, cap)
    coeffs = cred @ U.T  # x = W c = B (U c)
    coords = coeffs @ L.basis.T
    if sort:
        order = np.lexsort(tuple(coeffs[:, k] for k in range(d - 1, -1, -1)))
        coeffs, coords = coeffs[order], coords[order]
    return coeffs, coords


def enumerate_ball(L: Lattice, R: float,
                   cap: int = DEFAULT_POINT_CAP) -> list[LatticePoint]:
    """Object wrapper around :func:`enumerate_ball_arrays`."""
    coeffs, coords = enumerate_ball_arrays(L, R, cap)
    return [
        LatticePoint(coords=tuple(float(v) for v in x),
                     coeffs=tuple(int(v) for v in c))
        for c, x in zip(coeffs, coords)
    ]


def primitive_mask(coeffs: np.ndarray) -> np.ndarray:
    """Boolean mask of rows whose integer coefficients are coprime (and nonzero)."""
    g = np.gcd.reduce(np.abs(coeffs), axis=1)
    return g == 1
