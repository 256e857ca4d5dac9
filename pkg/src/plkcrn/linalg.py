"""Exact rational linear algebra.

Matrices are numpy object arrays of :class:`fractions.Fraction` (or anything
``qmatrix`` can coerce).  All structural questions (ranks, kernels, subspace
sums and intersections, positivity of subspaces) are answered exactly; floats
only appear in :func:`member` when the query vector is itself a float vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from numbers import Integral, Rational
from typing import Iterable, Sequence

import numpy as np

# relative tolerance for float-vector membership
TAU_LIN = 1e-9


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (Integral, Rational)):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        # decimal literal semantics: 0.1 -> 1/10, not the binary expansion
        return Fraction(repr(float(x)))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def qmatrix(rows, ncols: int | None = None) -> np.ndarray:
    """Coerce a 2-D array-like into an object array of Fractions."""
    rows = [list(r) for r in rows]
    if not rows:
        return np.empty((0, ncols or 0), dtype=object)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged matrix")
    out = np.empty((len(rows), width), dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = to_fraction(x)
    return out


def qvector(v) -> tuple[Fraction, ...]:
    return tuple(to_fraction(x) for x in v)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _integer_rows(M) -> list[list[int]]:
    rows = []
    for r in np.asarray(M, dtype=object).tolist() if len(M) else []:
        fr = [to_fraction(x) for x in r]
        den = reduce(_lcm, (f.denominator for f in fr), 1)
        rows.append([int(f * den) for f in fr])
    return rows


def primitive(v: Sequence) -> tuple[Fraction, ...]:
    """Scale a rational vector to the primitive integer vector on the same ray."""
    fr = [to_fraction(x) for x in v]
    den = reduce(_lcm, (f.denominator for f in fr), 1)
    ints = [int(f * den) for f in fr]
    g = reduce(gcd, (abs(i) for i in ints), 0) or 1
    return tuple(Fraction(i // g) for i in ints)


def rank(M) -> int:
    """Rank by fraction-free (Bareiss) elimination on an integer-scaled copy."""
    A = _integer_rows(M)
    if not A or not A[0]:
        return 0
    nrows, ncols = len(A), len(A[0])
    prev, r = 1, 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        for i in range(r + 1, nrows):
            a_ic = A[i][c]
            row_i, row_r = A[i], A[r]
            for j in range(c + 1, ncols):
                row_i[j] = (p * row_i[j] - a_ic * row_r[j]) // prev
            row_i[c] = 0
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def rref(M) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q. Returns (rows, pivot columns)."""
    A = [[to_fraction(x) for x in r] for r in (np.asarray(M, dtype=object).tolist() if len(M) else [])]
    if not A:
        return [], []
    nrows, ncols = len(A), len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(nrows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return A, pivots


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^ambient_dim.

    The basis is verified independent at construction and stored in reduced
    row echelon form, so two Subspace objects compare equal exactly when they
    are the same subspace.
    """

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...] = ()

    def __post_init__(self):
        rows = [qvector(v) for v in self.basis]
        if any(len(v) != self.ambient_dim for v in rows):
            raise ValueError("basis vector length does not match ambient dimension")
        if rows and rank(rows) != len(rows):
            raise ValueError("basis vectors are linearly dependent")
        R, piv = rref(rows) if rows else ([], [])
        object.__setattr__(self, "basis", tuple(tuple(R[i]) for i in range(len(piv))))

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        rows = [qvector(v) for v in vectors]
        if not rows:
            return cls(ambient_dim)
        R, piv = rref(rows)
        return cls(ambient_dim, tuple(tuple(R[i]) for i in range(len(piv))))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        eye = [[Fraction(int(i == j)) for j in range(ambient_dim)] for i in range(ambient_dim)]
        return cls(ambient_dim, tuple(map(tuple, eye)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> np.ndarray:
        """Basis vectors as rows (dim x ambient_dim, exact)."""
        return qmatrix(self.basis, self.ambient_dim)

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.basis], dtype=float).reshape(
            self.dim, self.ambient_dim
        )

    def orthonormal(self) -> np.ndarray:
        """Float orthonormal basis as rows."""
        if self.dim == 0:
            return np.zeros((0, self.ambient_dim))
        q, _ = np.linalg.qr(self.as_float().T)
        return q.T

    def perp(self) -> "Subspace":
        return orthogonal_complement(self)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def intersect(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def __contains__(self, v) -> bool:
        return member(v, self)

    def __repr__(self) -> str:
        vecs = ", ".join("(" + ", ".join(str(x) for x in v) + ")" for v in self.basis)
        return f"Subspace(dim={self.dim} in Q^{self.ambient_dim}: <{vecs}>)"


def kernel(M) -> Subspace:
    """Right kernel {v : M v = 0}."""
    M = np.asarray(M, dtype=object)
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return Subspace.full(ncols)
    R, piv = rref(M)
    free = [c for c in range(ncols) if c not in piv]
    vecs = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(R, piv):
            v[pc] = -row[f]
        vecs.append(v)
    return Subspace.span(vecs, ncols)


def column_space(M) -> Subspace:
    M = np.asarray(M, dtype=object)
    return Subspace.span(M.T.tolist(), M.shape[0])


def row_space(M) -> Subspace:
    M = np.asarray(M, dtype=object)
    return Subspace.span(M.tolist(), M.shape[1])


def orthogonal_complement(V: Subspace) -> Subspace:
    if V.dim == 0:
        return Subspace.full(V.ambient_dim)
    return kernel(V.matrix)


def _same_ambient(*spaces: Subspace) -> int:
    dims = {s.ambient_dim for s in spaces}
    if len(dims) != 1:
        raise ValueError(f"subspaces live in different ambient spaces: {sorted(dims)}")
    return dims.pop()


def subspace_sum(*spaces: Subspace) -> Subspace:
    d = _same_ambient(*spaces)
    return Subspace.span([v for s in spaces for v in s.basis], d)


def intersect(V: Subspace, W: Subspace) -> Subspace:
    """V ∩ W from the kernel of [B_V; -B_W]^T (independent of complements)."""
    d = _same_ambient(V, W)
    if V.dim == 0 or W.dim == 0:
        return Subspace.zero(d)
    stacked = np.vstack([V.matrix, -W.matrix])
    coeffs = kernel(stacked.T)
    BV = V.matrix
    vecs = [np.dot(np.array(c[: V.dim], dtype=object), BV) for c in coeffs.basis]
    return Subspace.span(vecs, d)


def is_direct_sum(parts: Sequence[Subspace]) -> bool:
    if not parts:
        return True
    return subspace_sum(*parts).dim == sum(p.dim for p in parts)


def member(v, V: Subspace, tol: float = TAU_LIN) -> bool:
    """Membership of v in V: exact for rational input, relative tolerance for floats."""
    if len(v) != V.ambient_dim:
        raise ValueError("vector length does not match ambient dimension")
    if all(isinstance(x, (Integral, Fraction)) for x in v):
        if V.dim == 0:
            return all(x == 0 for x in v)
        return rank(list(V.basis) + [qvector(v)]) == V.dim
    x = np.asarray(v, dtype=float)
    scale = max(1.0, float(np.linalg.norm(x)))
    Q = V.orthonormal()
    resid = x - Q.T @ (Q @ x)
    return float(np.linalg.norm(resid)) <= tol * scale


def _simplex_max(A: list[list[Fraction]], b: list[Fraction], c: list[Fraction]):
    """Maximize c.x subject to A x <= b, x >= 0, with b >= 0 (origin feasible).

    Dense tableau over Q with Bland's rule, so it terminates on degenerate
    problems. Returns (optimum, x) or None if unbounded.
    """
    m, n = len(A), len(c)
    T = [list(A[i]) + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    obj = [-ci for ci in c] + [Fraction(0)] * m + [Fraction(0)]
    basis = [n + i for i in range(m)]
    while True:
        enter = next((j for j in range(n + m) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return None
        i = best[1]
        piv = T[i][enter]
        T[i] = [x / piv for x in T[i]]
        for k in range(m):
            if k != i and T[k][enter] != 0:
                f = T[k][enter]
                T[k] = [x - f * y for x, y in zip(T[k], T[i])]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, T[i])]
        basis[i] = enter
    x = [Fraction(0)] * (n + m)
    for i, bi in enumerate(basis):
        x[bi] = T[i][-1]
    return obj[-1], x[:n]


def contains_positive_vector(V: Subspace) -> tuple[Fraction, ...] | None:
    """A strictly positive vector of V as a primitive integer vector, or None.

    Solves   max t  s.t.  B^T c >= t 1,  t <= 1   exactly over Q, where the
    rows of B are the basis of V; V meets the open orthant iff the optimum is
    positive.
    """
    d, k = V.ambient_dim, V.dim
    if d == 0 or k == 0:
        return None
    B = V.basis
    zero = Fraction(0)
    # variables: c+ (k), c- (k), t
    A = []
    for i in range(d):
        A.append([-B[j][i] for j in range(k)] + [B[j][i] for j in range(k)] + [Fraction(1)])
    A.append([zero] * (2 * k) + [Fraction(1)])
    b = [zero] * d + [Fraction(1)]
    cost = [zero] * (2 * k) + [Fraction(1)]
    res = _simplex_max(A, b, cost)
    assert res is not None, "positivity LP is bounded by construction"
    t, x = res
    if t <= 0:
        return None
    coef = [x[j] - x[k + j] for j in range(k)]
    v = [sum((coef[j] * B[j][i] for j in range(k)), zero) for i in range(d)]
    assert all(vi > 0 for vi in v)
    return primitive(v)
