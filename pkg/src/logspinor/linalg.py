"""Exact linear algebra over the rationals and Gaussian rationals.

Matrices are lists of lists.  Rational ranks go through fraction-free
(Bareiss) elimination on a denominator-cleared integer matrix; systems
over Q(i) use exact reduced row echelon form.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence, Tuple

from .scalars import QQi


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, QQi) else x == 0


def identity_matrix(n: int, one=Fraction(1), zero=Fraction(0)):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(M):
    return [list(col) for col in zip(*M)] if M else []


def matmul(A, B):
    if not A or not B:
        return []
    cols = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)),
                 start=type(row[0])(0) if not isinstance(row[0], QQi) else QQi(0))
             for col in cols] for row in A]


def mat_vec(A, v):
    out = []
    for row in A:
        acc = None
        for a, x in zip(row, v):
            t = a * x
            acc = t if acc is None else acc + t
        out.append(acc if acc is not None else Fraction(0))
    return out


def bareiss_rank(M: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    A = [list(row) for row in M]
    if not A or not A[0]:
        return 0
    n, m = len(A), len(A[0])
    prev = 1
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, n):
            for j in range(c + 1, m):
                num = A[r][c] * A[i][j] - A[i][c] * A[r][j]
                q, rem = divmod(num, prev)
                if rem:
                    raise ArithmeticError("fraction-free division failed")
                A[i][j] = q
            A[i][c] = 0
        prev = A[r][c]
        r += 1
        if r == n:
            break
    return r


def rank_exact(M) -> int:
    """Exact rank of a matrix with int/Fraction entries."""
    if not M or not M[0]:
        return 0
    cleared = []
    for row in M:
        fr = [Fraction(x) for x in row]
        d = lcm(*(f.denominator for f in fr)) if fr else 1
        cleared.append([int(f * d) for f in fr])
    return bareiss_rank(cleared)


# -- field elimination (works for Fraction and QQi entries) -----------------


def rref(M) -> Tuple[list, List[int]]:
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    A = [list(row) for row in M]
    if not A or not A[0]:
        return A, []
    n, m = len(A), len(A[0])
    pivots: List[int] = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if not _is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = A[r][c] ** -1 if isinstance(A[r][c], QQi) else 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(n):
            if i != r and not _is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return A, pivots


def rank_field(M) -> int:
    return len(rref(M)[1])


def nullspace(M, ncols: Optional[int] = None, zero=None, one=None) -> list:
    """Basis of the right null space of M (list of column vectors).  A
    matrix with no rows has full kernel; pass ncols so the dimension of
    the domain is known in that case."""
    if not M or not M[0]:
        if not ncols:
            return []
        z = zero if zero is not None else Fraction(0)
        o = one if one is not None else Fraction(1)
        return [[o if i == j else z for i in range(ncols)]
                for j in range(ncols)]
    m = len(M[0])
    if zero is None:
        zero = QQi(0) if isinstance(M[0][0], QQi) else Fraction(0)
        one = QQi(1) if isinstance(M[0][0], QQi) else Fraction(1)
    R, pivots = rref(M)
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fc in free:
        v = [zero] * m
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        basis.append(v)
    return basis


def solve(M, b) -> Optional[list]:
    """One exact solution of M x = b, or None if inconsistent."""
    if not M:
        return []
    n, m = len(M), len(M[0])
    aug = [list(row) + [bb] for row, bb in zip(M, b)]
    R, pivots = rref(aug)
    for r in range(len(R)):
        if all(_is_zero(x) for x in R[r][:m]) and not _is_zero(R[r][m]):
            return None
    zero = QQi(0) if isinstance(M[0][0], QQi) else Fraction(0)
    x = [zero] * m
    for r, pc in enumerate(pivots):
        if pc < m:
            x[pc] = R[r][m]
    return x


def inverse(M) -> list:
    n = len(M)
    if n == 0:
        return []
    zero = QQi(0) if isinstance(M[0][0], QQi) else Fraction(0)
    one = QQi(1) if isinstance(M[0][0], QQi) else Fraction(1)
    aug = [list(row) + [one if i == j else zero for j in range(n)]
           for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ArithmeticError("matrix is singular")
    return [row[n:] for row in R[:n]]


class SpanTracker:
    """Incrementally reduced row space, for membership and complements."""

    def __init__(self, dim: int, rows=()):
        self.dim = dim
        self.rows: list = []  # echelon rows
        self.pivots: List[int] = []
        for r in rows:
            self.add(r)

    def reduce(self, v):
        v = list(v)
        for row, p in zip(self.rows, self.pivots):
            if not _is_zero(v[p]):
                f = v[p]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def contains(self, v) -> bool:
        return all(_is_zero(x) for x in self.reduce(v))

    def add(self, v) -> bool:
        """Insert a vector; returns True when it enlarged the span."""
        w = self.reduce(v)
        p = next((i for i, x in enumerate(w) if not _is_zero(x)), None)
        if p is None:
            return False
        inv = w[p] ** -1 if isinstance(w[p], QQi) else 1 / w[p]
        w = [x * inv for x in w]
        for i, (row, q) in enumerate(zip(self.rows, self.pivots)):
            if not _is_zero(row[p]):
                f = row[p]
                self.rows[i] = [x - f * y for x, y in zip(row, w)]
        self.rows.append(w)
        self.pivots.append(p)
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def complement_basis(sub_vectors, ambient_vectors):
    """Vectors from ambient_vectors extending span(sub) to
    span(sub + ambient); these represent a basis of the quotient."""
    if ambient_vectors:
        dim = len(ambient_vectors[0])
    elif sub_vectors:
        dim = len(sub_vectors[0])
    else:
        return []
    tracker = SpanTracker(dim, sub_vectors)
    reps = []
    for v in ambient_vectors:
        if tracker.add(v):
            reps.append(list(v))
    return reps


def coords_in_span(v, basis) -> Optional[list]:
    """Coordinates of v in the given (independent) vectors, or None."""
    if not basis:
        return [] if all(_is_zero(x) for x in v) else None
    M = transpose(basis)
    return solve(M, list(v))
