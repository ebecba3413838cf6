"""Cochain complexes, double complexes, and exact-sequence solving.

All dimensions are computed from explicit rational matrices: second-page
entries of a double complex come from explicit subquotient bases (kernel
lifts modulo images), never from dimension arithmetic, so degeneration
of the associated spectral sequence is checked per instance rather than
assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import (SpanTracker, complement_basis, coords_in_span, matmul,
                     nullspace, rank_exact, rref)

Matrix = List[List[Fraction]]


def _as_matrix(rows, cols, M) -> Matrix:
    if M is None:
        return [[Fraction(0)] * cols for _ in range(rows)]
    out = [[Fraction(x) for x in row] for row in M]
    if len(out) != rows or any(len(r) != cols for r in out):
        raise ValueError(f"expected a {rows}x{cols} matrix")
    return out


def _is_zero_matrix(M) -> bool:
    return all(x == 0 for row in M for x in row)


def canonical_rank_matrix(rows: int, cols: int, rank: int) -> Matrix:
    """The rank-r matrix with a leading identity block, used to realize
    known ranks in finite models."""
    if rank > min(rows, cols) or rank < 0:
        raise ValueError("rank out of range")
    M = [[Fraction(0)] * cols for _ in range(rows)]
    for i in range(rank):
        M[i][i] = Fraction(1)
    return M


class CochainComplex:
    """A finite complex of rational vector spaces; the relation
    d_{k+1} d_k = 0 is certified at construction."""

    def __init__(self, dims: Sequence[int], diffs: Sequence[Optional[Matrix]]):
        self.dims = list(dims)
        if len(diffs) != max(len(self.dims) - 1, 0):
            raise ValueError("need exactly one differential per adjacent pair")
        self.diffs = [
            _as_matrix(self.dims[k + 1], self.dims[k], d)
            for k, d in enumerate(diffs)
        ]
        for k in range(len(self.diffs) - 1):
            if self.dims[k] and self.dims[k + 2]:
                if not _is_zero_matrix(matmul(self.diffs[k + 1], self.diffs[k])):
                    raise ValueError(f"d_{k + 1} d_{k} is nonzero")

    def rank(self, k: int) -> int:
        if k < 0 or k >= len(self.diffs):
            return 0
        return rank_exact(self.diffs[k])

    def cohomology_dims(self) -> List[int]:
        """dim H^k = dim_k - rank d_k - rank d_{k-1}."""
        return [
            self.dims[k] - self.rank(k) - self.rank(k - 1)
            for k in range(len(self.dims))
        ]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * d for k, d in enumerate(self.dims))


# ---------------------------------------------------------------------------
# Double complexes and spectral pages
# ---------------------------------------------------------------------------


@dataclass
class SpectralReport:
    e1: List[List[int]]
    e2: List[List[int]]
    total: List[int]
    degenerate: bool

    def e2_totals(self) -> List[int]:
        P = len(self.e2)
        Q = len(self.e2[0]) if P else 0
        out = [0] * (P + Q - 1) if P and Q else []
        for p in range(P):
            for q in range(Q):
                out[p + q] += self.e2[p][q]
        return out

    def to_json(self) -> dict:
        return {"e1": self.e1, "e2": self.e2, "total": self.total,
                "e2_totals": self.e2_totals(), "degenerate": self.degenerate}


class DoubleComplex:
    """A first-quadrant grid with horizontal maps (p,q)->(p+1,q) and
    vertical maps (p,q)->(p,q+1); rows and columns are complexes and the
    two differentials anticommute (certified at construction)."""

    def __init__(self, dims: Sequence[Sequence[int]],
                 horizontal: Dict[Tuple[int, int], Matrix],
                 vertical: Dict[Tuple[int, int], Matrix]):
        # dims[p][q]
        self.P = len(dims)
        self.Q = len(dims[0]) if self.P else 0
        if any(len(col) != self.Q for col in dims):
            raise ValueError("ragged dimension grid")
        self.dims = [list(col) for col in dims]
        self.h: Dict[Tuple[int, int], Matrix] = {}
        self.v: Dict[Tuple[int, int], Matrix] = {}
        for p in range(self.P - 1):
            for q in range(self.Q):
                self.h[p, q] = _as_matrix(self.dims[p + 1][q],
                                          self.dims[p][q],
                                          horizontal.get((p, q)))
        for p in range(self.P):
            for q in range(self.Q - 1):
                self.v[p, q] = _as_matrix(self.dims[p][q + 1],
                                          self.dims[p][q],
                                          vertical.get((p, q)))
        self._certify()

    def dim(self, p: int, q: int) -> int:
        if 0 <= p < self.P and 0 <= q < self.Q:
            return self.dims[p][q]
        return 0

    def hmap(self, p: int, q: int) -> Matrix:
        return self.h.get((p, q),
                          _as_matrix(self.dim(p + 1, q), self.dim(p, q), None))

    def vmap(self, p: int, q: int) -> Matrix:
        return self.v.get((p, q),
                          _as_matrix(self.dim(p, q + 1), self.dim(p, q), None))

    def _certify(self):
        for p in range(self.P - 2):
            for q in range(self.Q):
                if not _is_zero_matrix(matmul(self.hmap(p + 1, q),
                                              self.hmap(p, q))):
                    raise ValueError(f"row q={q} is not a complex at p={p}")
        for p in range(self.P):
            for q in range(self.Q - 2):
                if not _is_zero_matrix(matmul(self.vmap(p, q + 1),
                                              self.vmap(p, q))):
                    raise ValueError(f"column p={p} is not a complex at q={q}")
        for p in range(self.P - 1):
            for q in range(self.Q - 1):
                anti = matmul(self.vmap(p + 1, q), self.hmap(p, q))
                comm = matmul(self.hmap(p, q + 1), self.vmap(p, q))
                s = [[a + b for a, b in zip(r1, r2)]
                     for r1, r2 in zip(anti, comm)]
                if not _is_zero_matrix(s):
                    raise ValueError(f"differentials fail to anticommute "
                                     f"at ({p},{q})")

    # -- total complex ------------------------------------------------------

    def total_complex(self) -> CochainComplex:
        K = self.P + self.Q - 1 if self.P and self.Q else 0
        blocks = [[(p, k - p) for p in range(self.P)
                   if 0 <= k - p < self.Q] for k in range(K)]
        dims = [sum(self.dim(p, q) for p, q in blk) for blk in blocks]
        offs = []
        for blk in blocks:
            off = {}
            run = 0
            for p, q in blk:
                off[p, q] = run
                run += self.dim(p, q)
            offs.append(off)
        diffs = []
        for k in range(K - 1):
            D = [[Fraction(0)] * dims[k] for _ in range(dims[k + 1])]
            for p, q in blocks[k]:
                src = offs[k][p, q]
                if (p + 1, q) in offs[k + 1]:
                    dst = offs[k + 1][p + 1, q]
                    M = self.hmap(p, q)
                    for i in range(self.dim(p + 1, q)):
                        for j in range(self.dim(p, q)):
                            D[dst + i][src + j] = M[i][j]
                if (p, q + 1) in offs[k + 1]:
                    dst = offs[k + 1][p, q + 1]
                    M = self.vmap(p, q)
                    for i in range(self.dim(p, q + 1)):
                        for j in range(self.dim(p, q)):
                            D[dst + i][src + j] = M[i][j]
            diffs.append(D)
        return CochainComplex(dims, diffs)

    # -- spectral pages -------------------------------------------------------

    def spectral_pages(self) -> SpectralReport:
        """First page by column (vertical) cohomology, second page by the
        induced horizontal maps on explicit representatives."""
        reps: Dict[Tuple[int, int], list] = {}
        images: Dict[Tuple[int, int], list] = {}
        e1 = [[0] * self.Q for _ in range(self.P)]
        for p in range(self.P):
            for q in range(self.Q):
                n = self.dim(p, q)
                if n == 0:
                    reps[p, q] = []
                    images[p, q] = []
                    continue
                kerv = nullspace(self.vmap(p, q), ncols=n) \
                    if q < self.Q - 1 else \
                    [[Fraction(1) if i == j else Fraction(0) for i in range(n)]
                     for j in range(n)]
                img = []
                if q > 0:
                    below = self.vmap(p, q - 1)
                    for j in range(self.dim(p, q - 1)):
                        img.append([below[i][j] for i in range(n)])
                img = _independent(img)
                images[p, q] = img
                reps[p, q] = complement_basis(img, kerv)
                e1[p][q] = len(reps[p, q])

        # induced horizontal maps on first-page classes
        d1: Dict[Tuple[int, int], list] = {}
        for p in range(self.P - 1):
            for q in range(self.Q):
                src = reps[p, q]
                dst_img = images[p + 1, q]
                dst_rep = reps[p + 1, q]
                cols = []
                for r in src:
                    v = [sum(row[j] * r[j] for j in range(len(r)))
                         if r else Fraction(0)
                         for row in self.hmap(p, q)]
                    coords = coords_in_span(v, dst_img + dst_rep)
                    if coords is None:
                        raise ValueError("horizontal map left the first page")
                    cols.append(coords[len(dst_img):])
                d1[p, q] = [list(row) for row in zip(*cols)] if cols else \
                    [[] for _ in range(len(dst_rep))]

        e2 = [[0] * self.Q for _ in range(self.P)]
        for p in range(self.P):
            for q in range(self.Q):
                n1 = e1[p][q]
                if n1 == 0:
                    continue
                out = d1.get((p, q))
                if out is None or len(out) == 0:
                    ker = [[Fraction(1) if i == j else Fraction(0)
                            for i in range(n1)] for j in range(n1)]
                else:
                    ker = nullspace(out)
                img = []
                into = d1.get((p - 1, q))
                ncols = len(into[0]) if into and into[0:] else 0
                for j in range(ncols):
                    img.append([into[i][j] for i in range(n1)])
                img = _independent(img)
                e2[p][q] = len(complement_basis(img, ker))

        total = self.total_complex().cohomology_dims()
        e2_tot = [0] * len(total)
        for p in range(self.P):
            for q in range(self.Q):
                e2_tot[p + q] += e2[p][q]
        return SpectralReport(e1, e2, total, e2_tot == total)


def _independent(vectors):
    if not vectors:
        return []
    tracker = SpanTracker(len(vectors[0]))
    out = []
    for v in vectors:
        if tracker.add(v):
            out.append(list(v))
    return out


# ---------------------------------------------------------------------------
# Exact sequence solving
# ---------------------------------------------------------------------------


@dataclass
class Slot:
    name: str
    dim: Optional[int]  # None = unknown


@dataclass
class ExactSequenceProblem:
    """An exact sequence of finite-dimensional spaces.

    Exactness is imposed at every interior slot (all but the first and
    last); cap a sequence with explicit zero slots to assert injectivity
    or surjectivity at the ends.  ranks may pin the rank of the map
    slot i -> slot i+1.
    """

    slots: List[Slot]
    ranks: Dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_dims(cls, named_dims, ranks=None) -> "ExactSequenceProblem":
        slots = [Slot(str(n), d) for n, d in named_dims]
        return cls(slots, dict(ranks or {}))


@dataclass
class SequenceSolution:
    status: str  # "solved" | "inconsistent" | "under-determined"
    dims: Dict[str, int] = field(default_factory=dict)
    ranks: Dict[int, int] = field(default_factory=dict)
    certificate: Optional[dict] = None
    free: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"status": self.status, "dims": self.dims,
               "ranks": {str(k): v for k, v in self.ranks.items()}}
        if self.certificate:
            out["certificate"] = self.certificate
        if self.free:
            out["free"] = self.free
        return out


def _solve_window(slots: List[Slot], ranks: Dict[int, int], lo: int, hi: int):
    """Solve exactness equations for interior slots lo..hi (inclusive).

    Returns (status, dimvals, rankvals, free_names).  Variables are the
    unknown dims and the ranks of maps touching the window.
    """
    n = len(slots)
    var_index: Dict[str, int] = {}

    def vid(name):
        if name not in var_index:
            var_index[name] = len(var_index)
        return var_index[name]

    rows = []

    def rank_term(i, row, sign):
        if i < 0 or i >= n - 1:
            return Fraction(0)  # no map beyond the ends
        if slots[i].dim == 0 or slots[i + 1].dim == 0:
            return Fraction(0)  # maps into/out of a zero space vanish
        if i in ranks:
            return Fraction(sign * ranks[i])
        row[vid(f"r{i}")] = row.get(vid(f"r{i}"), Fraction(0)) + sign
        return Fraction(0)

    consts = []
    for k in range(max(lo, 1), min(hi, n - 2) + 1):
        row: Dict[int, Fraction] = {}
        const = Fraction(0)
        # dim_k - r_{k-1} - r_k = 0
        if slots[k].dim is None:
            row[vid(f"d{k}")] = Fraction(1)
        else:
            const += slots[k].dim
        const += rank_term(k - 1, row, -1)
        const += rank_term(k, row, -1)
        rows.append(row)
        consts.append(-const)  # move constants to rhs: sum(row) = -const? see below

    nvars = len(var_index)
    if not rows:
        return "solved", {}, {}, []
    M = [[Fraction(0)] * nvars for _ in rows]
    b = []
    for r, (row, c) in enumerate(zip(rows, consts)):
        for j, coef in row.items():
            M[r][j] = coef
        b.append(c)
    R, pivots = rref([row + [bb] for row, bb in zip(M, b)])
    for row in R:
        if all(x == 0 for x in row[:nvars]) and row[nvars] != 0:
            return "inconsistent", {}, {}, []
    free = [name for name, j in var_index.items() if j not in pivots]
    if free:
        return "under-determined", {}, {}, sorted(free)
    sol = [Fraction(0)] * nvars
    for r, pc in enumerate(pivots):
        if pc < nvars:
            sol[pc] = R[r][nvars]
    dimvals: Dict[str, int] = {}
    rankvals: Dict[int, int] = {}
    for name, j in var_index.items():
        v = sol[j]
        if v.denominator != 1:
            return "inconsistent", {}, {}, []
        if name.startswith("d"):
            dimvals[name] = int(v)
        else:
            rankvals[int(name[1:])] = int(v)
    return "solved", dimvals, rankvals, []


def solve_exact_sequence(problem: ExactSequenceProblem) -> SequenceSolution:
    """Unique assignment, an inconsistency certificate with the shortest
    bad window, or the list of free parameters."""
    slots = problem.slots
    n = len(slots)
    status, dimvals, rankvals, free = _solve_window(slots, problem.ranks,
                                                    0, n - 1)
    if status == "under-determined":
        return SequenceSolution("under-determined", free=free)

    def full_ranks():
        out = dict(problem.ranks)
        for i in range(n - 1):
            if slots[i].dim == 0 or slots[i + 1].dim == 0:
                out.setdefault(i, 0)
        out.update(rankvals)
        return out

    if status == "solved":
        dims = {}
        unconstrained = []
        for k, s in enumerate(slots):
            if s.dim is not None:
                dims[s.name] = s.dim
            elif f"d{k}" in dimvals:
                dims[s.name] = dimvals[f"d{k}"]
            else:
                unconstrained.append(s.name)  # an open end slot
        if unconstrained:
            return SequenceSolution("under-determined", free=unconstrained)
        ranks = full_ranks()
        bad = _violations(slots, dims, ranks, n)
        if not bad:
            return SequenceSolution("solved", dims, ranks)
    # find the shortest inconsistent window
    for width in range(1, n):
        for lo in range(1, n - 1):
            hi = min(lo + width - 1, n - 2)
            st, dv, rv, fr = _solve_window(slots, problem.ranks, lo, hi)
            bad_window = st == "inconsistent"
            if st == "solved":
                dims = {s.name: (s.dim if s.dim is not None
                                 else dv.get(f"d{k}"))
                        for k, s in enumerate(slots[lo:hi + 1], start=lo)}
                ranks = dict(problem.ranks)
                ranks.update(rv)
                bad_window = bool(_violations(slots, dims, ranks, n,
                                              lo, hi))
            if bad_window:
                names = [s.name for s in slots[max(lo - 1, 0):hi + 2]]
                return SequenceSolution(
                    "inconsistent",
                    certificate={"window": names,
                                 "slots": [lo, hi],
                                 "reason": "no nonnegative integer ranks "
                                           "satisfy exactness here"})
    return SequenceSolution(
        "inconsistent",
        certificate={"window": [s.name for s in slots],
                     "slots": [0, n - 1],
                     "reason": "global system is infeasible"})


def _violations(slots, dims, ranks, n, lo=0, hi=None):
    """Rank bound violations 0 <= r_i <= min(dim_i, dim_{i+1}) plus
    exactness re-check on solved dims."""
    hi = n - 2 if hi is None else hi
    bad = []
    for i, r in ranks.items():
        if not (lo - 1 <= i <= hi + 1):
            continue
        di = dims.get(slots[i].name, slots[i].dim) if i < n else None
        dj = dims.get(slots[i + 1].name, slots[i + 1].dim) if i + 1 < n else None
        if r < 0:
            bad.append(i)
        if di is not None and r > di:
            bad.append(i)
        if dj is not None and r > dj:
            bad.append(i)
    for k in range(max(lo, 1), min(hi, n - 2) + 1):
        dk = dims.get(slots[k].name, slots[k].dim)
        r_in = ranks.get(k - 1)
        r_out = ranks.get(k)
        if None not in (dk, r_in, r_out) and dk != r_in + r_out:
            bad.append(k)
    return bad


def verify_exactness(problem: ExactSequenceProblem,
                     solution: SequenceSolution) -> bool:
    """Substitute a solved assignment back and check every interior slot."""
    if solution.status != "solved":
        return False
    slots = problem.slots
    n = len(slots)
    for k in range(1, n - 1):
        dk = solution.dims[slots[k].name]
        r_in = solution.ranks.get(k - 1, 0)
        r_out = solution.ranks.get(k, 0)
        if dk != r_in + r_out:
            return False
    for i, r in solution.ranks.items():
        lo = solution.dims[slots[i].name]
        hi = solution.dims[slots[i + 1].name]
        if r < 0 or r > min(lo, hi):
            return False
    return True
