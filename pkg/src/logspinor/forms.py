"""Graded exterior calculus over a chart.

DifferentialForm and Polyvector share one sparse representation: a map
from a sorted tuple of generator indices (the anticommuting factors
dz_i / dz̄_i, respectively ∂_i / ∂̄_i) to a CoeffExpr.  Mixed degrees are
allowed; spinors are even/odd mixtures.  All operations are pure and
return values in canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, Mapping, Optional, Tuple

from .chart import Chart
from .coeffs import CoeffExpr
from .errors import ChartMismatchError, DegreeError
from .scalars import QQi, as_scalar

Word = Tuple[int, ...]  # strictly increasing generator indices


def _merge(a: Word, b: Word) -> Optional[Tuple[int, Word]]:
    """Merge two sorted words, returning (sign, word) or None if they
    share a generator."""
    if set(a) & set(b):
        return None
    out = sorted(a + b)
    # parity of the permutation that sorts the concatenation
    inversions = 0
    for x in a:
        inversions += sum(1 for y in b if y < x)
    return (-1) ** inversions, tuple(out)


def _remove(word: Word, j: int) -> Optional[Tuple[int, Word]]:
    """Contract one generator from the left: sign (-1)^position."""
    if j not in word:
        return None
    t = word.index(j)
    return (-1) ** t, word[:t] + word[t + 1:]


class GradedElement:
    """Common machinery for forms and polyvectors."""

    __slots__ = ("chart", "terms")
    _glyph = "?"

    def __init__(self, chart: Chart, terms: Dict[Word, CoeffExpr]):
        self.chart = chart
        self.terms = {w: c for w, c in terms.items() if not c.is_zero()}

    # -- construction helpers ----------------------------------------------

    @classmethod
    def zero(cls, chart: Chart):
        return cls(chart, {})

    @classmethod
    def from_coeff(cls, coeff: CoeffExpr):
        return cls(coeff.chart, {(): coeff})

    @classmethod
    def scalar(cls, chart: Chart, value):
        return cls(chart, {(): CoeffExpr.constant(chart, as_scalar(value))})

    @classmethod
    def gen(cls, chart: Chart, var: str):
        """The basis generator attached to one chart variable."""
        return cls(chart, {(chart.var_index(var),):
                           CoeffExpr.one(chart)})

    @classmethod
    def term(cls, coeff, gens: Iterable[str]):
        """coeff * (generator wedge) with generators given by variable
        name in the written order (sign normalized automatically)."""
        chart = coeff.chart if isinstance(coeff, CoeffExpr) else None
        if chart is None:
            raise TypeError("term() needs a CoeffExpr coefficient")
        word: Word = ()
        sign = 1
        for v in gens:
            r = _merge(word, (chart.var_index(v),))
            if r is None:
                return cls.zero(chart)
            s, word = r
            sign *= s
        return cls(chart, {word: coeff * sign})

    def _require_same(self, other):
        if not isinstance(other, GradedElement):
            raise TypeError(f"expected a graded element, got {other!r}")
        if type(other) is not type(self):
            raise TypeError("cannot mix forms and polyvectors here")
        if other.chart is not self.chart:
            raise ChartMismatchError("operands live on different charts")

    # -- linear structure ---------------------------------------------------

    def __add__(self, other):
        self._require_same(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            s = terms.get(w)
            s = c if s is None else s + c
            if s.is_zero():
                terms.pop(w, None)
            else:
                terms[w] = s
        return type(self)(self.chart, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return type(self)(self.chart, {w: -c for w, c in self.terms.items()})

    def __mul__(self, scalar):
        if isinstance(scalar, GradedElement):
            return NotImplemented
        c = scalar if isinstance(scalar, CoeffExpr) else \
            CoeffExpr.constant(self.chart, as_scalar(scalar))
        return type(self)(self.chart,
                          {w: cc * c for w, cc in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        return (type(self) is type(other) and self.chart is other.chart
                and self.terms == other.terms)

    def __hash__(self):
        raise TypeError("graded elements are not hashable")

    # -- grading ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degrees(self):
        return sorted({len(w) for w in self.terms})

    def component(self, k: int):
        return type(self)(self.chart,
                          {w: c for w, c in self.terms.items() if len(w) == k})

    def is_homogeneous(self, k: Optional[int] = None) -> bool:
        ds = self.degrees()
        if k is None:
            return len(ds) <= 1
        return ds == [] or ds == [k]

    def homogeneous_parts(self):
        for k in self.degrees():
            yield k, self.component(k)

    # -- wedge ---------------------------------------------------------------

    def wedge(self, other):
        self._require_same(other)
        terms: Dict[Word, CoeffExpr] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                r = _merge(w1, w2)
                if r is None:
                    continue
                sign, w = r
                piece = c1 * c2
                if sign < 0:
                    piece = -piece
                s = terms.get(w)
                s = piece if s is None else s + piece
                if s.is_zero():
                    terms.pop(w, None)
                else:
                    terms[w] = s
        return type(self)(self.chart, terms)

    __xor__ = wedge

    # -- involutions and evaluation ------------------------------------------

    def conjugate(self):
        """Complex conjugation: swaps each generator with its conjugate
        partner, conjugates the coefficients (symbols via their rules)."""
        chart = self.chart
        out = type(self).zero(chart)
        for w, c in self.terms.items():
            mapped = tuple(chart.conj_index(i) for i in w)
            word: Word = ()
            sign = 1
            bad = False
            for j in mapped:
                r = _merge(word, (j,))
                if r is None:
                    bad = True
                    break
                s, word = r
                sign *= s
            if bad:
                continue
            out = out + type(self)(chart, {word: c.conjugate() * sign})
        return out

    def evaluate(self, point: Mapping[str, object],
                 symbol_values: Optional[Mapping[str, object]] = None):
        """Numeric element over Q(i): coefficients evaluated at a point.
        The point may give only the complex variables; conjugates are
        filled in by conjugation."""
        full = self.chart.extend_point(point)
        out: Dict[Word, CoeffExpr] = {}
        for w, c in self.terms.items():
            v = c.evaluate(full, symbol_values)
            if not v.is_zero():
                out[w] = CoeffExpr.constant(self.chart, v)
        return type(self)(self.chart, out)

    def substitute(self, assignment: Mapping[str, object]):
        return type(self)(self.chart, {w: c.substitute(assignment)
                                       for w, c in self.terms.items()})

    def substitute_symbol(self, name: str, value):
        return type(self)(self.chart,
                          {w: c.substitute_symbol(name, value)
                           for w, c in self.terms.items()})

    def map_coeffs(self, f):
        return type(self)(self.chart, {w: f(c) for w, c in self.terms.items()})

    def coefficient(self, gens: Iterable[str]) -> CoeffExpr:
        """Coefficient of the canonical word for the named generators
        (sign-adjusted to the order given)."""
        word: Word = ()
        sign = 1
        for v in gens:
            r = _merge(word, (self.chart.var_index(v),))
            if r is None:
                return CoeffExpr.zero(self.chart)
            s, word = r
            sign *= s
        c = self.terms.get(word)
        if c is None:
            return CoeffExpr.zero(self.chart)
        return c * sign

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.items():
            gens = "^".join(f"{self._glyph}{self.chart.all_vars[i]}" for i in w)
            parts.append(f"({c}){'*' + gens if gens else ''}")
        return " + ".join(parts)

    __repr__ = __str__


class DifferentialForm(GradedElement):
    """A (mixed-degree) differential form with exact coefficients."""

    __slots__ = ()
    _glyph = "d"


class Polyvector(GradedElement):
    """A (mixed-degree) polyvector field with exact coefficients."""

    __slots__ = ()
    _glyph = "@"


# ---------------------------------------------------------------------------
# Operations of the exterior calculus
# ---------------------------------------------------------------------------


def wedge(a: GradedElement, b: GradedElement) -> GradedElement:
    """Graded-commutative exterior product (same chart, same species)."""
    return a.wedge(b)


def exterior_d(a: DifferentialForm) -> DifferentialForm:
    """Exterior derivative: graded Leibniz derivation treating z and z̄ as
    independent, with the Laurent power rule on log variables and the
    registered tables on formal symbols."""
    chart = a.chart
    out = DifferentialForm.zero(chart)
    for w, c in a.terms.items():
        for j, var in enumerate(chart.all_vars):
            dc = c.derivative(var)
            if dc.is_zero():
                continue
            r = _merge((j,), w)
            if r is None:
                continue
            sign, word = r
            out = out + DifferentialForm(chart, {word: dc * sign})
    return out


def interior(p: Polyvector, a: DifferentialForm) -> DifferentialForm:
    """Interior product.  For a decomposable u1^...^uk (indices sorted
    ascending) the convention is i_{u1^...^uk} = i_{u1} o ... o i_{uk}."""
    if not isinstance(p, Polyvector) or not isinstance(a, DifferentialForm):
        raise TypeError("interior(polyvector, form)")
    if p.chart is not a.chart:
        raise ChartMismatchError("operands live on different charts")
    chart = a.chart
    out = DifferentialForm.zero(chart)
    for J, c in p.terms.items():
        for S, c2 in a.terms.items():
            sign = 1
            cur = S
            ok = True
            for j in reversed(J):  # innermost contraction first
                r = _remove(cur, j)
                if r is None:
                    ok = False
                    break
                s, cur = r
                sign *= s
            if ok:
                piece = c * c2
                if sign < 0:
                    piece = -piece
                out = out + DifferentialForm(chart, {cur: piece})
    return out


def coupling(theta: DifferentialForm, p: Polyvector) -> Polyvector:
    """Contraction of a 1-form into a polyvector, dual to `interior`:
    on a decomposable u^v it gives theta(u) v - theta(v) u."""
    if theta.degrees() not in ([], [1]):
        raise DegreeError("coupling expects a 1-form")
    if theta.chart is not p.chart:
        raise ChartMismatchError("operands live on different charts")
    chart = p.chart
    out = Polyvector.zero(chart)
    for (j,), tc in theta.terms.items():
        for J, c in p.terms.items():
            r = _remove(J, j)
            if r is None:
                continue
            sign, word = r
            piece = tc * c
            if sign < 0:
                piece = -piece
            out = out + Polyvector(chart, {word: piece})
    return out


@dataclass(frozen=True)
class GeneralizedVector:
    """An element v + eta of the direct sum of vectors and 1-forms; the
    carrier of the Clifford action, the pairing and the Courant bracket."""

    vector: Polyvector
    one_form: DifferentialForm

    def __post_init__(self):
        if self.vector.chart is not self.one_form.chart:
            raise ChartMismatchError("the two halves live on different charts")
        if not self.vector.is_homogeneous(1):
            raise DegreeError("vector part must be homogeneous of degree 1")
        if not self.one_form.is_homogeneous(1):
            raise DegreeError("form part must be homogeneous of degree 1")

    @property
    def chart(self) -> Chart:
        return self.vector.chart

    @classmethod
    def of(cls, vector: Optional[Polyvector] = None,
           one_form: Optional[DifferentialForm] = None,
           chart: Optional[Chart] = None) -> "GeneralizedVector":
        if chart is None:
            chart = vector.chart if vector is not None else one_form.chart
        return cls(vector if vector is not None else Polyvector.zero(chart),
                   one_form if one_form is not None
                   else DifferentialForm.zero(chart))

    def __add__(self, other: "GeneralizedVector"):
        return GeneralizedVector(self.vector + other.vector,
                                 self.one_form + other.one_form)

    def __sub__(self, other: "GeneralizedVector"):
        return GeneralizedVector(self.vector - other.vector,
                                 self.one_form - other.one_form)

    def __neg__(self):
        return GeneralizedVector(-self.vector, -self.one_form)

    def __mul__(self, scalar):
        return GeneralizedVector(self.vector * scalar, self.one_form * scalar)

    __rmul__ = __mul__

    def conjugate(self):
        return GeneralizedVector(self.vector.conjugate(),
                                 self.one_form.conjugate())

    def evaluate(self, point, symbol_values=None):
        return GeneralizedVector(self.vector.evaluate(point, symbol_values),
                                 self.one_form.evaluate(point, symbol_values))

    def is_zero(self):
        return self.vector.is_zero() and self.one_form.is_zero()

    def __str__(self):
        return f"({self.vector}) + ({self.one_form})"


def clifford_act(e: GeneralizedVector, a: DifferentialForm) -> DifferentialForm:
    """Spin-representation action: (v + eta) . a = i_v a + eta ^ a."""
    return interior(e.vector, a) + e.one_form.wedge(a)


def natural_pairing(e1: GeneralizedVector, e2: GeneralizedVector) -> CoeffExpr:
    """The symmetric bilinear form <v+xi, u+eta> = (xi(u) + eta(v)) / 2."""
    if e1.chart is not e2.chart:
        raise ChartMismatchError("operands live on different charts")
    chart = e1.chart
    half = CoeffExpr.constant(chart, QQi(Fraction(1, 2)))
    total = CoeffExpr.zero(chart)
    for theta, vec in ((e1.one_form, e2.vector), (e2.one_form, e1.vector)):
        for (j,), tc in theta.terms.items():
            c = vec.terms.get((j,))
            if c is not None:
                total = total + tc * c
    return total * half


def lie_derivative(v: Polyvector, a: DifferentialForm) -> DifferentialForm:
    """Lie derivative along a vector field, defined by the homotopy
    formula d(i_v a) + i_v(d a)."""
    if not v.is_homogeneous(1):
        raise DegreeError("Lie derivative needs a degree-1 polyvector")
    return exterior_d(interior(v, a)) + interior(v, exterior_d(a))


def courant_bracket(e1: GeneralizedVector,
                    e2: GeneralizedVector) -> GeneralizedVector:
    """[u+xi, v+eta] = [u,v] + L_u eta - L_v xi - d(i_u eta - i_v xi)/2."""
    u, xi = e1.vector, e1.one_form
    v, eta = e2.vector, e2.one_form
    vec = schouten_bracket(u, v).component(1)
    cross = interior(u, eta) - interior(v, xi)
    form = (lie_derivative(u, eta) - lie_derivative(v, xi)
            - exterior_d(cross) * Fraction(1, 2))
    return GeneralizedVector(vec, form)


# -- Schouten bracket --------------------------------------------------------


def _xi_right_derivative(p: Polyvector, t: int) -> Polyvector:
    """Right Grassmann derivative in the generator slot t."""
    chart = p.chart
    terms: Dict[Word, CoeffExpr] = {}
    for J, c in p.terms.items():
        if t not in J:
            continue
        i = J.index(t)
        sign = (-1) ** (len(J) - 1 - i)
        word = J[:i] + J[i + 1:]
        piece = c if sign > 0 else -c
        s = terms.get(word)
        terms[word] = piece if s is None else s + piece
    return Polyvector(chart, terms)


def _x_derivative(p: Polyvector, var: str) -> Polyvector:
    return Polyvector(p.chart, {J: c.derivative(var)
                                for J, c in p.terms.items()})


def _star(a: Polyvector, b: Polyvector) -> Polyvector:
    out = Polyvector.zero(a.chart)
    for t, var in enumerate(a.chart.all_vars):
        da = _xi_right_derivative(a, t)
        if da.is_zero():
            continue
        db = _x_derivative(b, var)
        if db.is_zero():
            continue
        out = out + da.wedge(db)
    return out


def schouten_bracket(p: Polyvector, q: Polyvector) -> Polyvector:
    """Schouten-Nijenhuis bracket.

    The sign convention is fixed so that the bracket of a bivector with a
    function equals the coupling of the function's differential into the
    bivector, [u^v, f] = (df)(u) v - (df)(v) u, while on vector fields the
    bracket is the ordinary commutator.  With this normalization
    [a, b] = (-1)^{|a||b|} [b, a].
    """
    if not isinstance(p, Polyvector) or not isinstance(q, Polyvector):
        raise TypeError("schouten_bracket(polyvector, polyvector)")
    if p.chart is not q.chart:
        raise ChartMismatchError("operands live on different charts")
    out = Polyvector.zero(p.chart)
    for da, A in p.homogeneous_parts():
        for db, B in q.homogeneous_parts():
            glue = (-1) ** (((da - 1) * (db - 1)) % 2)
            twist = (-1) ** ((da - 1) % 2)
            term = _star(A, B) - _star(B, A) * glue
            out = out + term * twist
    return out


def exp_two_form(w: DifferentialForm,
                 top: Optional[int] = None) -> DifferentialForm:
    """Exponential series of a 2-form, truncated at the chart's top
    degree: sum of w^j / j! for 2j <= top."""
    if not w.is_homogeneous(2):
        raise DegreeError("exp_two_form expects a homogeneous 2-form")
    chart = w.chart
    if top is None:
        top = chart.nvars
    out = DifferentialForm.scalar(chart, 1)
    power = DifferentialForm.scalar(chart, 1)
    for j in range(1, top // 2 + 1):
        power = power.wedge(w)
        if power.is_zero():
            break
        out = out + power * Fraction(1, factorial(j))
    return out


def conjugate_form(a: GradedElement) -> GradedElement:
    return a.conjugate()


def form_real_part(a: GradedElement) -> GradedElement:
    """Coefficient-wise real part.  Meaningful on charts whose generators
    are real coordinates (no conjugate pairing is applied)."""
    return _part(a, lambda c: c.re)


def form_imag_part(a: GradedElement) -> GradedElement:
    return _part(a, lambda c: c.im)


def _part(a: GradedElement, pick):
    out = type(a).zero(a.chart)
    for w, c in a.terms.items():
        terms = {}
        for mono, val in c.terms.items():
            x = pick(val)
            if x != 0:
                terms[mono] = QQi(x)
        piece = CoeffExpr(a.chart, terms, _validate=False)
        if not piece.is_zero():
            out = out + type(a)(a.chart, {w: piece})
    return out
