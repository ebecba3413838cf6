"""Exact coefficient expressions: sparse Laurent polynomials with symbols.

A CoeffExpr is a finite sum of monomials with nonzero Gaussian-rational
coefficients.  A monomial is an integer exponent vector over all chart
variables (negative exponents only on log-flagged variables) times a
multiset of formal symbols.  The stored form is canonical, so equality
of expressions is dictionary equality and the zero test is emptiness.
"""

from __future__ import annotations

from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Tuple

from .chart import Chart
from .errors import (ChartMismatchError, ExponentError, NonUnitDivisionError,
                     PoleEvaluationError, UnassignedSymbolError)
from .scalars import ONE, QQi, ZERO, as_scalar


class Monomial(NamedTuple):
    exps: Tuple[int, ...]
    syms: Tuple[Tuple[str, int], ...]  # sorted by name, powers > 0


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps = tuple(x + y for x, y in zip(a.exps, b.exps))
    if not a.syms:
        syms = b.syms
    elif not b.syms:
        syms = a.syms
    else:
        acc: Dict[str, int] = dict(a.syms)
        for name, k in b.syms:
            acc[name] = acc.get(name, 0) + k
        syms = tuple(sorted((n, k) for n, k in acc.items() if k != 0))
    return Monomial(exps, syms)


class CoeffExpr:
    """An exact scalar-valued expression over a fixed chart."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Dict[Monomial, QQi], _validate=True):
        self.chart = chart
        self.terms = terms
        if _validate:
            self._check_exponents()

    def _check_exponents(self):
        for mono in self.terms:
            for i, e in enumerate(mono.exps):
                if e < 0 and not self.chart.is_log(i):
                    raise ExponentError(
                        f"negative power of non-log variable "
                        f"{self.chart.all_vars[i]!r}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, chart: Chart) -> "CoeffExpr":
        return cls(chart, {}, _validate=False)

    @classmethod
    def one(cls, chart: Chart) -> "CoeffExpr":
        return cls.constant(chart, ONE)

    @classmethod
    def constant(cls, chart: Chart, value) -> "CoeffExpr":
        value = as_scalar(value)
        if value.is_zero():
            return cls.zero(chart)
        unit = Monomial((0,) * chart.nvars, ())
        return cls(chart, {unit: value}, _validate=False)

    @classmethod
    def var(cls, chart: Chart, name: str, power: int = 1) -> "CoeffExpr":
        i = chart.var_index(name)
        exps = [0] * chart.nvars
        exps[i] = power
        return cls(chart, {Monomial(tuple(exps), ()): ONE})

    @classmethod
    def symbol(cls, chart: Chart, name: str, power: int = 1) -> "CoeffExpr":
        if name not in chart.symbols:
            raise KeyError(f"symbol {name!r} is not registered on this chart")
        if power < 0:
            raise ExponentError("symbol powers must be nonnegative")
        mono = Monomial((0,) * chart.nvars, ((name, power),) if power else ())
        return cls(chart, {mono: ONE}, _validate=False)

    def _coerce(self, other) -> "CoeffExpr":
        if isinstance(other, CoeffExpr):
            if other.chart is not self.chart:
                raise ChartMismatchError("coefficient expressions from "
                                         "different charts")
            return other
        return CoeffExpr.constant(self.chart, as_scalar(other))

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            s = terms.get(mono, ZERO) + c
            if s.is_zero():
                terms.pop(mono, None)
            else:
                terms[mono] = s
        return CoeffExpr(self.chart, terms, _validate=False)

    __radd__ = __add__

    def __neg__(self):
        return CoeffExpr(self.chart, {m: -c for m, c in self.terms.items()},
                         _validate=False)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms: Dict[Monomial, QQi] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = terms.get(m, ZERO) + c1 * c2
                if s.is_zero():
                    terms.pop(m, None)
                else:
                    terms[m] = s
        return CoeffExpr(self.chart, terms, _validate=False)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        if k < 0:
            return self.unit_inverse() ** (-k)
        out = CoeffExpr.one(self.chart)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, CoeffExpr):
            return self.chart is other.chart and self.terms == other.terms
        if isinstance(other, (int,)) or type(other).__name__ in ("Fraction", "QQi"):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        raise TypeError("CoeffExpr is not hashable")

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and
                                  self._only_mono().exps == (0,) * self.chart.nvars
                                  and not self._only_mono().syms)

    def constant_value(self) -> QQi:
        if self.is_zero():
            return ZERO
        if not self.is_constant():
            raise ValueError("expression is not constant")
        return next(iter(self.terms.values()))

    def is_unit_monomial(self) -> bool:
        """True when the expression is (nonzero constant) * single monomial,
        the only shape certified nowhere-vanishing on the chart."""
        return len(self.terms) == 1

    def _only_mono(self) -> Monomial:
        return next(iter(self.terms))

    # -- calculus ---------------------------------------------------------

    def derivative(self, var: str) -> "CoeffExpr":
        """Partial derivative; conjugate variables are independent, the
        Laurent power rule applies on log variables, and formal symbols
        use their registered tables (product rule across factors)."""
        chart = self.chart
        vi = chart.var_index(var)
        out = CoeffExpr.zero(chart)
        for mono, c in self.terms.items():
            e = mono.exps[vi]
            if e != 0:
                exps = list(mono.exps)
                exps[vi] = e - 1
                out = out + CoeffExpr(chart, {Monomial(tuple(exps), mono.syms):
                                              c * e})
            for name, k in mono.syms:
                rule = chart.symbol_derivative(name, var)
                if rule.is_zero():
                    continue
                rest = list(mono.syms)
                rest.remove((name, k))
                if k > 1:
                    rest.append((name, k - 1))
                base = Monomial(mono.exps, tuple(sorted(rest)))
                out = out + (CoeffExpr(chart, {base: c * k}, _validate=False)
                             * rule)
        return out

    def conjugate(self) -> "CoeffExpr":
        """Swap each variable with its conjugate, conjugate scalars, and
        map symbols through their registered conjugation rules."""
        chart = self.chart
        out = CoeffExpr.zero(chart)
        for mono, c in self.terms.items():
            exps = [0] * chart.nvars
            for i, e in enumerate(mono.exps):
                exps[chart.conj_index(i)] = e
            piece = CoeffExpr(chart, {Monomial(tuple(exps), ()): c.conjugate()})
            for name, k in mono.syms:
                piece = piece * (chart.symbol_conjugate(name) ** k)
            out = out + piece
        return out

    # -- evaluation and substitution --------------------------------------

    def evaluate(self, point: Mapping[str, object],
                 symbol_values: Optional[Mapping[str, object]] = None) -> QQi:
        """Evaluate at a total assignment of variables (and of any symbols
        present).  Hitting a log pole raises PoleEvaluationError."""
        chart = self.chart
        vals = [None] * chart.nvars
        for name, v in point.items():
            vals[chart.var_index(name)] = as_scalar(v)
        svals = {k: as_scalar(v) for k, v in (symbol_values or {}).items()}
        total = ZERO
        for mono, c in self.terms.items():
            acc = c
            for i, e in enumerate(mono.exps):
                if e == 0:
                    continue
                v = vals[i]
                if v is None:
                    raise UnassignedSymbolError(
                        f"variable {chart.all_vars[i]!r} has no value")
                if e < 0 and v.is_zero():
                    raise PoleEvaluationError(
                        f"pole: {chart.all_vars[i]!r} = 0 raised to {e}")
                acc = acc * (v ** e)
            for name, k in mono.syms:
                if name not in svals:
                    raise UnassignedSymbolError(f"symbol {name!r} has no value")
                acc = acc * (svals[name] ** k)
            total = total + acc
        return total

    def substitute(self, assignment: Mapping[str, object]) -> "CoeffExpr":
        """Partially evaluate some variables at exact values."""
        chart = self.chart
        idx = {chart.var_index(k): as_scalar(v) for k, v in assignment.items()}
        out = CoeffExpr.zero(chart)
        for mono, c in self.terms.items():
            acc = c
            exps = list(mono.exps)
            ok = True
            for i, v in idx.items():
                e = exps[i]
                if e == 0:
                    continue
                if e < 0 and v.is_zero():
                    raise PoleEvaluationError(
                        f"pole: {chart.all_vars[i]!r} = 0 raised to {e}")
                if v.is_zero():
                    ok = False
                    break
                acc = acc * (v ** e)
                exps[i] = 0
            if not ok or acc.is_zero():
                continue
            out = out + CoeffExpr(chart, {Monomial(tuple(exps), mono.syms): acc},
                                  _validate=False)
        return out

    def substitute_symbol(self, name: str, value) -> "CoeffExpr":
        """Replace a formal symbol by an exact scalar or expression."""
        repl = value if isinstance(value, CoeffExpr) else \
            CoeffExpr.constant(self.chart, as_scalar(value))
        out = CoeffExpr.zero(self.chart)
        for mono, c in self.terms.items():
            k = dict(mono.syms).get(name, 0)
            rest = tuple(s for s in mono.syms if s[0] != name)
            piece = CoeffExpr(self.chart, {Monomial(mono.exps, rest): c},
                              _validate=False)
            if k:
                piece = piece * (repl ** k)
            out = out + piece
        return out

    # -- unit division ----------------------------------------------------

    def unit_inverse(self) -> "CoeffExpr":
        """Inverse of a single-term expression.  Variable exponents flip
        sign (log-flag permitting); symbol powers may not go negative."""
        if len(self.terms) != 1:
            raise NonUnitDivisionError("only single-term units are invertible")
        mono, c = next(iter(self.terms.items()))
        if mono.syms:
            raise NonUnitDivisionError(
                "cannot invert a monomial containing formal symbols")
        inv = Monomial(tuple(-e for e in mono.exps), ())
        return CoeffExpr(self.chart, {inv: c.inverse()})

    def div_unit(self, unit: "CoeffExpr") -> "CoeffExpr":
        """Exact division by a single-term unit, allowing symbol factors
        provided every term of self is divisible by them."""
        unit = self._coerce(unit)
        if len(unit.terms) != 1:
            raise NonUnitDivisionError("divisor must be a single term")
        umono, uc = next(iter(unit.terms.items()))
        uinv = uc.inverse()
        usyms = dict(umono.syms)
        terms: Dict[Monomial, QQi] = {}
        for mono, c in self.terms.items():
            exps = tuple(e - u for e, u in zip(mono.exps, umono.exps))
            syms = dict(mono.syms)
            for name, k in usyms.items():
                left = syms.get(name, 0) - k
                if left < 0:
                    raise NonUnitDivisionError(
                        f"term not divisible by symbol {name!r}^{k}")
                if left:
                    syms[name] = left
                else:
                    syms.pop(name, None)
            terms[Monomial(exps, tuple(sorted(syms.items())))] = c * uinv
        return CoeffExpr(self.chart, terms)

    # -- inspection -------------------------------------------------------

    def monomials(self) -> Iterable[Tuple[Monomial, QQi]]:
        return sorted(self.terms.items(), key=lambda kv: _mono_key(kv[0]))

    def total_degree(self) -> int:
        """Largest sum of exponents over terms (symbols not counted)."""
        if not self.terms:
            return 0
        return max(sum(m.exps) for m in self.terms)

    def variables_used(self):
        used = set()
        for mono in self.terms:
            for i, e in enumerate(mono.exps):
                if e:
                    used.add(self.chart.all_vars[i])
        return used

    def in_ideal_of(self, var_names) -> bool:
        """True when every monomial has positive exponent on at least one
        of the given variables (membership in the monomial ideal)."""
        idxs = [self.chart.var_index(v) for v in var_names]
        return all(any(m.exps[i] > 0 for i in idxs) for m in self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.monomials():
            factors = []
            for i, e in enumerate(mono.exps):
                if e == 1:
                    factors.append(self.chart.all_vars[i])
                elif e != 0:
                    factors.append(f"{self.chart.all_vars[i]}^{e}")
            for name, k in mono.syms:
                factors.append(name if k == 1 else f"{name}^{k}")
            body = "*".join(factors)
            parts.append(f"{c!r}*{body}" if body else repr(c))
        return " + ".join(parts)

    __repr__ = __str__


def _mono_key(m: Monomial):
    return (sum(m.exps), m.exps, m.syms)
