"""Coordinate charts: variables, logarithmic flags, and formal symbols.

A chart owns an ordered list of complex variables together with their
conjugates, which are independent commuting symbols.  Variables flagged
logarithmic admit negative exponents (and so poles along their zero
locus); the conjugate of a log variable is automatically logarithmic.

Formal function symbols carry user-registered partial-derivative tables
and an optional conjugation rule.  A symbol with an all-zero table is a
constant parameter; a symbol registered opaque raises when the exterior
derivative or conjugation needs a rule it does not have.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .errors import MissingRuleError
from .scalars import QQi, as_scalar


@dataclass
class FormalSymbol:
    """A named scalar symbol with registered calculus rules.

    derivatives maps variable name -> CoefficientExpression; variables
    absent from a registered table have derivative zero.  A value of
    None means "no table registered": differentiation errors out.
    """

    name: str
    derivatives: Optional[dict] = None
    conjugate: Optional[object] = None  # CoefficientExpression or None


class Chart:
    """An immutable-after-setup coordinate chart.

    Symbols may be registered (in dependency order, or via
    set_symbol_rules for mutually conjugate pairs) before the chart is
    used for computation; afterwards everything is treated as frozen.
    """

    def __init__(self, complex_vars, log_vars=(), conjugate_vars=None):
        self.complex_vars: Tuple[str, ...] = tuple(complex_vars)
        if conjugate_vars is None:
            conjugate_vars = tuple(v + "_bar" for v in self.complex_vars)
        self.conjugate_vars: Tuple[str, ...] = tuple(conjugate_vars)
        if len(self.complex_vars) != len(self.conjugate_vars):
            raise ValueError("conjugate_vars must match complex_vars in length")
        self.all_vars: Tuple[str, ...] = self.complex_vars + self.conjugate_vars
        if len(set(self.all_vars)) != len(self.all_vars):
            raise ValueError("variable names must be distinct")
        self._index: Dict[str, int] = {v: i for i, v in enumerate(self.all_vars)}
        for v in log_vars:
            if v not in self.complex_vars:
                raise ValueError(f"log variable {v!r} is not a complex variable")
        n = len(self.complex_vars)
        log_idx = set()
        for v in log_vars:
            i = self._index[v]
            log_idx.add(i)
            log_idx.add(i + n)  # the conjugate of a log variable is logarithmic
        self.log_indices = frozenset(log_idx)
        self.symbols: Dict[str, FormalSymbol] = {}

    # -- variables --------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.all_vars)

    def var_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not a variable of this chart") from None

    def conj_index(self, i: int) -> int:
        n = len(self.complex_vars)
        return i + n if i < n else i - n

    def conj_var_name(self, name: str) -> str:
        return self.all_vars[self.conj_index(self.var_index(name))]

    def is_log(self, i: int) -> bool:
        return i in self.log_indices

    # -- symbols ----------------------------------------------------------

    def add_symbol(self, name, derivatives=None, conjugate=None, real=False,
                   opaque=False):
        """Register a formal symbol and return it as an expression.

        With no arguments the symbol is a constant parameter (all partial
        derivatives zero) whose conjugation rule, unless supplied, is
        unregistered; real=True makes it self-conjugate.  opaque=True
        registers no derivative table at all, so differentiation raises.
        """
        from .coeffs import CoeffExpr  # local import to avoid a cycle

        if name in self._index or name in self.symbols:
            raise ValueError(f"name {name!r} already in use on this chart")
        if opaque:
            table = None
        else:
            table = {}
            for var, expr in (derivatives or {}).items():
                self.var_index(var)  # validates the key
                table[var] = self._as_coeff(expr)
        sym = FormalSymbol(name, table, None)
        self.symbols[name] = sym
        out = CoeffExpr.symbol(self, name)
        if real:
            sym.conjugate = out
        elif conjugate is not None:
            sym.conjugate = self._as_coeff(conjugate)
        return out

    def set_symbol_rules(self, name, derivatives=None, conjugate=None):
        """Attach rules after registration (needed for conjugate pairs)."""
        sym = self.symbols[name]
        if derivatives is not None:
            table = dict(sym.derivatives or {})
            for var, expr in derivatives.items():
                self.var_index(var)
                table[var] = self._as_coeff(expr)
            sym.derivatives = table
        if conjugate is not None:
            sym.conjugate = self._as_coeff(conjugate)

    def symbol_derivative(self, name: str, var: str):
        from .coeffs import CoeffExpr

        sym = self.symbols[name]
        if sym.derivatives is None:
            raise MissingRuleError(
                f"symbol {name!r} has no derivative table (opaque)")
        return sym.derivatives.get(var, CoeffExpr.zero(self))

    def symbol_conjugate(self, name: str):
        sym = self.symbols[name]
        if sym.conjugate is None:
            raise MissingRuleError(f"symbol {name!r} has no conjugation rule")
        return sym.conjugate

    def _as_coeff(self, x):
        from .coeffs import CoeffExpr

        if isinstance(x, CoeffExpr):
            if x.chart is not self:
                raise ValueError("rule expression belongs to a different chart")
            return x
        return CoeffExpr.constant(self, as_scalar(x))

    # -- points -----------------------------------------------------------

    def extend_point(self, point) -> Dict[str, QQi]:
        """Complete a partial point: conjugate variables not given
        explicitly receive the conjugated value of their partner."""
        full: Dict[str, QQi] = {}
        for k, v in point.items():
            self.var_index(k)
            full[k] = as_scalar(v)
        n = len(self.complex_vars)
        for i, name in enumerate(self.complex_vars):
            bar = self.all_vars[i + n]
            if name in full and bar not in full:
                full[bar] = full[name].conjugate()
            elif bar in full and name not in full:
                full[name] = full[bar].conjugate()
        return full

    def __repr__(self):
        logs = sorted(self.all_vars[i] for i in self.log_indices
                      if i < len(self.complex_vars))
        return f"Chart(vars={list(self.complex_vars)}, log={logs})"
