"""Expression files: a small JSON AST over a declared chart.

A document is {"chart": {...}, "expr": <node>}.  Node kinds: var,
conj_var, rat, gauss_rat, symbol, add, mul, pow, wedge, d, interior,
clifford, schouten, courant, exp2, conj, plus the two constructors the
calculus needs for its other carriers: pvec (a polyvector generator)
and gvec (a vector plus 1-form pair).

The canonical printer emits a deterministic sorted term order, so
print -> parse -> print is byte-stable and parse(print(x)) == x.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple, Union

from .chart import Chart
from .coeffs import CoeffExpr, Monomial
from .errors import SchemaError
from .forms import (DifferentialForm, GeneralizedVector, GradedElement,
                    Polyvector, clifford_act, courant_bracket, exp_two_form,
                    exterior_d, interior, schouten_bracket)
from .scalars import QQi

Value = Union[QQi, CoeffExpr, DifferentialForm, Polyvector, GeneralizedVector]


def _frac(text, path) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational {text!r}: {exc}", path) from None


# ---------------------------------------------------------------------------
# Chart headers
# ---------------------------------------------------------------------------


def parse_chart(spec: dict, path: str = "$.chart") -> Chart:
    if not isinstance(spec, dict):
        raise SchemaError("chart must be an object", path)
    try:
        cvars = tuple(spec["complex_vars"])
    except KeyError:
        raise SchemaError("missing complex_vars", path) from None
    chart = Chart(cvars, log_vars=tuple(spec.get("log_vars", ())))
    symbols = spec.get("symbols", [])
    for i, sym in enumerate(symbols):
        name = sym.get("name")
        if not isinstance(name, str):
            raise SchemaError("symbol needs a name", f"{path}.symbols[{i}]")
        chart.add_symbol(name, opaque=True)
    for i, sym in enumerate(symbols):
        spath = f"{path}.symbols[{i}]"
        name = sym["name"]
        derivs = sym.get("derivatives")
        table = None
        if derivs is not None:
            table = {}
            for var, node in sorted(derivs.items()):
                table[var] = _as_coeff(
                    parse_expr(node, chart, f"{spath}.derivatives.{var}"),
                    chart, f"{spath}.derivatives.{var}")
        conj = sym.get("conjugate")
        conj_expr = None
        if conj is not None:
            conj_expr = _as_coeff(parse_expr(conj, chart, f"{spath}.conjugate"),
                                  chart, f"{spath}.conjugate")
        if table is not None:
            chart.symbols[name].derivatives = table
        if conj_expr is not None:
            chart.symbols[name].conjugate = conj_expr
    return chart


def print_chart(chart: Chart) -> dict:
    logs = sorted(chart.all_vars[i] for i in chart.log_indices
                  if i < len(chart.complex_vars))
    symbols = []
    for name in sorted(chart.symbols):
        sym = chart.symbols[name]
        entry: Dict[str, Any] = {"name": name}
        if sym.derivatives is not None:
            entry["derivatives"] = {
                var: print_value(expr)
                for var, expr in sorted(sym.derivatives.items())
                if not expr.is_zero()
            }
        if sym.conjugate is not None:
            entry["conjugate"] = print_value(sym.conjugate)
        symbols.append(entry)
    return {"complex_vars": list(chart.complex_vars), "log_vars": logs,
            "symbols": symbols}


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _as_coeff(v: Value, chart: Chart, path: str) -> CoeffExpr:
    if isinstance(v, QQi):
        return CoeffExpr.constant(chart, v)
    if isinstance(v, CoeffExpr):
        return v
    raise SchemaError("expected a scalar expression", path)


def _as_form(v: Value, chart: Chart, path: str) -> DifferentialForm:
    if isinstance(v, (QQi, CoeffExpr)):
        return DifferentialForm.from_coeff(_as_coeff(v, chart, path))
    if isinstance(v, DifferentialForm):
        return v
    raise SchemaError("expected a differential form", path)


def _as_polyvector(v: Value, chart: Chart, path: str) -> Polyvector:
    if isinstance(v, (QQi, CoeffExpr)):
        return Polyvector.from_coeff(_as_coeff(v, chart, path))
    if isinstance(v, Polyvector):
        return v
    raise SchemaError("expected a polyvector", path)


def _gvec(node, chart, path) -> GeneralizedVector:
    if isinstance(node, dict) and node.get("kind") == "gvec":
        vec = node.get("vector")
        form = node.get("one_form")
    elif isinstance(node, dict) and "kind" not in node:
        vec = node.get("vector")
        form = node.get("one_form")
    else:
        v = parse_expr(node, chart, path)
        if isinstance(v, GeneralizedVector):
            return v
        if isinstance(v, Polyvector):
            return GeneralizedVector.of(vector=v)
        if isinstance(v, DifferentialForm):
            return GeneralizedVector.of(one_form=v)
        raise SchemaError("expected a generalized vector", path)
    pv = _as_polyvector(parse_expr(vec, chart, f"{path}.vector"), chart,
                        f"{path}.vector") if vec is not None else None
    fm = _as_form(parse_expr(form, chart, f"{path}.one_form"), chart,
                  f"{path}.one_form") if form is not None else None
    return GeneralizedVector.of(vector=pv, one_form=fm, chart=chart)


def parse_expr(node, chart: Chart, path: str = "$.expr") -> Value:
    if not isinstance(node, dict):
        raise SchemaError(f"node must be an object, got {type(node).__name__}",
                          path)
    kind = node.get("kind")
    if kind == "var":
        name = node.get("name")
        if name not in chart.complex_vars:
            raise SchemaError(f"unknown complex variable {name!r}", path)
        return CoeffExpr.var(chart, name)
    if kind == "conj_var":
        name = node.get("name")
        if name not in chart.complex_vars:
            raise SchemaError(f"unknown complex variable {name!r}", path)
        return CoeffExpr.var(chart, chart.conj_var_name(name))
    if kind == "rat":
        return QQi(_frac(node.get("value", "0"), path))
    if kind == "gauss_rat":
        return QQi(_frac(node.get("re", "0"), path),
                   _frac(node.get("im", "0"), path))
    if kind == "symbol":
        name = node.get("name")
        if name not in chart.symbols:
            raise SchemaError(f"unknown symbol {name!r}", path)
        return CoeffExpr.symbol(chart, name)
    if kind == "pvec":
        name = node.get("var")
        if name not in chart.all_vars:
            raise SchemaError(f"unknown variable {name!r}", path)
        return Polyvector.gen(chart, name)
    if kind == "add":
        args = _args(node, path)
        vals = [parse_expr(a, chart, f"{path}.args[{i}]")
                for i, a in enumerate(args)]
        return _sum(vals, chart, path)
    if kind == "mul":
        args = _args(node, path)
        vals = [parse_expr(a, chart, f"{path}.args[{i}]")
                for i, a in enumerate(args)]
        return _product(vals, chart, path)
    if kind == "pow":
        base = parse_expr(node.get("base"), chart, f"{path}.base")
        exp = node.get("exp")
        if not isinstance(exp, int):
            raise SchemaError("pow exponent must be an integer", path)
        if isinstance(base, QQi):
            return base ** exp
        if isinstance(base, CoeffExpr):
            return base ** exp
        raise SchemaError("pow applies to scalars", path)
    if kind == "wedge":
        args = _args(node, path)
        vals = [parse_expr(a, chart, f"{path}.args[{i}]")
                for i, a in enumerate(args)]
        if any(isinstance(v, Polyvector) for v in vals):
            out_p = Polyvector.from_coeff(CoeffExpr.one(chart))
            for i, v in enumerate(vals):
                out_p = out_p.wedge(
                    _as_polyvector(v, chart, f"{path}.args[{i}]"))
            return out_p
        out = DifferentialForm.from_coeff(CoeffExpr.one(chart))
        for i, v in enumerate(vals):
            out = out.wedge(_as_form(v, chart, f"{path}.args[{i}]"))
        return out
    if kind == "d":
        arg = parse_expr(node.get("arg"), chart, f"{path}.arg")
        return exterior_d(_as_form(arg, chart, f"{path}.arg"))
    if kind == "interior":
        vec = _as_polyvector(parse_expr(node.get("vector"), chart,
                                        f"{path}.vector"),
                             chart, f"{path}.vector")
        arg = _as_form(parse_expr(node.get("arg"), chart, f"{path}.arg"),
                       chart, f"{path}.arg")
        return interior(vec, arg)
    if kind == "clifford":
        e = _gvec({"kind": "gvec", "vector": node.get("vector"),
                   "one_form": node.get("one_form")}, chart, path)
        arg = _as_form(parse_expr(node.get("arg"), chart, f"{path}.arg"),
                       chart, f"{path}.arg")
        return clifford_act(e, arg)
    if kind == "schouten":
        a = _as_polyvector(parse_expr(node.get("a"), chart, f"{path}.a"),
                           chart, f"{path}.a")
        b = _as_polyvector(parse_expr(node.get("b"), chart, f"{path}.b"),
                           chart, f"{path}.b")
        return schouten_bracket(a, b)
    if kind == "courant":
        e1 = _gvec(node.get("a"), chart, f"{path}.a")
        e2 = _gvec(node.get("b"), chart, f"{path}.b")
        return courant_bracket(e1, e2)
    if kind == "gvec":
        return _gvec(node, chart, path)
    if kind == "exp2":
        arg = _as_form(parse_expr(node.get("arg"), chart, f"{path}.arg"),
                       chart, f"{path}.arg")
        top = node.get("top")
        return exp_two_form(arg, top)
    if kind == "conj":
        v = parse_expr(node.get("arg"), chart, f"{path}.arg")
        if isinstance(v, QQi):
            return v.conjugate()
        return v.conjugate()
    raise SchemaError(f"unknown node kind {kind!r}", path)


def _args(node, path):
    args = node.get("args")
    if not isinstance(args, list) or not args:
        raise SchemaError("args must be a nonempty list", path)
    return args


def _sum(vals, chart, path):
    out = vals[0]
    for i, v in enumerate(vals[1:], start=1):
        a, b = _align(out, v, chart)
        try:
            out = a + b
        except TypeError:
            raise SchemaError("cannot add these values", f"{path}.args[{i}]")
    return out


def _product(vals, chart, path):
    graded = [v for v in vals if isinstance(v, GradedElement)]
    if len(graded) > 1:
        raise SchemaError("mul of two graded elements: use wedge", path)
    scalar: Value = QQi(1)
    for v in vals:
        if not isinstance(v, GradedElement):
            if isinstance(scalar, QQi) and isinstance(v, QQi):
                scalar = scalar * v
            else:
                scalar = _as_coeff(scalar, chart, path) * \
                    _as_coeff(v, chart, path)
    if not graded:
        return scalar
    return graded[0] * (scalar if isinstance(scalar, CoeffExpr)
                        else scalar)


def _align(a, b, chart):
    """Coerce scalars up so that addition is defined."""
    if isinstance(a, GradedElement) and isinstance(b, (QQi, CoeffExpr)):
        return a, type(a).from_coeff(_as_coeff(b, chart, "$"))
    if isinstance(b, GradedElement) and isinstance(a, (QQi, CoeffExpr)):
        return type(b).from_coeff(_as_coeff(a, chart, "$")), b
    if isinstance(a, QQi) and isinstance(b, CoeffExpr):
        return CoeffExpr.constant(chart, a), b
    if isinstance(b, QQi) and isinstance(a, CoeffExpr):
        return a, CoeffExpr.constant(chart, b)
    return a, b


# ---------------------------------------------------------------------------
# Canonical printing
# ---------------------------------------------------------------------------


def _print_scalar(value: QQi) -> dict:
    if value.im == 0:
        return {"kind": "rat", "value": str(value.re)}
    return {"kind": "gauss_rat", "re": str(value.re), "im": str(value.im)}


def _print_coeff(coeff: CoeffExpr) -> dict:
    chart = coeff.chart
    if coeff.is_zero():
        return {"kind": "rat", "value": "0"}
    terms = []
    for mono, c in coeff.monomials():
        factors = [_print_scalar(c)]
        n = len(chart.complex_vars)
        for i, e in enumerate(mono.exps):
            if e == 0:
                continue
            if i < n:
                base = {"kind": "var", "name": chart.all_vars[i]}
            else:
                base = {"kind": "conj_var", "name": chart.all_vars[i - n]}
            factors.append(base if e == 1 else
                           {"kind": "pow", "base": base, "exp": e})
        for name, k in mono.syms:
            base = {"kind": "symbol", "name": name}
            factors.append(base if k == 1 else
                           {"kind": "pow", "base": base, "exp": k})
        terms.append(factors[0] if len(factors) == 1 else
                     {"kind": "mul", "args": factors})
    return terms[0] if len(terms) == 1 else {"kind": "add", "args": terms}


def _print_graded(value: GradedElement) -> dict:
    chart = value.chart
    if value.is_zero():
        return {"kind": "rat", "value": "0"}
    n = len(chart.complex_vars)
    is_form = isinstance(value, DifferentialForm)
    terms = []
    for word, coeff in value.items():
        gens = []
        for i in word:
            if is_form:
                base = ({"kind": "var", "name": chart.all_vars[i]} if i < n
                        else {"kind": "conj_var",
                              "name": chart.all_vars[i - n]})
                gens.append({"kind": "d", "arg": base})
            else:
                gens.append({"kind": "pvec", "var": chart.all_vars[i]})
        coeff_ast = _print_coeff(coeff)
        if not gens:
            terms.append(coeff_ast)
        elif coeff_ast == {"kind": "rat", "value": "1"}:
            terms.append(gens[0] if len(gens) == 1 else
                         {"kind": "wedge", "args": gens})
        else:
            terms.append({"kind": "mul", "args":
                          [coeff_ast,
                           gens[0] if len(gens) == 1 else
                           {"kind": "wedge", "args": gens}]})
    return terms[0] if len(terms) == 1 else {"kind": "add", "args": terms}


def print_value(value: Value) -> dict:
    if isinstance(value, QQi):
        return _print_scalar(value)
    if isinstance(value, CoeffExpr):
        return _print_coeff(value)
    if isinstance(value, GradedElement):
        return _print_graded(value)
    if isinstance(value, GeneralizedVector):
        return {"kind": "gvec", "vector": print_value(value.vector),
                "one_form": print_value(value.one_form)}
    raise TypeError(f"cannot print {value!r}")


def print_document(value: Value, chart: Optional[Chart] = None) -> dict:
    if chart is None:
        chart = value.chart  # type: ignore[union-attr]
    return {"chart": print_chart(chart), "expr": print_value(value)}


def parse_document(doc: dict) -> Tuple[Chart, Value]:
    if not isinstance(doc, dict):
        raise SchemaError("document must be an object")
    if "chart" not in doc:
        raise SchemaError("missing chart header")
    if "expr" not in doc:
        raise SchemaError("missing expr")
    chart = parse_chart(doc["chart"])
    return chart, parse_expr(doc["expr"], chart)


def dumps_canonical(doc: dict) -> str:
    """Deterministic serialization: sorted keys, fixed separators."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# Point files
# ---------------------------------------------------------------------------


def parse_point(doc: dict, chart: Chart, path: str = "$") -> dict:
    """{"z1": "1/2"} or {"z1": ["re", "im"]} -> variable assignment."""
    if not isinstance(doc, dict):
        raise SchemaError("point must be an object", path)
    out = {}
    for name, v in doc.items():
        if name not in chart.all_vars:
            raise SchemaError(f"unknown variable {name!r}", f"{path}.{name}")
        if isinstance(v, list):
            if len(v) != 2:
                raise SchemaError("pair must be [re, im]", f"{path}.{name}")
            out[name] = QQi(_frac(v[0], path), _frac(v[1], path))
        else:
            out[name] = QQi(_frac(v, path))
    return out
