"""Command-line interface.

Subcommands: verify (run the named suites), spinor (pointwise report for
an expression file), cohomology (complex / double-complex dimensions),
tables (surface case studies), surgery (gluing-data reports and
connected-sum dimensions).  Exit codes: 0 pass, 1 failures, 2 input
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .complexes import CochainComplex, DoubleComplex
from .errors import LogspinorError, SchemaError
from .exprio import dumps_canonical, parse_document, parse_point, print_value
from .forms import DifferentialForm
from .spinors import (integrability_witness, nonvanishing_certificate,
                      purity_report_dim4)
from .suites import SUITE_NAMES, run_all
from .surfaces import (cp2_table, delpezzo_dims, hirzebruch_report,
                       hirzebruch_surface_table)
from .surgery import (SurgeryData, connected_sum_h2, kappa_track,
                      surgery_report)


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno} "
                          f"column {exc.colno}: {exc.msg}", path)


def _emit(payload: dict, json_path=None, md_path=None, md_text=None):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if json_path:
        Path(json_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if md_path and md_text is not None:
        Path(md_path).write_text(md_text + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    names = args.suite or list(SUITE_NAMES)
    for n in names:
        if n not in SUITE_NAMES:
            print(f"unknown suite {n!r}", file=sys.stderr)
            return 2
    results = run_all(seed=args.seed, size=args.samples, names=names)
    payload = {"seed": args.seed, "samples": args.samples,
               "results": [r.to_json() for r in results]}
    lines = [r.summary_line() for r in results]
    md = "\n".join(["| suite | cases | failures |", "| --- | --- | --- |"] +
                   [f"| {r.suite} | {r.cases} | {len(r.failures)} |"
                    for r in results])
    for line in lines:
        print(line, file=sys.stderr)
    if args.json:
        Path(args.json).write_text(dumps_canonical(payload), encoding="utf-8")
    else:
        sys.stdout.write(dumps_canonical(payload))
    if args.md:
        Path(args.md).write_text(md + "\n", encoding="utf-8")
    return 0 if all(r.passed for r in results) else 1


def cmd_spinor(args) -> int:
    doc = _load_json(args.input)
    chart, value = parse_document(doc)
    if not isinstance(value, DifferentialForm):
        raise SchemaError("expression must evaluate to a differential form")
    point = parse_point(_load_json(args.point), chart) if args.point else \
        {v: 0 for v in chart.complex_vars}
    report = purity_report_dim4(value, point)
    payload = {"point": {k: str(v) for k, v in point.items()},
               "report": report.to_json()}
    if args.type_only:
        payload = {"type_number": report.type_number}
    if args.pure_only:
        payload = {"is_pure": report.is_pure}
    if args.witness_degree is not None:
        w = integrability_witness(value, args.witness_degree)
        payload["witness"] = None if w is None else print_value(w)
        payload["witness_degree"] = args.witness_degree
    if report.pairing_value is not None and not (args.type_only or
                                                 args.pure_only):
        cert = nonvanishing_certificate(report.pairing_value,
                                        samples=args.samples)
        payload["pairing_nonvanishing"] = {
            "kind": cert.kind, "nonvanishing": cert.nonvanishing,
            "samples": cert.samples}
    _emit(payload, args.json)
    return 0


def _matrix_from_entries(rows, cols, entries, path):
    M = [[Fraction(0)] * cols for _ in range(rows)]
    for k, item in enumerate(entries):
        if not (isinstance(item, list) and len(item) == 3):
            raise SchemaError("entry must be [row, col, value]",
                              f"{path}[{k}]")
        i, j, v = item
        if not (0 <= i < rows and 0 <= j < cols):
            raise SchemaError(f"entry ({i},{j}) out of range", f"{path}[{k}]")
        M[i][j] = Fraction(str(v))
    return M


def cmd_cohomology(args) -> int:
    doc = _load_json(args.input)
    if "grid_dims" in doc:
        dims = doc["grid_dims"]
        P, Q = len(dims), len(dims[0])
        h = {}
        for item in doc.get("horizontal", []):
            p, q = item["p"], item["q"]
            h[p, q] = _matrix_from_entries(dims[p + 1][q], dims[p][q],
                                           item.get("entries", []),
                                           "$.horizontal")
        v = {}
        for item in doc.get("vertical", []):
            p, q = item["p"], item["q"]
            v[p, q] = _matrix_from_entries(dims[p][q + 1], dims[p][q],
                                           item.get("entries", []),
                                           "$.vertical")
        try:
            dc = DoubleComplex(dims, h, v)
        except ValueError as exc:
            raise SchemaError(str(exc))
        payload = dc.spectral_pages().to_json()
    elif "dims" in doc:
        dims = doc["dims"]
        diffs = [None] * max(len(dims) - 1, 0)
        for item in doc.get("maps", []):
            k = item.get("from")
            if item.get("to") != k + 1:
                raise SchemaError("maps must go from k to k+1", "$.maps")
            diffs[k] = _matrix_from_entries(dims[k + 1], dims[k],
                                            item.get("entries", []),
                                            "$.maps")
        try:
            cc = CochainComplex(dims, diffs)
        except ValueError as exc:
            raise SchemaError(str(exc))
        payload = {"dims": dims, "cohomology": cc.cohomology_dims(),
                   "euler": cc.euler_characteristic()}
    else:
        raise SchemaError("need dims (complex) or grid_dims (double complex)")
    _emit(payload, args.json)
    return 0


def cmd_tables(args) -> int:
    if args.surface == "cp2":
        cubic = FERMAT = (1, 0, 0, 0, 0, 0, 1, 0, 0, 1)
        if args.cubic:
            parts = args.cubic.split(",")
            if len(parts) != 10:
                raise SchemaError("cubic needs 10 comma-separated values")
            cubic = tuple(Fraction(p) for p in parts)
        del FERMAT
        table = cp2_table(cubic, nodes=args.nodes)
    elif args.surface == "delpezzo":
        if args.param is None:
            raise SchemaError("delpezzo needs --param k")
        table = delpezzo_dims(args.param, args.ker_delta0)
    elif args.surface == "hirzebruch":
        if args.param is None:
            raise SchemaError("hirzebruch needs --param e")
        table = hirzebruch_surface_table(args.param)
        if args.param <= 3:
            rep = hirzebruch_report(args.param)
            payload = table.to_json()
            payload["consistency"] = rep.to_json()
            _emit(payload, args.json, args.md, table.to_markdown())
            return 0
    else:
        raise SchemaError(f"unknown surface {args.surface!r}")
    _emit(table.to_json(), args.json, args.md, table.to_markdown())
    return 0


def _parse_ints(text, n, what):
    parts = text.split(",")
    if len(parts) != n:
        raise SchemaError(f"{what} needs {n} comma-separated integers")
    return [int(p) for p in parts]


def cmd_surgery(args) -> int:
    payload = {}
    if args.data:
        m, p, a, b = _parse_ints(args.data, 4, "--data")
        C = Fraction(args.C) if args.C else Fraction(1)
        try:
            data = SurgeryData(m, p, a, b, C)
        except ValueError as exc:
            raise SchemaError(str(exc))
        payload["report"] = surgery_report(data).to_json()
    if args.track:
        k, m = _parse_ints(args.track, 2, "--track")
        seq = [SurgeryData(0, 1, -1, 1)] + [SurgeryData(1, 1, 0, 1)] * (m - 1)
        payload["kappa"] = kappa_track(seq, 0)
        payload["track"] = {"k": k, "m": m}
    if args.connected_sum:
        k, m = _parse_ints(args.connected_sum, 2, "--connected-sum")
        dim, sol = connected_sum_h2(k, m)
        payload["connected_sum"] = {"k": k, "m": m, "h2": dim,
                                    "trace": sol.to_json()}
    if not payload:
        raise SchemaError("nothing to do: pass --data, --track or "
                          "--connected-sum")
    _emit(payload, args.json)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="logspinor",
        description="exact symbolic toolkit for generalized complex "
                    "structures with logarithmic singularities")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the verification suites")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--samples", type=int, default=100,
                   help="random cases per identity family")
    v.add_argument("--suite", action="append", choices=SUITE_NAMES)
    v.add_argument("--json", help="write the report here")
    v.add_argument("--md", help="write a markdown summary here")
    v.set_defaults(func=cmd_verify)

    sp = sub.add_parser("spinor", help="pointwise spinor report")
    sp.add_argument("--input", required=True, help="expression file")
    sp.add_argument("--point", help="point file (JSON map)")
    sp.add_argument("--type", dest="type_only", action="store_true")
    sp.add_argument("--pure", dest="pure_only", action="store_true")
    sp.add_argument("--witness-degree", type=int, default=None)
    sp.add_argument("--samples", type=int, default=20,
                    help="sampling budget for nonvanishing certificates")
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_spinor)

    co = sub.add_parser("cohomology", help="exact complex dimensions")
    co.add_argument("--input", required=True)
    co.add_argument("--json")
    co.set_defaults(func=cmd_cohomology)

    tb = sub.add_parser("tables", help="surface case studies")
    tb.add_argument("--surface", required=True,
                    choices=("cp2", "delpezzo", "hirzebruch"))
    tb.add_argument("--param", type=int)
    tb.add_argument("--nodes", type=int, default=0)
    tb.add_argument("--cubic", help="10 comma-separated coefficients")
    tb.add_argument("--ker-delta0", type=int, default=0)
    tb.add_argument("--json")
    tb.add_argument("--md")
    tb.set_defaults(func=cmd_tables)

    sg = sub.add_parser("surgery", help="gluing-data reports")
    sg.add_argument("--data", help="m,p,a,b")
    sg.add_argument("--C", help="area constant, e.g. 3/2")
    sg.add_argument("--track", help="k,m: count type-changing components")
    sg.add_argument("--connected-sum", help="k,m: solve the complement "
                                            "dimension")
    sg.add_argument("--json")
    sg.set_defaults(func=cmd_surgery)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, LogspinorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
