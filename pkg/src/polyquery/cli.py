"""Command line: measures, enumerate, table1, simulate, circuit-dump.

Exit status is 0 when every requested check passes, 1 when a check fails and 2 on
usage, parse or capability errors. A one-line JSON summary always goes to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import algorithms as alg
from . import suite
from .boolfn import FAMILIES, TruthTable, from_family, gamma, symmetric_profile
from .errors import CapabilityError, DomainError, InconsistencyError, ParameterError, ValidationError
from .measures import bound_report
from .polynomial import interpolate, symmetrize
from .qsim.circuit import Circuit
from .qsim.numeric import check_bounded_error, check_exact, check_zero_error
from .qsim.ring import RingElem
from .qsim.symbolic import acceptance_polynomial, symbolic_run

FORMATS = ("md", "json", "csv")
ALGORITHMS = ("xor", "parity", "or-zero", "grover", "counting")


class CommandError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _function_from_args(args) -> TruthTable:
    if getattr(args, "table", None):
        try:
            text = Path(args.table).read_text()
        except OSError as exc:
            raise CommandError(f"cannot read {args.table}: {exc}") from exc
        try:
            return TruthTable.from_json(text)
        except json.JSONDecodeError as exc:
            raise CommandError(f"{args.table} line {exc.lineno}: {exc.msg}") from exc
    if getattr(args, "family", None):
        if args.n is None:
            raise CommandError("--family needs --n")
        return from_family(args.family, args.n, args.m)
    raise CommandError("give a function with --family/--n or --table")


def _add_function_args(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--family", type=str.upper, choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int, help="threshold for THRESHOLD")
    p.add_argument("--table", help="truth table JSON file")


def _stamp(args, payload: dict) -> dict:
    if not args.no_timestamp:
        payload["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return payload


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else v for v in r])
    return buf.getvalue()


def _md_table(header, rows) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for r in rows:
        lines.append("| " + " | ".join("-" if v is None else _fmt(v) for v in r) + " |")
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _md_kv(title: str, payload: dict) -> str:
    lines = [f"## {title}", ""]
    for k, v in payload.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        lines.append(f"- **{k}**: {_fmt(v)}")
    return "\n".join(lines) + "\n"


def _dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _ring_json(c: RingElem) -> dict:
    r, s = RingElem.coerce(c).to_qsqrt2()
    return {"rational": str(r), "sqrt2": str(s)}


# ---------------------------------------------------------------- commands

def cmd_measures(args) -> tuple[str, dict]:
    f = _function_from_args(args)
    try:
        rep = bound_report(f)
    except (CapabilityError, ParameterError) as exc:
        raise CommandError(f"measure cap exceeded: {exc}") from exc
    payload = rep.to_json()
    prof = symmetric_profile(f)
    payload["symmetric_profile"] = None if prof is None else list(prof.values)
    if prof is None:
        payload["gamma"] = None
    else:
        try:
            payload["gamma"] = gamma(prof)
        except DomainError:
            payload["gamma"] = "undefined"
    if args.polys:
        p = interpolate(f)
        payload["polynomial"] = p.to_json()
        if prof is not None:
            payload["symmetrized"] = symmetrize(p).to_json()
    _stamp(args, payload)
    summary = {"passed": rep.all_pass, "failed_checks": [k for k, v in rep.flags.items() if not v]}
    if args.format == "json":
        return _dumps(payload), summary
    if args.format == "csv":
        cols = [k for k in payload if not isinstance(payload[k], (dict, list))]
        return _csv_text(cols, [[payload[k] for k in cols]]), summary
    text = "# measures\n\n" + rep.markdown_header() + "\n" + rep.markdown_row() + "\n\n"
    extra = {k: payload[k] for k in payload if k not in rep.MD_COLUMNS}
    return text + _md_kv("details", extra), summary


def cmd_enumerate(args) -> tuple[str, dict]:
    cfg = suite.SuiteConfig(tuple(args.n), source=args.source, include_adeg=not args.no_adeg,
                            sample_count=args.count, seed=args.seed, workers=args.workers)
    start = time.perf_counter()
    rows = suite.enumerate_rows(cfg)
    violations = suite.violation_counts(rows)
    checked = suite.checked_counts(rows)
    summary = {"passed": sum(violations.values()) == 0, "functions": len(rows),
               "violations": violations, "source": cfg.source, "n": list(cfg.n_values)}
    if cfg.source == "sampled":
        summary["seed"] = cfg.seed
    if not args.no_timestamp:
        summary["seconds"] = round(time.perf_counter() - start, 3)
    if args.format == "csv":
        return _csv_text(suite.CSV_COLUMNS, [[r[c] for c in suite.CSV_COLUMNS] for r in rows]), summary
    if args.format == "json":
        payload = _stamp(args, {"config": {"n": list(cfg.n_values), "source": cfg.source,
                                           "include_adeg": cfg.include_adeg, "seed": cfg.seed,
                                           "count": cfg.sample_count},
                                "violations": violations, "checked": checked, "rows": rows})
        return _dumps(payload), summary
    body = _md_table(("check", "checked", "violations"),
                     [(k, checked[k], violations[k]) for k in violations])
    head = f"# enumerate ({cfg.source}, n={list(cfg.n_values)}, {len(rows)} functions)\n\n"
    return head + body, summary


TABLE1_COLUMNS = ("function", "n", "setting", "lower", "lower_source", "upper", "upper_source",
                  "verified", "tight")


def cmd_table1(args) -> tuple[str, dict]:
    rows = suite.table1(args.parity_n, args.or_n, args.majority_n, args.or_zero_n)
    data = [r.to_json() for r in rows]
    summary = {"passed": all(r.consistent for r in rows), "rows": len(rows)}
    if args.format == "json":
        return _dumps(_stamp(args, {"rows": data})), summary
    table = [[d[c] for c in TABLE1_COLUMNS] for d in data]
    if args.format == "csv":
        return _csv_text(TABLE1_COLUMNS, table), summary
    notes = [f"- {d['function']} n={d['n']} {d['setting']}: {json.dumps(d['extra'], sort_keys=True)}"
             for d in data if d["extra"]]
    return "# query complexities\n\n" + _md_table(TABLE1_COLUMNS, table) + "\n" + "\n".join(notes) + "\n", summary


def _load_circuit(path: str) -> Circuit:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}") from exc
    return Circuit.from_json(text)


def cmd_simulate(args) -> tuple[str, dict]:
    c = _load_circuit(args.circuit)
    payload: dict = {"m": c.m, "n": c.n, "queries": c.query_count()}
    passed = True
    semantics = [s for s in ("exact", "zero", "bounded") if getattr(args, s)]
    if semantics:
        f = _function_from_args(args)
        checks = {"exact": check_exact, "zero": check_zero_error, "bounded": check_bounded_error}
        results = []
        for s in semantics:
            r = checks[s](c, f) if s != "bounded" else check_bounded_error(c, f, args.threshold)
            results.append(r.to_json())
            passed &= r.passed
        payload["checks"] = results
    if args.symbolic:
        st = symbolic_run(c)
        acc = acceptance_polynomial(c, state=st)
        T = c.query_count()
        amp_deg = st.max_degree()
        acc_deg = acc.degree()
        payload["symbolic"] = {
            "amplitude_degrees": [int(d) for d in st.degrees()],
            "max_amplitude_degree": amp_deg,
            "acceptance_degree": acc_deg,
            "bound_2T": 2 * T,
            "verdict": "pass" if acc_deg <= 2 * T and amp_deg <= T else "fail",
            "acceptance_polynomial": {
                "n": acc.n,
                "terms": [{"mask": mk, **_ring_json(v)} for mk, v in sorted(acc.coeffs.items())],
            },
        }
        passed &= payload["symbolic"]["verdict"] == "pass"
    if not semantics and not args.symbolic:
        raise CommandError("choose at least one of --exact, --zero, --bounded, --symbolic")
    summary = {"passed": bool(passed)}
    _stamp(args, payload)
    if args.format == "json":
        return _dumps(payload), summary
    if args.format == "csv":
        rows = [[r["semantics"], r["pass"], r["worst_x"], r["value"]] for r in payload.get("checks", [])]
        if args.symbolic:
            s = payload["symbolic"]
            rows.append(["symbolic", s["verdict"] == "pass", "", s["acceptance_degree"]])
        return _csv_text(("semantics", "pass", "worst_x", "value"), rows), summary
    return _md_kv("simulate", payload), summary


def _build_algorithm(args):
    name, n = args.algorithm, args.n
    if name == "xor":
        return alg.xor_circuit(n or 2, args.i, args.j), None
    if n is None:
        raise CommandError(f"{name} needs --n")
    if name == "parity":
        return alg.parity_circuit(n), None
    if name == "or-zero":
        return alg.or_zero_error_circuit(n), None
    if name == "grover":
        iters = args.iterations
        if iters is None:
            iters = alg.SHIPPED_SCHEDULES[n].iterations[0] if n in alg.SHIPPED_SCHEDULES else 1
        return alg.grover_circuit(n, iters), None
    net = alg.counting_circuit(n, args.p)
    return net.circuit, net


def cmd_circuit_dump(args) -> tuple[str, dict]:
    c, net = _build_algorithm(args)
    summary = {"passed": True, "m": c.m, "n": c.n, "queries": c.query_count()}
    if args.decoder:
        if net is None:
            raise CommandError("--decoder applies to the counting network only")
        return _csv_text(("phase_index", "estimate"), net.decoder_table()), summary
    return c.dumps() + "\n", summary


# ---------------------------------------------------------------- parser

def _common(defaults: bool) -> argparse.ArgumentParser:
    """Global flags, accepted before or after the command name."""
    sup = argparse.SUPPRESS
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=FORMATS, default="md" if defaults else sup)
    p.add_argument("--workers", type=int, default=suite.default_workers() if defaults else sup)
    p.add_argument("--seed", type=int, default=0 if defaults else sup)
    p.add_argument("--no-timestamp", action="store_true", default=False if defaults else sup)
    p.add_argument("--out", default=None if defaults else sup, help="write the report here")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyquery", parents=[_common(True)],
                                     description="Query-complexity measures, bounds and circuits.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(False)

    p = sub.add_parser("measures", parents=[common], help="all measures and bound checks for f")
    _add_function_args(p)
    p.add_argument("--polys", action="store_true", help="include the multilinear polynomial")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("enumerate", parents=[common], help="check inequalities over many functions")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--source", choices=suite.SOURCES, default="exhaustive")
    p.add_argument("--count", type=int, default=1000, help="functions per n when sampling")
    p.add_argument("--no-adeg", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("table1", parents=[common], help="lower vs upper query bounds")
    p.add_argument("--parity-n", type=int, default=8)
    p.add_argument("--or-n", type=int, default=8)
    p.add_argument("--majority-n", type=int, default=8)
    p.add_argument("--or-zero-n", type=int, default=4, help="size of the read-all OR circuit")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("simulate", parents=[common], help="check a circuit JSON file")
    p.add_argument("circuit")
    _add_function_args(p)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--zero", action="store_true")
    p.add_argument("--bounded", action="store_true")
    p.add_argument("--threshold", type=float, default=2 / 3)
    p.add_argument("--symbolic", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("circuit-dump", parents=[common], help="emit a constructed circuit as JSON")
    p.add_argument("algorithm", choices=ALGORITHMS)
    p.add_argument("--n", type=int)
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--iterations", type=int, help="Grover iterations before the verifying query")
    p.add_argument("--p", type=int, help="counting precision qubits")
    p.add_argument("--decoder", action="store_true", help="counting decoder table as CSV")
    p.set_defaults(func=cmd_circuit_dump)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, summary = args.func(args)
    except (CommandError, CapabilityError, ParameterError, ValidationError, DomainError,
            InconsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(json.dumps({"command": args.command, "passed": False, "error": str(exc)}), file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    summary = {"command": args.command, **summary}
    print(json.dumps(summary, sort_keys=True, default=int), file=sys.stderr)
    return 0 if summary["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
