"""Command-line front end: ``poslab gen | classify | dettable | verify-theorem``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import time
from fractions import Fraction

from . import kernels, positivity
from .kernels import Family, KernelSpec
from .numerics import (
    DEFAULT_PRECISION_CAP,
    DEFAULT_START_PRECISION,
    ExactMatrix,
    IntervalMatrix,
    as_fraction,
    bareiss_det,
    encode,
    format_fraction,
)

EXIT_OK, EXIT_NO, EXIT_UNDETERMINED, EXIT_INPUT = 0, 1, 2, 3

CLASS_NAMES = ("psd", "pd", "cpd", "cnd", "cpd-nonsingular", "infdiv", "tp", "stp",
               "stp-fekete", "hankel-stp")


class InputError(Exception):
    """Malformed user input; reported on stderr with exit code 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _fraction_list(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(as_fraction(x) for x in text.split(",") if x.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse numbers from {text!r}") from exc


def _precision_cap(args) -> int:
    if args.precision_max is not None:
        return args.precision_max
    env = os.environ.get("POSLAB_PRECISION_MAX")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError("POSLAB_PRECISION_MAX must be an integer") from exc
    return DEFAULT_PRECISION_CAP


def _spec_from_args(args) -> KernelSpec:
    if args.family is None:
        raise InputError("--family is required")
    try:
        return KernelSpec(
            family=Family(args.family),
            points=_fraction_list(args.points) if args.points else (),
            n=args.n,
            lam=as_fraction(args.lam) if args.lam else 0,
            r=as_fraction(args.r) if args.r else None,
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def matrix_to_json(m, spec: KernelSpec | None = None) -> dict:
    if isinstance(m, ExactMatrix):
        data = {"kind": "exact", "n": m.n, "precision": "exact", "entries": encode(m.entries)}
    else:
        data = {"kind": "interval", "n": m.n, "precision": str(m.precision), "entries": encode(m.values)}
    if spec is not None:
        data = {"spec": spec.to_json(), **data}
    return data


def matrix_from_json(data) -> tuple[object, KernelSpec | None]:
    """Rebuild a matrix from :func:`matrix_to_json` output.

    Interval files that carry a spec are regenerated from it so that the
    classifier can still refine them; bare interval files are frozen.
    """
    try:
        spec = KernelSpec.from_json(data["spec"]) if data.get("spec") else None
        kind = data.get("kind", "exact")
        entries = data["entries"]
        if kind == "exact":
            return ExactMatrix.from_rows(entries), spec
        if kind == "interval":
            if spec is not None:
                return kernels.generate(spec), spec
            return IntervalMatrix.from_bounds(entries, int(data["precision"])), None
        raise InputError(f"unknown matrix kind {kind!r}")
    except InputError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed matrix file: {exc}") from exc


def cmd_gen(args) -> int:
    spec = _spec_from_args(args)
    m = kernels.generate(spec, args.precision)
    if args.format == "csv":
        grid = encode(m.entries if isinstance(m, ExactMatrix) else m.values)
        rows = [[x if isinstance(x, str) else f"[{x[0]},{x[1]}]" for x in row] for row in grid]
        _emit(_csv(rows), args.out)
    else:
        _emit(_dump_json(matrix_to_json(m, spec)), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def _run_check(name: str, m, args, cap: int) -> positivity.Verdict:
    r_grid = _fraction_list(args.r_grid) if args.r_grid else positivity.DEFAULT_R_GRID
    bf = args.bruteforce_cap
    if name == "psd":
        return positivity.check_psd(m, cap)
    if name == "pd":
        return positivity.check_pd(m, cap)
    if name == "cpd":
        return positivity.check_cpd(m, precision_max=cap)
    if name == "cnd":
        return positivity.check_cnd(m, precision_max=cap)
    if name == "cpd-nonsingular":
        return positivity.check_cpd_nonsingular(m, precision_max=cap)
    if name == "infdiv":
        return positivity.check_infdiv(m, r_grid, cap)
    if name == "tp":
        return positivity.check_tp_bruteforce(m, bf, cap)
    if name == "stp":
        if m.n <= bf:
            return positivity.check_stp_bruteforce(m, bf, cap)
        return positivity.check_stp_fekete(m, cap)
    if name == "stp-fekete":
        return positivity.check_stp_fekete(m, cap)
    if name == "hankel-stp":
        return positivity.check_hankel_stp(m, cap)
    raise InputError(f"unknown class {name!r}")


def summarize(v: positivity.Verdict) -> str:
    payload = v.certificate if v.yes else v.witness if v.no else v.certificate
    if not payload:
        return ""
    kind = payload.get("kind", "")
    if kind == "minor":
        return f"minor rows={payload['rows']} cols={payload['cols']} value={payload['value']}"
    if kind == "vector":
        text = f"vector=({','.join(payload['vector'])}) form={payload['value']}"
        if "minor" in payload:
            minor = payload["minor"]
            text += f"; minor rows={minor['rows']} value={minor['value']}"
        return text
    if kind == "minors":
        return f"{payload['count']} minors verified"
    if kind == "ldlt":
        return f"{len(payload['pivots'])} positive pivots"
    if kind == "hadamard-power":
        return f"r={payload['r']}: " + summarize(
            positivity.Verdict(v.tested, v.outcome, witness=payload["inner"]))
    if kind in ("compressed", "log-cpd", "hankel") and "inner" in payload and v.no:
        return kind + ": " + summarize(positivity.Verdict(v.tested, v.outcome, witness=payload["inner"]))
    return kind


def _load_matrix(args):
    if args.entries:
        try:
            rows = json.loads(args.entries, parse_float=str)
            return ExactMatrix.from_rows(rows), {"source": "inline"}
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise InputError(f"malformed matrix: {exc}") from exc
    if args.matrix:
        try:
            if args.matrix == "-":
                data = json.load(sys.stdin, parse_float=str)
            else:
                with open(args.matrix, encoding="utf-8") as fh:
                    data = json.load(fh, parse_float=str)
        except (OSError, ValueError) as exc:
            raise InputError(f"malformed matrix file: {exc}") from exc
        if isinstance(data, list):
            data = {"kind": "exact", "entries": data}
        if not isinstance(data, dict):
            raise InputError("malformed matrix file")
        m, spec = matrix_from_json(data)
        return m, spec.to_json() if spec else {"source": args.matrix}
    spec = _spec_from_args(args)
    return kernels.generate(spec), spec.to_json()


def cmd_classify(args) -> int:
    cap = _precision_cap(args)
    m, spec_json = _load_matrix(args)
    classes = [c.strip() for c in args.classes.split(",") if c.strip()]
    for c in classes:
        if c not in CLASS_NAMES:
            raise InputError(f"unknown class {c!r}; choose from {', '.join(CLASS_NAMES)}")
    rows = []
    for name in classes:
        start = time.perf_counter()
        try:
            v = _run_check(name, m, args, cap)
        except ValueError as exc:
            raise InputError(f"{name}: {exc}") from exc
        elapsed = time.perf_counter() - start
        rows.append({
            "spec": spec_json,
            "class": name,
            "outcome": v.outcome.value,
            "summary": summarize(v),
            "precision": "exact" if v.precision is None else str(v.precision),
            "wall_time": f"{elapsed:.6f}" if args.timing else None,
            "verdict": v.to_json(),
        })
    if args.format == "csv":
        table = [["spec", "class", "outcome", "summary", "precision", "wall_time"]]
        table += [[json.dumps(r["spec"], separators=(",", ":")), r["class"], r["outcome"],
                   r["summary"], r["precision"], r["wall_time"] or ""] for r in rows]
        _emit(_csv(table), args.out)
    else:
        _emit(_dump_json({"rows": rows}), args.out)
    outcomes = {r["outcome"] for r in rows}
    if positivity.Outcome.NO.value in outcomes:
        return EXIT_NO
    if positivity.Outcome.UNDETERMINED.value in outcomes:
        return EXIT_UNDETERMINED
    return EXIT_OK


# ---------------------------------------------------------------------------
# dettable
# ---------------------------------------------------------------------------

def determinant_table(n_max: int) -> list[tuple[int, Fraction]]:
    return [(n, bareiss_det(kernels.matrix_a(n))) for n in range(1, n_max + 1)]


def cmd_dettable(args) -> int:
    if args.n_max < 1:
        raise InputError("--n-max must be at least 1")
    table = determinant_table(args.n_max)
    if args.format == "csv":
        _emit(_csv([["n", "det"]] + [[str(n), format_fraction(d)] for n, d in table]), args.out)
    else:
        data = {"matrix": "matrix-a", "rows": [{"n": str(n), "det": format_fraction(d)} for n, d in table]}
        _emit(_dump_json(data), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify-theorem
# ---------------------------------------------------------------------------

def _instances(args) -> list[tuple[Fraction, ...]]:
    if args.random:
        if args.n is None or args.n < 1:
            raise InputError("--random needs --n >= 1")
        n_min = args.n_min if args.n_min is not None else args.n
        if not 1 <= n_min <= args.n:
            raise InputError("--n-min must lie in [1, n]")
        rng = random.Random(args.seed)
        return [kernels.random_points(rng, rng.randint(n_min, args.n)) for _ in range(args.count)]
    if not args.points:
        raise InputError("give --points or --random")
    pts = _fraction_list(args.points)
    try:
        kernels.check_points(pts)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return [pts]


def cmd_verify_theorem(args) -> int:
    cap = _precision_cap(args)
    grid = _fraction_list(args.r_grid) if args.r_grid else (Fraction(1, 2), Fraction(1), Fraction(2))
    reports = [positivity.verify_theorem1(p, grid, bruteforce_cap=args.bruteforce_cap, precision_max=cap)
               for p in _instances(args)]
    counts = {s: sum(r.status == s for r in reports) for s in ("certified", "undetermined", "falsified")}
    summary = {"instances": str(len(reports)), **{k: str(v) for k, v in counts.items()},
               "stp_refuted": str(sum(r.stp_refuted for r in reports))}
    line = (f"instances={summary['instances']} certified={summary['certified']} "
            f"undetermined={summary['undetermined']} falsified={summary['falsified']}")
    if args.format == "csv":
        table = [["points", "status"] + list(reports[0].checks) if reports else ["points", "status"]]
        for r in reports:
            table.append([" ".join(encode(r.points)), r.status] + [v.outcome.value for v in r.checks.values()])
        _emit(_csv(table), args.out)
    else:
        _emit(_dump_json({"summary": summary, "instances": [r.to_json() for r in reports]}), args.out)
    print(line, file=sys.stderr)
    if counts["falsified"]:
        return EXIT_NO
    if counts["undetermined"]:
        return EXIT_UNDETERMINED
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=[f.value for f in Family])
    p.add_argument("--points", help="comma-separated rationals, e.g. 1/2,3/2 or 0.3,1.7")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", help="Cauchy shift (default 0)")
    p.add_argument("--r", help="Hadamard exponent applied after generation")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="poslab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a matrix")
    _add_spec_flags(gen)
    gen.add_argument("--precision", type=int, default=DEFAULT_START_PRECISION,
                     help="bits for interval entries (default 64)")
    _add_output_flags(gen)
    gen.set_defaults(func=cmd_gen)

    cl = sub.add_parser("classify", help="classify a matrix")
    cl.add_argument("matrix", nargs="?", help="matrix JSON file from `gen` (or - for stdin)")
    cl.add_argument("--entries", help="inline JSON rows, e.g. '[[1,2],[2,1]]'")
    _add_spec_flags(cl)
    cl.add_argument("--classes", default="psd,pd", help=f"comma list from: {', '.join(CLASS_NAMES)}")
    cl.add_argument("--precision-max", type=int)
    cl.add_argument("--r-grid", help="Hadamard exponents sampled by infdiv")
    cl.add_argument("--bruteforce-cap", type=int, default=positivity.DEFAULT_BRUTEFORCE_CAP)
    cl.add_argument("--timing", action="store_true", help="record wall time per row")
    _add_output_flags(cl)
    cl.set_defaults(func=cmd_classify)

    dt = sub.add_parser("dettable", help="exact determinants of matrix-a")
    dt.add_argument("--n-max", type=int, required=True)
    _add_output_flags(dt)
    dt.set_defaults(func=cmd_dettable)

    vt = sub.add_parser("verify-theorem", help="check the power kernel's positivity claims")
    vt.add_argument("--points")
    vt.add_argument("--random", action="store_true")
    vt.add_argument("--count", type=int, default=20)
    vt.add_argument("--n", type=int)
    vt.add_argument("--n-min", type=int)
    vt.add_argument("--seed", type=int, default=0)
    vt.add_argument("--r-grid", help="Hadamard exponents for the PD sweep (default 1/2,1,2)")
    vt.add_argument("--precision-max", type=int)
    vt.add_argument("--bruteforce-cap", type=int, default=positivity.DEFAULT_BRUTEFORCE_CAP)
    _add_output_flags(vt)
    vt.set_defaults(func=cmd_verify_theorem)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"poslab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
