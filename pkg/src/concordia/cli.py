"""``concordia`` command line.

Exit codes: 0 success, 2 unreadable input (bad JSON, schema or number),
3 invalid copula or an expression without shuffle form where one is needed,
4 point outside the region.  Results go to stdout as JSON or CSV; diagnostics
go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path
from typing import List, Optional

from . import region
from ._scalar import as_scalar, to_json_value
from .core.expr import CopulaExpr
from .core.sections import diagonal, opposite_diagonal
from .core.serialize import SchemaError, dumps, loads
from .core.shuffle import ShuffleOfM, as_shuffle
from .exceptions import NotAShuffle, OutOfFace, OutOfRegion, ValidationError
from .measures import FIELDS, all_measures
from .oracle import cb_measures, checkerboard_of, mc_measures
from .synthesis import attain

log = logging.getLogger("concordia")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_OUTSIDE = 4
VERIFY_TOL = 1e-9


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _error(message: str) -> None:
    sys.stderr.write(f"concordia: error: {message}\n")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _number(text: str):
    try:
        return as_scalar(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(EXIT_PARSE, f"cannot parse number {text!r}: {exc}") from None


def _load(path: str) -> CopulaExpr:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}") from None
    try:
        return loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except SchemaError as exc:
        raise CliError(EXIT_PARSE, f"{path}: schema error: {exc}") from None
    except ValidationError as exc:
        raise CliError(EXIT_INVALID, f"{path}: invalid copula: {exc}") from None


def _parse_mode(mode: str):
    parts = mode.split(":")
    try:
        if parts == ["exact"]:
            return ("exact",)
        if parts[0] == "cb" and len(parts) == 2:
            return ("cb", int(parts[1]))
        if parts[0] == "mc" and len(parts) == 3:
            return ("mc", int(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise CliError(EXIT_PARSE, f"bad --mode {mode!r}; use exact, cb:<n> or mc:<samples>:<seed>")


def _tol(args):
    return None if args.tol is None else float(args.tol)


# ---------------------------------------------------------------- commands


def cmd_measures(args) -> int:
    expr = _load(args.file)
    mode = _parse_mode(args.mode)
    if mode[0] == "exact":
        _emit(all_measures(expr).to_dict())
    elif mode[0] == "cb":
        cb = checkerboard_of(expr, mode[1])
        out = cb_measures(cb).to_dict()
        out["n"] = mode[1]
        _emit(out)
    else:
        est = mc_measures(expr, mode[1], mode[2])
        _emit({name: est[name].to_dict() for name in FIELDS})
    return EXIT_OK


def cmd_region_check(args) -> int:
    point = region.RegionPoint(*(_number(x) for x in (args.phi, args.gamma, args.tau)))
    m = region.contains(point, _tol(args))
    out = m.to_dict()
    if m.status != "outside":
        out["classification"] = region.classify(point, _tol(args)).to_dict()
    _emit(out)
    return EXIT_OK


def cmd_region_bounds(args) -> int:
    phi, gamma = _number(args.phi), _number(args.gamma)
    lo, hi = region.tau_bounds(phi, gamma, _tol(args))
    _emit({"tau_min": to_json_value(lo), "tau_max": to_json_value(hi)})
    return EXIT_OK


def cmd_region_export(args) -> int:
    text = region.to_obj() if args.format == "obj" else json.dumps(region.export_mesh(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_synthesize(args) -> int:
    target = region.RegionPoint(*(_number(x) for x in (args.phi, args.gamma, args.tau)))
    result = attain(target, _tol(args))
    Path(args.out).write_text(dumps(result.expr, indent=2) + "\n")
    reloaded = loads(Path(args.out).read_text())
    check = all_measures(reloaded)
    diff = max(abs(float(a) - float(b)) for a, b in zip(check.point, target))
    out = result.to_dict()
    out["verification"] = {
        "file": args.out,
        "measures": check.to_dict(),
        "max_error": diff,
        "ok": diff <= VERIFY_TOL,
    }
    _emit(out)
    return EXIT_OK


def cmd_oracle_compare(args) -> int:
    expr = _load(args.file)
    exact = all_measures(expr)
    cb = cb_measures(checkerboard_of(expr, args.n))
    rows = {}
    mc = mc_measures(expr, args.samples, args.seed) if args.samples else None
    for name in FIELDS:
        value = getattr(exact, name)
        row = {
            "exact": to_json_value(value),
            "closed_form": exact.exact[name],
            "checkerboard": getattr(cb, name),
            "checkerboard_error": abs(float(value) - getattr(cb, name)),
        }
        if mc is not None:
            est = mc[name]
            row["mc"] = est.to_dict()
            row["mc_z"] = abs(est.value - float(value)) / est.stderr if est.stderr > 0 else None
        rows[name] = row
    _emit({"n": args.n, "measures": rows})
    return EXIT_OK


def _csv_rows(header: List[str], rows) -> None:
    sys.stdout.write(",".join(header) + "\n")
    for row in rows:
        sys.stdout.write(",".join(str(to_json_value(x)) for x in row) + "\n")


def cmd_plot(args) -> int:
    if args.what == "polyhedron":
        _emit(region.export_mesh())
        return EXIT_OK
    expr = _load(args.file)
    if args.what == "mass":
        # a shuffle file is drawn piece for piece, zero-width pieces included
        s = expr if isinstance(expr, ShuffleOfM) else as_shuffle(expr)
        _csv_rows(["x0", "y0", "x1", "y1", "mass"], (p.endpoints() + (p.width,) for p in s.pieces))
    else:
        section = diagonal(expr) if args.what == "diag" else opposite_diagonal(expr)
        _csv_rows(["u", "value"], zip(section.breakpoints, section.values))
    return EXIT_OK


def cmd_checkerboard(args) -> int:
    expr = _load(args.file)
    sys.stdout.write(checkerboard_of(expr, args.n).to_csv())
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="concordia", description="Exact copula dependence measures.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measures", help="six coefficients of an expression file")
    m.add_argument("file")
    m.add_argument("--mode", default="exact", help="exact | cb:<n> | mc:<samples>:<seed>")
    m.set_defaults(func=cmd_measures)

    r = sub.add_parser("region", help="membership, tau bounds and mesh export")
    rsub = r.add_subparsers(dest="region_command", required=True)
    rc = rsub.add_parser("check")
    for name in ("phi", "gamma", "tau"):
        rc.add_argument(name)
    rc.add_argument("--tol")
    rc.set_defaults(func=cmd_region_check)
    rb = rsub.add_parser("bounds")
    rb.add_argument("phi")
    rb.add_argument("gamma")
    rb.add_argument("--tol")
    rb.set_defaults(func=cmd_region_bounds)
    re_ = rsub.add_parser("export")
    re_.add_argument("--format", choices=("json", "obj"), default="json")
    re_.add_argument("--out")
    re_.set_defaults(func=cmd_region_export)

    s = sub.add_parser("synthesize", help="build a copula with given (phi, gamma, tau)")
    for name in ("phi", "gamma", "tau"):
        s.add_argument(name)
    s.add_argument("--out", required=True)
    s.add_argument("--tol")
    s.set_defaults(func=cmd_synthesize)

    o = sub.add_parser("oracle-compare", help="exact values against the checkerboard and MC oracles")
    o.add_argument("file")
    o.add_argument("--n", type=int, default=1024)
    o.add_argument("--samples", type=int, default=0)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_oracle_compare)

    pl = sub.add_parser("plot", help="plot data as CSV (mass, diag, odiag) or JSON (polyhedron)")
    pl.add_argument("file", nargs="?")
    pl.add_argument("what", choices=("mass", "diag", "odiag", "polyhedron"))
    pl.set_defaults(func=cmd_plot)

    c = sub.add_parser("checkerboard", help="checkerboard cell masses as CSV")
    c.add_argument("file")
    c.add_argument("--n", type=int, required=True)
    c.set_defaults(func=cmd_checkerboard)
    return p


_NEGATIVE_RATIONAL = re.compile(r"^-\d+/\d+$")


def _fix_args(argv: List[str]) -> List[str]:
    # allow "plot polyhedron" without a file argument
    if len(argv) >= 2 and argv[0] == "plot" and argv[1] == "polyhedron":
        argv = ["plot", "-", "polyhedron"] + argv[2:]
    # argparse would read "-1/2" as an option; a leading space keeps it positional
    return [" " + a if _NEGATIVE_RATIONAL.match(a) else a for a in argv]


def main(argv: Optional[List[str]] = None) -> int:
    argv = _fix_args(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CliError as err:
        _error(str(err))
        return err.code
    except (OutOfRegion, OutOfFace) as err:
        _error(f"outside the region: {err}")
        return EXIT_OUTSIDE
    except (ValidationError, NotAShuffle) as err:
        _error(f"invalid copula: {err}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
