"""Command-line front end: ``unitstate <command> --problem FILE ...``.

Reports are JSON with sorted keys; rationals are written as ``"p/q"``
strings and floats appear only for quadrature estimates and slopes.  Exit
status is 0 on success, 2 on invalid input and 1 on internal errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import enumeration as en
from . import geometry as geo
from . import measure as ms
from . import numtheory as nt
from . import states as st
from . import terms as tm
from .geometry import NotAUnitError
from .problem import ProblemError, ProblemSpec, load


class UsageError(ValueError):
    pass


def _r(x) -> str:
    return str(Fraction(x))


def _pt(p) -> list[str]:
    return [_r(x) for x in p]


def _need(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError(f"{args.command} needs " + ", ".join(f"--{n}" for n in missing))


def _contrib(c: st.SimplexContribution) -> dict:
    return {"id": c.id, "parent": c.parent, "nu": _r(c.nu), "average": _r(c.average), "vertices": [_pt(v) for v in c.vertices]}


def _state_json(r: st.StateReport) -> dict:
    return {
        "value": _r(r.value),
        "total_mass": _r(r.total_mass),
        "level": r.level,
        "per_simplex": [_contrib(c) for c in r.per_simplex],
    }


def _quad_json(q) -> dict | str:
    if isinstance(q, ms.QuadratureEstimate):
        return {"value": q.value, "error_bound": q.error_bound if q.error_bound != float("inf") else None, "refinement_level": q.refinement_level}
    return _r(q)


def _weights(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse weights {text!r}") from None


def _grid(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse t-grid {text!r}") from None


# -- commands -------------------------------------------------------------------


def cmd_check(spec: ProblemSpec, args) -> dict:
    lp = geo.local_dim_partition(spec.complex)
    return {
        "valid": True,
        "n": spec.n,
        "simplices": len(spec.complex),
        "levels": lp.nonempty_levels,
        "units": list(spec.units),
        "terms": {k: str(v) for k, v in sorted(spec.terms.items())},
        "elements": sorted(spec.elements),
    }


def cmd_state(spec, args) -> dict:
    _need(args, "unit", "element")
    return _state_json(st.state(spec.term(args.element), spec.unit(args.unit), spec.complex))


def cmd_state_level(spec, args) -> dict:
    _need(args, "unit", "element", "level")
    return _state_json(st.state_level(spec.term(args.element), spec.unit(args.unit), spec.complex, args.level))


def cmd_faithful(spec, args) -> dict:
    _need(args, "unit", "element", "weights")
    h, u, W = spec.term(args.element), spec.unit(args.unit), spec.complex
    levels = st.levels_of(W)
    wv = st.WeightVector(tuple(levels), tuple(_weights(args.weights)))
    r = st.state_weighted(h, u, W, wv)
    return {
        "value": _r(r.value),
        "levels": levels,
        "weights": [_r(x) for x in wv.weights],
        "level_values": {str(l): _r(st.state_level(h, u, W, l).value) for l in levels},
        "state": _r(st.state(h, u, W).value),
    }


def cmd_tau0(spec, args) -> dict:
    _need(args, "element")
    u = spec.unit(args.unit) if args.unit else "1"
    h = spec.term(args.element)
    return {
        "tau0": _r(st.tau0_reference(h, spec.complex, u)),
        "m0": _r(st.state_level(h, u, spec.complex, 0).value),
    }


def _enum_rows(run: en.EnumerationRun):
    for i, s in enumerate(run.states, 1):
        yield [i, " ".join(map(str, s.primitive)), s.unit_value, s.denominator, " ".join(_pt(s.section_point))]


def cmd_enumerate(spec, args):
    _need(args, "unit", "bound")
    run = en.enumerate_primitive(spec.complex, spec.unit(args.unit), args.bound)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "coordinates", "unit_value", "denominator", "section_point"])
        w.writerows(_enum_rows(run))
        return buf.getvalue()
    return {
        "count": len(run),
        "block_size": run.block_size,
        "block_boundaries": list(run.block_boundaries),
        "states": [
            {"index": i, "coordinates": list(s.primitive), "unit_value": s.unit_value, "section_point": _pt(s.section_point)}
            for i, s in enumerate(run.states, 1)
        ],
    }


def _partials_csv(run, h) -> str:
    vals = en.state_values(run, h)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "unit_value", "value", "partial_average"])
    acc = Fraction(0)
    for k, (s, x) in enumerate(zip(run.states, vals), 1):
        acc += x
        w.writerow([k, s.unit_value, _r(x), repr(float(acc / k))])
    return buf.getvalue()


def cmd_converge(spec, args):
    _need(args, "unit", "element", "bound")
    h, u, W = spec.term(args.element), spec.unit(args.unit), spec.complex
    run = en.enumerate_primitive(W, u, args.bound)
    table = _partials_csv(run, h)
    if args.format == "csv":
        return table
    if args.out:
        Path(str(args.out) + ".partials.csv").write_text(table)
    exact = st.state(h, u, W).value
    final = en.cesaro_partials(run, h)[-1] if len(run) else None
    blocks = en.block_partials(run, h)
    return {
        "state": _r(exact),
        "count": len(run),
        "block_size": run.block_size,
        "final_average": _r(final) if final is not None else None,
        "final_average_float": float(final) if final is not None else None,
        "deviation": float(abs(final - exact)) if final is not None else None,
        "block_partials": [None if b is None else _r(b) for b in blocks],
    }


def cmd_density(spec, args) -> dict:
    _need(args, "unit", "unit2", "element")
    u1, u2 = spec.unit(args.unit), spec.unit(args.unit2)
    r = st.verify_density(spec.term(args.element), u1, u2, spec.complex, level=args.quad_level, seed=args.seed)
    out = {
        "d": r.d,
        "D1": _r(r.D1),
        "D2": _r(r.D2),
        "C": _r(r.C),
        "lhs": _r(r.lhs),
        "rhs": _quad_json(r.rhs),
        "discrepancy": r.discrepancy,
    }
    if r.point_checks:
        out["point_checks"] = [{"point": _pt(p), "mu2": _r(a), "ratio_times_mu1": _r(b)} for p, a, b in r.point_checks]
    return out


def cmd_dimension(spec, args) -> dict:
    _need(args, "unit", "t-grid")
    grid = _grid(args.t_grid)
    slopes, dim = st.dimension_estimate(spec.complex, spec.unit(args.unit), grid)
    counts = en.xi_counts(spec.complex, spec.unit(args.unit), grid)
    return {"t_grid": grid, "counts": counts, "slopes": slopes, "dim_estimate": dim}


def cmd_ehrhart(spec, args) -> dict:
    _need(args, "simplex", "bound")
    if not 0 <= args.simplex < len(spec.complex):
        raise UsageError(f"no simplex with id {args.simplex}")
    S = spec.complex.simplices[args.simplex]
    rows = []
    for t in range(1, args.bound + 1):
        rows.append({
            "t": t,
            "points": nt.ehrhart_count(S, t),
            "primitive": nt.primitive_count(S, t),
            "primitive_by_inversion": nt.primitive_by_inversion(S, t),
        })
    return {"simplex": [_pt(v) for v in S.vertices], "counts": rows}


COMMANDS = {
    "check": cmd_check,
    "state": cmd_state,
    "state-level": cmd_state_level,
    "faithful": cmd_faithful,
    "tau0": cmd_tau0,
    "enumerate": cmd_enumerate,
    "converge": cmd_converge,
    "density": cmd_density,
    "dimension": cmd_dimension,
    "ehrhart": cmd_ehrhart,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", required=True, help="problem JSON file or bundled fixture name")
    common.add_argument("--unit")
    common.add_argument("--unit2")
    common.add_argument("--element")
    common.add_argument("--bound", type=int)
    common.add_argument("--level", type=int)
    common.add_argument("--weights", help="comma-separated rationals, one per nonempty level")
    common.add_argument("--quad-level", type=int, default=8)
    common.add_argument("--t-grid", help="comma-separated increasing integers")
    common.add_argument("--simplex", type=int, help="simplex id for ehrhart")
    common.add_argument("--out")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    p = argparse.ArgumentParser(prog="unitstate", description="Invariant states of strong units on polyhedral cones.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def _echo(args) -> dict:
    keys = ("problem", "unit", "unit2", "element", "bound", "level", "weights", "quad_level", "t_grid", "simplex", "format", "seed")
    return {k: getattr(args, k) for k in keys if getattr(args, k) is not None}


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        spec = load(args.problem)
        result = COMMANDS[args.command](spec, args)
    except ProblemError as e:
        for d in e.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        if args.command == "check":
            _emit(json.dumps({"command": "check", "results": {"valid": False, "diagnostics": e.diagnostics}}, sort_keys=True, indent=2) + "\n", args.out)
        return 2
    except (UsageError, NotAUnitError, st.NegativeElementError, st.EmptyLevelError, tm.TermSyntaxError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # pragma: no cover - reported, not hidden
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    if isinstance(result, str):
        _emit(result, args.out)
        return 0
    echo = _echo(args)
    digest = hashlib.sha256((spec.digest + json.dumps(echo, sort_keys=True)).encode()).hexdigest()
    report = {"command": args.command, "args": echo, "inputs_digest": digest, "results": result}
    if args.timing:
        report["timing_seconds"] = time.perf_counter() - t0
    _emit(json.dumps(report, sort_keys=True, indent=2) + "\n", args.out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
