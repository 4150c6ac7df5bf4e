"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 negative answer (not
isomorphic, no path within budget, not thick, invalid triangulation),
3 resource cap reached.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

from . import bounds as B
from .canon import DisconnectedError, canonical_signature, is_isomorphic
from .hypgeom import PI_OVER_3, GeometryError, ShapeAssignment, check_thickness, develop_cusp, gluing_residual
from .pachner import Move, MoveError, applicable_moves, apply_with_map
from .search import NoPathFound, SearchBudget, StateCapHit, connect, sphere
from .triangulation import GluedTriangulation, TriangulationError, load, serialize, validate

OK, USAGE, NEGATIVE, CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(data, as_json: bool, lines: Sequence[str]) -> None:
    if as_json:
        print(json.dumps(data, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _load(path: str) -> GluedTriangulation:
    try:
        return load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except TriangulationError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _num(value) -> object:
    if isinstance(value, B.Magnitude):
        return value.to_dict()
    return value


def _resolve_theta0(raw: str, T: Optional[GluedTriangulation]) -> float:
    """Turn ``--theta0`` into radians, checking it against measured angles when shapes exist."""
    measured = None
    if T is not None and T.shapes is not None:
        measured = ShapeAssignment(T.shapes).min_angle()
    if raw == "auto":
        if measured is None:
            raise UsageError("--theta0 auto needs a triangulation with shape lines")
        return min(measured, PI_OVER_3)
    try:
        theta0 = float(raw)
    except ValueError as exc:
        raise UsageError(f"--theta0 must be a number of radians or 'auto', got {raw!r}") from exc
    if not math.isfinite(theta0):
        raise UsageError("--theta0 must be finite")
    if measured is not None and theta0 > measured + 1e-12:
        raise _Negative(f"theta0 = {theta0} exceeds the smallest dihedral angle {measured}")
    return theta0


class _Negative(Exception):
    pass


# -- subcommands ----------------------------------------------------------------------


def cmd_validate(args) -> int:
    T = _load(args.file)
    report = validate(T)
    lines = [
        f"tetrahedra: {T.tet_count}",
        f"closed: {report.closed}",
        f"orientable: {report.orientable}",
        f"cusps: {report.cusp_count}",
        "edge degrees: " + " ".join(str(e.degree) for e in report.edge_classes),
        "vertex links: " + " ".join(f"{v.kind}({v.link_euler})" for v in report.vertex_classes),
    ]
    lines += [f"problem: {p}" for p in report.problems]
    lines.append("valid" if report.ok else "invalid")
    data = report.to_dict()
    data["tet_count"] = T.tet_count
    data["valid"] = report.ok
    _emit(data, args.json, lines)
    return OK if report.ok else NEGATIVE


def cmd_canon(args) -> int:
    T = _load(args.file)
    sig = canonical_signature(T)
    if args.other is None:
        _emit({"signature": sig}, args.json, [sig])
        return OK
    T2 = _load(args.other)
    sig2 = canonical_signature(T2)
    same, iso = is_isomorphic(T, T2)
    data = {"signatures": [sig, sig2], "isomorphic": same}
    if iso is not None:
        data["mapping"] = {
            "tets": list(iso.tet_map),
            "vertices": ["".join(map(str, p)) for p in iso.vertex_maps],
        }
    _emit(data, args.json, [sig, sig2, "isomorphic" if same else "not isomorphic"])
    return OK if same else NEGATIVE


def cmd_moves(args) -> int:
    T = _load(args.file)
    if args.action == "list":
        moves = applicable_moves(T)
        _emit({"moves": [m.to_dict() for m in moves]}, args.json, [str(m) for m in moves])
        return OK
    if args.move is None:
        raise UsageError("moves apply needs --move JSON")
    try:
        move = Move.from_dict(json.loads(args.move))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad --move: {exc}") from exc
    try:
        result = apply_with_map(T, move)
    except MoveError as exc:
        raise UsageError(f"inapplicable move {move}: {exc}") from exc
    text = serialize(result.triangulation)
    _emit(
        {"triangulation": text, "inverse": result.inverse.to_dict(), "tet_count": result.triangulation.tet_count},
        args.json,
        [text.rstrip("\n")],
    )
    return OK


def _budget(args) -> SearchBudget:
    try:
        return SearchBudget(args.max_moves, args.max_tets, args.max_states)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_search(args) -> int:
    T = _load(args.file)
    budget = _budget(args)
    try:
        if args.action == "sphere":
            if args.radius is None:
                raise UsageError("search sphere needs --radius")
            result = sphere(T, args.radius, budget)
            lines = [f"{k}: {v}" for k, v in sorted(result.counts.items())]
            if result.truncated:
                lines.append("truncated: state cap reached")
            _emit(result.to_dict(), args.json, lines)
            return CAP if result.truncated else OK
        if args.other is None:
            raise UsageError("search connect needs two files")
        T2 = _load(args.other)
        seq = connect(T, T2, budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    except NoPathFound as exc:
        print(f"not found: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps({"found": False, "reason": "no-path", "message": str(exc)}, sort_keys=True))
        return NEGATIVE
    except StateCapHit as exc:
        print(f"cap reached: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps({"found": False, "reason": "state-cap", "message": str(exc)}, sort_keys=True))
        return CAP
    # the sequence JSON is the machine output either way
    print(seq.to_json())
    return OK


def cmd_bounds(args) -> int:
    files = [_load(p) for p in (args.file or [])]
    if files:
        if len(files) > 2:
            raise UsageError("at most two --file arguments")
        T1 = files[0]
        T2 = files[-1]
        m1, m2 = T1.tet_count, T2.tet_count
        thetas = [_resolve_theta0(args.theta0 or "auto", T) for T in files]
        theta0 = min(thetas)
    else:
        if args.m1 is None or args.m2 is None or args.theta0 is None:
            raise UsageError("bounds needs --m1, --m2 and --theta0 (or --file)")
        m1, m2 = args.m1, args.m2
        theta0 = _resolve_theta0(args.theta0, None)
    try:
        report = B.bounds_report(m1, m2, theta0, args.epsilon)
    except B.BoundsError as exc:
        raise UsageError(str(exc)) from exc
    data = report.to_dict()
    lines = [f"m1={m1} m2={m2} theta0={report.params.theta0!r} epsilon={report.params.epsilon!r}"]
    for name, entry in data["fields"].items():
        value = getattr(report, name)
        shown = "n/a (needs m >= 4)" if value is None else (str(value) if isinstance(value, B.Magnitude) else repr(value))
        lines.append(f"{name}: {shown}")
    _emit(data, args.json, lines)
    return OK


def cmd_systole(args) -> int:
    if (args.file is None) == (args.m is None):
        raise UsageError("systole needs exactly one of --file and --m")
    T = _load(args.file) if args.file else None
    m = T.tet_count if T is not None else args.m
    theta0 = _resolve_theta0(args.theta0, T)
    try:
        exact, simple = B.systole_bounds(m, theta0, args.epsilon)
    except B.BoundsError as exc:
        raise UsageError(str(exc)) from exc
    data = {
        "m": m,
        "theta0": min(theta0, PI_OVER_3),
        "epsilon": args.epsilon,
        "s0_exact": exact.to_dict(),
        "s0_simplified": simple.to_dict(),
    }
    lines = [f"m: {m}", f"theta0: {data['theta0']!r}", f"s0_exact: {exact}", f"s0_simplified: {simple}"]
    _emit(data, args.json, lines)
    return OK


def cmd_cusp(args) -> int:
    T = _load(args.file)
    try:
        section = develop_cusp(T, cusp=args.cusp)
    except GeometryError as exc:
        raise UsageError(str(exc)) from exc
    data = section.to_dict()
    u, v = section.lattice
    lines = [
        f"cusp: {section.cusp}",
        f"triangles: {section.triangle_count}",
        f"lattice: {u!r} {v!r}",
        f"shortest: {section.shortest!r}",
        f"area: {section.area!r}",
        "edge lengths: " + " ".join(f"{x:.12g}" for x in section.edge_lengths),
    ]
    _emit(data, args.json, lines)
    return OK


def cmd_thickness(args) -> int:
    T = _load(args.file)
    if T.shapes is None:
        raise UsageError(f"{args.file} has no shape lines")
    try:
        theta0 = float(args.theta0)
        report = check_thickness(T.shapes, theta0)
        residual = gluing_residual(T)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    data = report.to_dict()
    data["gluing_residual"] = residual
    lines = [f"min angle: {report.min_angle!r}", f"residual: {residual:.3g}", "thick" if report.is_thick else "not thick"]
    _emit(data, args.json, lines)
    return OK if report.is_thick else NEGATIVE


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="idealtri", description="Triangulations of cusped 3-manifolds: moves, signatures, bounds.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check a triangulation file")
    p.add_argument("file")

    p = add("canon", cmd_canon, "print the canonical signature; compare two files")
    p.add_argument("file")
    p.add_argument("other", nargs="?")

    p = add("moves", cmd_moves, "list or apply Pachner moves")
    p.add_argument("action", choices=["list", "apply"])
    p.add_argument("file")
    p.add_argument("--move", help='e.g. \'{"kind":"2-3","face":[0,1]}\'')

    p = add("search", cmd_search, "search the Pachner graph")
    p.add_argument("action", choices=["connect", "sphere"])
    p.add_argument("file")
    p.add_argument("other", nargs="?")
    p.add_argument("--max-moves", type=int, default=6)
    p.add_argument("--max-tets", type=int, default=None)
    p.add_argument("--max-states", type=int, default=20000)
    p.add_argument("--radius", type=int)

    p = add("bounds", cmd_bounds, "report every bound for (m1, m2, theta0)")
    p.add_argument("--m1", type=int)
    p.add_argument("--m2", type=int)
    p.add_argument("--theta0", help="radians, or 'auto' with --file")
    p.add_argument("--file", action="append", help="triangulation with shapes (repeat for the second)")
    p.add_argument("--epsilon", type=float, default=B.EPSILON)

    p = add("systole", cmd_systole, "systole lower bounds")
    p.add_argument("--file")
    p.add_argument("--m", type=int)
    p.add_argument("--theta0", required=True, help="radians, or 'auto' with --file")
    p.add_argument("--epsilon", type=float, default=B.EPSILON)

    p = add("cusp", cmd_cusp, "develop and normalise a cusp cross-section")
    p.add_argument("file")
    p.add_argument("--cusp", type=int, default=0)

    p = add("thickness", cmd_thickness, "test theta0-thickness of the file's shapes")
    p.add_argument("file")
    p.add_argument("--theta0", required=True)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except _Negative as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    except (DisconnectedError, GeometryError, B.BoundsError, TriangulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
