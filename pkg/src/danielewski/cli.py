"""Command-line front end.

Exit codes: 0 success, 1 identity failure, 2 input error, 3 inconclusive
closure (or membership not found), 4 planning failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from danielewski import __version__
from danielewski.closure import lie_closure, membership, preset
from danielewski.errors import (
    DanielewskiError,
    DegeneratePoints,
    Exhausted,
    NewtonStalled,
    PlanningFailed,
)
from danielewski.flows import AutomorphismProgram, FlowStep, SurfacePoint, run_program
from danielewski.kernels import BACKEND
from danielewski.poisson import field_to_ham, ham_to_field, poisson, verify_volume_bracket_table
from danielewski.ring import DefiningPoly, Ring, Smoothness
from danielewski.transit import TransportTask, solve_task
from danielewski.vfield import parse_field, verify_identities

EXIT_OK, EXIT_IDENTITY, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_PLANNING = 0, 1, 2, 3, 4
SYMBOLIC_ONLY = {"info", "verify", "poisson"}


class InputError(Exception):
    pass


def _complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise InputError(f"bad complex number {text!r}") from None


def _load_ring(args):
    try:
        p = DefiningPoly.parse(args.p)
    except (ValueError, SyntaxError, DanielewskiError) as exc:
        raise InputError(f"cannot parse p: {exc}") from None
    if p.nvars == 1 and p.smoothness is not Smoothness.VERIFIED_SIMPLE_ZEROS:
        if not args.allow_singular:
            raise InputError(f"p = {p} has a multiple zero (use --allow-singular)")
        if args.command not in SYMBOLIC_ONLY:
            raise InputError("--allow-singular only permits symbolic identity commands")
    return Ring(p)


def _emit(args, payload, text_lines):
    if args.format == "json":
        out = json.dumps(payload, indent=2) + "\n"
    else:
        out = "\n".join(text_lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _table(rows, headers):
    widths = [max(len(str(r[i])) for r in [headers] + rows) for i in range(len(headers))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*headers), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*(str(c) for c in r)) for r in rows]
    return lines


def _index_str(index):
    return ",".join(f"{k}={v}" for k, v in index.items())


# ---------------------------------------------------------------------------
# commands


def cmd_info(args):
    ring = _load_ring(args)
    p = ring.p
    payload = {
        "p": str(p),
        "N": p.nvars,
        "degree": p.degree,
        "smoothness": p.smoothness.name,
        "backend": BACKEND,
        "version": __version__,
    }
    _emit(args, payload, [f"{k:<11}{v}" for k, v in payload.items()])
    return EXIT_OK


def cmd_verify(args):
    ring = _load_ring(args)
    report = verify_identities(ring, args.nmax, args.kmax)
    payload = {"identities": report.to_json()}
    ok = report.all_passed
    rows = [(c.label, _index_str(c.index), "PASS" if c.passed else "FAIL") for c in report.checks]
    if ring.N == 1:
        table = verify_volume_bracket_table(ring, args.nmax, args.nmax)
        payload["poisson"] = table.to_json()
        ok = ok and table.all_passed
        rows += [(c.label, _index_str(c.index), "PASS" if c.passed else "FAIL") for c in table.checks]
    payload["all_passed"] = ok
    lines = _table(rows, ("identity", "index", "result"))
    for c in report.printed_checks:
        lines.append(f"printed form {'holds' if c.passed else 'fails'}: {c.label} [{_index_str(c.index)}]")
    lines += [f"note: {d}" for d in report.discrepancies]
    lines.append(f"all identities: {'PASS' if ok else 'FAIL'}")
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_IDENTITY


def _generators(args, ring):
    if args.set == "custom":
        if not args.gens:
            raise InputError("--set custom needs --gens")
        labels = [g.strip() for g in args.gens.split(",") if g.strip()]
        try:
            fields = [parse_field(ring, g) for g in labels]
        except (ValueError, SyntaxError, DanielewskiError) as exc:
            raise InputError(f"bad generator: {exc}") from None
        if any(not f.tangent for f in fields):
            raise InputError("generators must be tangent")
        return fields, labels
    try:
        return preset(ring, args.set)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_closure(args):
    ring = _load_ring(args)
    if args.set.startswith("volume") and ring.N != 1:
        raise InputError("volume generator sets need N = 1")
    fields, labels = _generators(args, ring)
    if args.member:
        try:
            theta = parse_field(ring, args.member)
        except (ValueError, SyntaxError, DanielewskiError) as exc:
            raise InputError(f"bad --member field: {exc}") from None
        d_work = args.dwork if args.dwork is not None else theta.degree() + ring.p.degree + 3
        found = membership(theta, fields, d_work, args.max_rounds)
        payload = {"generators": labels, "member": args.member, "D_work": d_work, "found": found}
        _emit(args, payload, [f"member {args.member}: {'true' if found else 'not found'} (D_work={d_work})"])
        return EXIT_OK if found else EXIT_INCONCLUSIVE
    volume = args.volume or args.set.startswith("volume")
    report = lie_closure(fields, args.dtarget, args.dwork, args.max_rounds, volume=volume, labels=labels)
    lines = [
        f"generators   {', '.join(labels)}",
        f"D_target     {report.D_target}",
        f"D_work       {report.D_work}",
        f"dim_history  {report.dim_history}",
        f"slice_dim    {report.slice_dim}",
        f"target_dim   {report.target_dim}",
        f"verdict      {report.verdict}",
    ]
    _emit(args, report.to_json(), lines)
    return EXIT_OK if report.verdict == "Generated" else EXIT_INCONCLUSIVE


def cmd_poisson(args):
    ring = _load_ring(args)
    if ring.N != 1:
        raise InputError("the Poisson structure needs N = 1")
    try:
        if args.ham is not None:
            fld = ham_to_field(ring.parse(args.ham))
            payload = {"hamiltonian": args.ham, "field": fld.to_json()}
            lines = [f"X_h = {fld}"]
        elif args.field is not None:
            h = field_to_ham(parse_field(ring, args.field), args.cap)
            payload = {"field": args.field, "hamiltonian": str(h)}
            lines = [f"h = {h}"]
        else:
            if args.f is None or args.g is None:
                raise InputError("give --f and --g, or --ham, or --field")
            val = poisson(ring.parse(args.f), ring.parse(args.g))
            payload = {"f": args.f, "g": args.g, "bracket": str(val)}
            lines = [f"{{f, g}} = {val}"]
    except (ValueError, SyntaxError) as exc:
        raise InputError(str(exc)) from None
    _emit(args, payload, lines)
    return EXIT_OK


def _parse_point(p, text, tol):
    parts = [_complex(v) for v in text.split(",")]
    if len(parts) != 2 + p.nvars:
        raise InputError(f"point needs {2 + p.nvars} coordinates")
    try:
        return SurfacePoint.make(p, parts[0], parts[1], tuple(parts[2:]), tol)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_flow(args):
    ring = _load_ring(args)
    p = ring.p
    if args.program:
        with open(args.program, encoding="utf-8") as fh:
            prog = AutomorphismProgram.from_json(ring, json.load(fh))
    else:
        mult = None if args.multiplier in (None, "1") else ring.parse(args.multiplier)
        try:
            prog = AutomorphismProgram([FlowStep(args.base, args.k, mult, _complex(args.time))])
        except ValueError as exc:
            raise InputError(str(exc)) from None
    pts = [_parse_point(p, s, args.tol) for s in args.point]
    images, log = run_program(prog, pts, p)
    payload = {
        "program": prog.to_json(),
        "points": [q.to_json() for q in images],
        "residuals": log.residuals,
    }
    lines = [" ".join(f"{c:.12g}" for c in q.coords()) + f"  residual={q.residual:.3e}" for q in images]
    _emit(args, payload, lines)
    return EXIT_OK


def _load_task(args):
    path = args.task
    try:
        if path is None:
            text = resources.files("danielewski").joinpath("data/demo_task.json").read_text()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        data = json.loads(text)
        if args.seed is not None:
            data["seed"] = args.seed
        return TransportTask.from_json(data)
    except (OSError, KeyError, TypeError, ValueError, SyntaxError, DegeneratePoints) as exc:
        raise InputError(f"bad task: {exc}") from None


def cmd_transport(args):
    task = _load_task(args)
    p = task.p
    try:
        result = solve_task(task)
    except (PlanningFailed, NewtonStalled, Exhausted) as exc:
        _emit(args, {"error": type(exc).__name__, "detail": str(exc)}, [f"planning failed: {exc}"])
        return EXIT_PLANNING
    images, log = run_program(result.program, task.points, p)
    fixed_ok = all(a == b for i, (a, b) in enumerate(zip(images, task.points)) if i != task.mover)
    dist = images[task.mover].distance(task.target)
    ok = fixed_ok and dist <= task.tolerance
    payload = {
        "p": str(p),
        "seed": task.seed,
        "program": result.program.to_json(),
        "replay": {
            "residuals": log.residuals,
            "max_residual": log.max_residual(),
            "mover_distance": dist,
            "fixed_bitwise": fixed_ok,
            "condition_numbers": result.condition_numbers,
            "general_position_times": [[t.real, t.imag] for t in result.general_position_times],
        },
        "ok": ok,
    }
    lines = [
        f"steps           {len(result.program)}",
        f"mover_distance  {dist:.3e}",
        f"max_residual    {log.max_residual():.3e}",
        f"fixed_bitwise   {fixed_ok}",
        f"result          {'OK' if ok else 'FAIL'}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_PLANNING


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(prog="danielewski", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, need_p=True):
        if need_p:
            sp.add_argument("--p", required=True, help="defining polynomial, e.g. 'z^3 - z'")
            sp.add_argument("--allow-singular", action="store_true",
                            help="accept p with multiple zeros (symbolic commands only)")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")

    sp = sub.add_parser("info", help="describe p")
    common(sp)
    sp.set_defaults(func=cmd_info)

    sp = sub.add_parser("verify", help="check the bracket and Poisson identities exactly")
    common(sp)
    sp.add_argument("--nmax", type=int, default=5)
    sp.add_argument("--kmax", type=int, default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("closure", help="Lie closure of a generator set against the oracle")
    common(sp)
    sp.add_argument("--set", default="full6",
                    choices=("full6", "volume", "volume-intro", "volume-body", "lnd4", "custom"))
    sp.add_argument("--gens", help="comma-separated fields for --set custom, e.g. 'V,W,y*V'")
    sp.add_argument("--dtarget", type=int, default=3)
    sp.add_argument("--dwork", type=int, default=None)
    sp.add_argument("--max-rounds", type=int, default=50)
    sp.add_argument("--volume", action="store_true", help="compare against divergence-free fields")
    sp.add_argument("--member", help="membership query instead of a closure report")
    sp.set_defaults(func=cmd_closure)

    sp = sub.add_parser("poisson", help="Poisson brackets and Hamiltonians")
    common(sp)
    sp.add_argument("--f")
    sp.add_argument("--g")
    sp.add_argument("--ham", help="Hamiltonian h; prints X_h")
    sp.add_argument("--field", help="volume-preserving field; prints its Hamiltonian")
    sp.add_argument("--cap", type=int, default=None, help="degree cap for --field")
    sp.set_defaults(func=cmd_poisson)

    sp = sub.add_parser("flow", help="evaluate a flow step or program on points")
    common(sp)
    sp.add_argument("--base", default="V", choices=("V", "W", "H"))
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--multiplier", default=None)
    sp.add_argument("--time", default="1")
    sp.add_argument("--program", help="AutomorphismProgram JSON file (overrides --base)")
    sp.add_argument("--point", action="append", required=True, help="'x,y,z' complex coordinates")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("transport", help="move one point while fixing the others")
    common(sp, need_p=False)
    sp.add_argument("--task", help="task JSON (default: bundled demo)")
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=cmd_transport)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
