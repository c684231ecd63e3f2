"""Command-line entry point: ``netprice <command> ...``.

Exit codes: 0 success, 1 a ``verify`` check failed, 2 invalid input,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import instances, io, linesweep, pricing
from .transfer import (
    DEFAULT_TOL,
    is_eps_approx_equilibrium,
    is_equilibrium_exact,
    iterate_fixed_point,
    transfer,
)
from .core import GroupedInstance, Side, evaluate, format_rat, rat_vector, to_rat
from .errors import DegenerateExtraction, InternalInvariantViolation, NetPriceError, ValidationError

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2, 3


def _rat_list(text: str) -> tuple:
    return rat_vector(t for t in text.split(",") if t.strip())


def _matrix(text: str) -> list:
    return [[to_rat(x) for x in row.split(",")] for row in text.split(";")]


def _load(path: str) -> GroupedInstance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return io.parse_instance(text)


def _fmt(args) -> str:
    return "machine" if args.json else "text"


def cmd_solve(args) -> int:
    ginst = _load(args.inp)
    offsets = _rat_list(args.offsets) if args.offsets else None
    pwl = linesweep.sweep(ginst.instance, Side.parse(args.side), offsets)
    args.out.write(io.serialize_equilibrium(pwl, _fmt(args)))
    return EXIT_OK


def cmd_eval(args) -> int:
    ginst = _load(args.inp)
    side = Side.parse(args.side)
    if args.prices is not None:
        q = linesweep.equilibrium_at_price_vector(ginst, _rat_list(args.prices), side)
    else:
        q = evaluate(linesweep.sweep(ginst.instance, side), to_rat(args.price))
    args.out.write(io.serialize_equilibrium(q, _fmt(args)))
    return EXIT_OK


def cmd_optimize(args) -> int:
    ginst = _load(args.inp)
    side = Side.parse(args.side)
    if args.family == "uniform":
        outcome = pricing.optimal_uniform_price(linesweep.sweep(ginst.instance, side))
    else:
        if args.base is None:
            raise ValidationError(f"--base is required for the {args.family} family")
        base = _rat_list(args.base)
        if args.family == "shift":
            outcome = pricing.optimal_shifted(ginst, base, side)
        else:
            outcome = pricing.optimal_scaled(ginst, base, side)
    args.out.write(io.serialize_equilibrium(outcome, _fmt(args)))
    return EXIT_OK


def cmd_fptas(args) -> int:
    ginst = _load(args.inp)
    args.out.write(io.serialize_equilibrium(pricing.fptas(ginst, to_rat(args.eps)), _fmt(args)))
    return EXIT_OK


def _agent_prices(ginst: GroupedInstance, args):
    if args.prices is not None:
        return ginst.agent_prices(_rat_list(args.prices))
    if args.price is None:
        raise ValidationError("give --price or --prices")
    return to_rat(args.price)


def cmd_verify(args) -> int:
    ginst = _load(args.inp)
    prices = _agent_prices(ginst, args)
    try:
        q = io.parse_probvec(Path(args.q).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {args.q}: {exc.strerror}") from None
    if len(q) != ginst.instance.n:
        raise ValidationError(f"q has {len(q)} entries for {ginst.instance.n} agents")
    if args.eps is None:
        ok = is_equilibrium_exact(ginst.instance, prices, q)
        label = "exact equilibrium"
    else:
        ok = is_eps_approx_equilibrium(ginst.instance, prices, q, to_rat(args.eps))
        label = f"{format_rat(to_rat(args.eps))}-approximate equilibrium"
    image = transfer(ginst.instance, prices, q)
    if args.json:
        doc = {
            "kind": "verify",
            "check": label,
            "ok": ok,
            "best_response": [f"{v.numerator}/{v.denominator}" for v in image],
        }
        args.out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        args.out.write(f"{label}: {'yes' if ok else 'no'}\n")
        args.out.write("best response " + io.serialize_equilibrium(image))
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_oracle(args) -> int:
    ginst = _load(args.inp)
    prices = _agent_prices(ginst, args)
    tol = to_rat(args.tol) if args.tol is not None else DEFAULT_TOL
    q, converged, iters = iterate_fixed_point(
        ginst.instance, prices, args.start, args.max_iters, tol, exact=not args.float
    )
    if args.float:
        if args.json:
            doc = {"kind": "oracle", "q": list(q), "converged": converged, "iters": iters}
            args.out.write(json.dumps(doc, sort_keys=True) + "\n")
        else:
            args.out.write("q ~ [" + ", ".join(f"{v:.12g}" for v in q) + "]\n")
    elif args.json:
        doc = json.loads(io.serialize_equilibrium(q, "machine"))
        doc.update(kind="oracle", converged=converged, iters=iters)
        args.out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        args.out.write(io.serialize_equilibrium(q))
    if not args.json:
        args.out.write(f"converged: {'yes' if converged else 'no'}\niterations: {iters}\n")
    return EXIT_OK


def cmd_gen(args) -> int:
    fam = args.family
    header = []
    if fam == "counterexample":
        obj = instances.gen_counterexample(args.n)
    elif fam == "jump":
        obj = instances.gen_jump()
    elif fam == "expstruct":
        obj = instances.gen_expstruct(args.n)
    elif fam == "random":
        obj = instances.gen_random(
            args.n, to_rat(args.density), args.seed, args.diag_dominant, to_rat(args.max_value)
        )
    else:
        game = instances.BimatrixGame(_matrix(args.A), _matrix(args.B))
        obj, roles = instances.gen_ppad(game, to_rat(args.delta))
        header.append(f"# bimatrix gadget, price {format_rat(roles.price)}")
        for i in range(roles.n):
            header.append(f"# role X{i + 1} = agent {roles.X[i] + 1}")
        for i in range(roles.n):
            header.append(f"# role Y{i + 1} = agent {roles.Y[i] + 1}")
        for i in range(roles.n):
            for j in range(roles.n):
                header.append(f"# role U{i + 1},{j + 1} = agent {roles.U[i][j] + 1}")
        for i in range(roles.n):
            for j in range(roles.n):
                header.append(f"# role V{i + 1},{j + 1} = agent {roles.V[i][j] + 1}")
    text = "".join(h + "\n" for h in header) + io.serialize_instance(obj)
    if args.dest == "-":
        args.out.write(text)
    else:
        Path(args.dest).write_text(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable JSON output")

    parser = argparse.ArgumentParser(prog="netprice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="piecewise equilibrium over all prices")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--side", default="pess", choices=["pess", "opt"])
    p.add_argument("--offsets", help="comma-separated per-agent price offsets")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", parents=[common], help="equilibrium at one price or price vector")
    p.add_argument("--in", dest="inp", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--price")
    g.add_argument("--prices", help="comma-separated group prices")
    p.add_argument("--side", default="pess", choices=["pess", "opt"])
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("optimize", parents=[common], help="revenue-optimal price in a one-parameter family")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--family", default="uniform", choices=["uniform", "shift", "scale"])
    p.add_argument("--base", help="comma-separated base group prices")
    p.add_argument("--side", default="pess", choices=["pess", "opt"])
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("fptas", parents=[common], help="approximately optimal group prices")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--eps", required=True)
    p.set_defaults(func=cmd_fptas)

    p = sub.add_parser("verify", parents=[common], help="check a candidate probability vector")
    p.add_argument("--in", dest="inp", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--price")
    g.add_argument("--prices")
    p.add_argument("--q", required=True, help="file holding the probability vector")
    p.add_argument("--eps")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="iterate the best-response map")
    p.add_argument("--in", dest="inp", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--price")
    g.add_argument("--prices")
    p.add_argument("--start", default="zero", choices=["zero", "one"])
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--tol")
    p.add_argument("--float", action="store_true", help="iterate in double precision")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", parents=[common], help="write a generated instance")
    p.add_argument("--family", required=True, choices=["counterexample", "jump", "expstruct", "random", "ppad"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--density", default="1/2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--diag-dominant", action="store_true")
    p.add_argument("--max-value", default="10")
    p.add_argument("--delta", default="1/100")
    p.add_argument("--A", default="1,-1;-1,1", help="row player payoffs, rows split by ';'")
    p.add_argument("--B", default="-1,1;1,-1", help="column player payoffs")
    p.add_argument("--out", dest="dest", default="-")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.out = out or sys.stdout
    try:
        return args.func(args)
    except (ValidationError, DegenerateExtraction) as exc:
        print(f"netprice: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InternalInvariantViolation as exc:
        print(f"netprice: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except NetPriceError as exc:
        print(f"netprice: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
