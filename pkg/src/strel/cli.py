"""Command line entry point: ``strel construct | op | verify | support | primes``.

Exit codes: 0 success, 1 a check failed (or came back unknown), 2 malformed
input, 3 well-formed input violating a mathematical constraint.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import io
from .chainring import RingSpec
from .groups import parse_group
from .grouprep import (
    W,
    base_change,
    dual_g,
    fixed_points,
    functor_F,
    hom_space,
    induce,
    is_isomorphic,
    mult_functor,
    random_module,
    regular,
    tensor_g,
    trivial,
    unit_map,
)
from .rnmod import Shape
from .spectrum import component_obstruction, residue_model, spc_points, support
from .stable import cone, desuspend, is_weakly_projective, stably_isomorphic, suspend
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_CONSTRAINT = 0, 1, 2, 3

CONSTRUCT_KINDS = (
    "trivial", "regular", "induce", "W", "tensor", "dual", "suspend", "desuspend",
    "cone", "base-change", "mult", "F", "random",
)
OPS = ("iso", "stably-iso", "weakly-projective", "hom-rank", "fixed-points", "obstruction", "residue")


class UsageError(Exception):
    pass


def _ring_group(args):
    if args.p is None or args.n is None or args.group is None:
        raise UsageError("--p, --n and --group are required")
    ring = RingSpec(args.p, args.n)
    try:
        group = parse_group(args.group)
    except ValueError as e:
        raise io.FormatError(str(e)) from None
    return ring, group


def _need(args, name):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"--{name} is required here")
    return v


def _inputs(args, count):
    if len(args.inputs) != count:
        raise UsageError(f"expected {count} module file(s), got {len(args.inputs)}")
    return [io.read_module(f) for f in args.inputs]


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def cmd_construct(args) -> int:
    kind = args.kind
    if kind in ("trivial", "regular", "induce", "W", "random"):
        ring, group = _ring_group(args)
        if kind == "trivial":
            M = trivial(ring, group, args.i if args.i is not None else ring.n)
        elif kind == "regular":
            M = regular(ring, group, args.i if args.i is not None else ring.n)
        elif kind == "W":
            M = W(ring, group, _need(args, "i"))
        elif kind == "induce":
            exps = tuple(int(e) for e in _need(args, "shape").split(",") if e)
            M = induce(Shape(ring, exps), group, args.i)[0]
        else:
            rng = np.random.default_rng(_need(args, "seed"))
            M = random_module(ring, group, rng, level=args.i, copies=args.j or 2)
    elif kind == "tensor":
        A, B = _inputs(args, 2)
        M = tensor_g(A, B)
    else:
        (A,) = _inputs(args, 1)
        if kind == "dual":
            M = dual_g(A)
        elif kind == "suspend":
            M = suspend(A)[0]
        elif kind == "desuspend":
            M = desuspend(A)[0]
        elif kind == "cone":
            M = cone(unit_map(A, _need(args, "i"))).obj
        elif kind == "base-change":
            M = base_change(A, _need(args, "i"))
        elif kind == "mult":
            M = mult_functor(A, _need(args, "i"))
        else:
            M = functor_F(A)
    _emit(io.dumps(M), args.out)
    return EXIT_OK


def cmd_op(args) -> int:
    name = args.name
    report = {"op": name}
    ok = True
    if name in ("iso", "stably-iso", "hom-rank"):
        A, B = _inputs(args, 2)
        if name == "hom-rank":
            gens = hom_space(A, B)
            report["generators"] = len(gens)
        else:
            seed = _need(args, "seed")
            fn = is_isomorphic if name == "iso" else stably_isomorphic
            res = fn(A, B, seed=seed, budget=args.budget)
            report["result"] = res.status.value
            if res.witness is not None:
                report["witness"] = res.witness.matrix.tolist()
            ok = res.status.value == "yes"
    else:
        (A,) = _inputs(args, 1)
        if name == "weakly-projective":
            v = is_weakly_projective(A)
            report["result"] = v.status.value
            report["certificate"] = v.certificate_hash()
            ok = v.weakly_projective
        elif name == "fixed-points":
            report["shape"] = list(fixed_points(A).exponents)
        else:
            i = _need(args, "i")
            M = component_obstruction(A, i) if name == "obstruction" else residue_model(A, i)
            if args.out:
                io.write_module(M, args.out)
            report["shape"] = list(M.exponents)
    if args.format == "machine":
        sys.stdout.write(_dump(report))
    else:
        sys.stdout.write(" ".join(f"{k}={v}" for k, v in report.items() if k != "witness") + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    ring, group = _ring_group(args)
    seed = args.seed if args.seed is not None else 0
    t0 = time.perf_counter()
    reports = run_suite(args.suite, ring, group, seed=seed, budget=args.budget)
    passed = sum(r.passed for r in reports)
    status = "pass" if passed == len(reports) else "fail"
    if args.format == "machine":
        doc = {
            "suite": args.suite,
            "params": {"p": ring.p, "n": ring.n, "group": args.group, "seed": seed, "budget": args.budget},
            "reports": [r.to_dict(args.timings) for r in reports],
            "summary": {"checks": len(reports), "passed": passed, "status": status},
        }
        if args.timings:
            doc["summary"]["seconds"] = round(time.perf_counter() - t0, 3)
        _emit(_dump(doc), args.out)
    else:
        lines = []
        for r in reports:
            extra = {k: v for k, v in r.params.items() if k not in ("p", "n", "group")}
            idx = "".join(f" {k}={v}" for k, v in extra.items())
            tail = f" [{r.seconds:.3f}s]" if args.timings else ""
            lines.append(f"{r.status.upper()} {r.check}{idx}: {r.statement}{tail}")
        lines.append(f"{args.suite}: {passed}/{len(reports)} checks pass ({status})")
        first_bad = next((r for r in reports if not r.passed), None)
        if first_bad is not None and first_bad.counterexample is not None:
            lines.append("counterexample: " + json.dumps(first_bad.counterexample, sort_keys=True))
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if status == "pass" else EXIT_FAIL


def cmd_support(args) -> int:
    (M,) = _inputs(args, 1)
    s = support(M)
    if args.format == "machine":
        sys.stdout.write(_dump({"members": sorted(s.members), "n": s.n, "label": s.label}))
    else:
        sys.stdout.write(str(s) + "\n")
    return EXIT_OK


def cmd_primes(args) -> int:
    ring, group = _ring_group(args)
    spc = spc_points(ring, group)
    if args.format == "machine":
        doc = {
            "points": [{"i": P.i, "generators": [f"W_{j}" for j in P.generator_indices]} for P in spc.points],
            "orthogonality": {f"{i},{j}": v for (i, j), v in sorted(spc.orthogonality.items())},
            "topology": spc.topology,
        }
        sys.stdout.write(_dump(doc))
    else:
        for P in spc.points:
            sys.stdout.write(str(P) + "\n")
        for (i, j), v in sorted(spc.orthogonality.items()):
            sys.stdout.write(f"W_{i} (x) W_{j} stably zero: {v}\n")
        sys.stdout.write(f"topology: {spc.topology}\n")
    return EXIT_OK if spc.verified() else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--group", help="cyclic:m, S3, or a JSON group object")
    common.add_argument("--i", type=int)
    common.add_argument("--j", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--budget", type=int, default=64)
    common.add_argument("--out")
    common.add_argument("--format", choices=("text", "machine"), default="text")

    parser = argparse.ArgumentParser(prog="strel", description="Relative stable module categories over Z/p^n.")
    sub = parser.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("construct", parents=[common], help="build a module file")
    c.add_argument("kind", choices=CONSTRUCT_KINDS)
    c.add_argument("inputs", nargs="*")
    c.add_argument("--shape", help="comma separated exponents for induce")
    c.set_defaults(func=cmd_construct)

    o = sub.add_parser("op", parents=[common], help="run an operation on module files")
    o.add_argument("name", choices=OPS)
    o.add_argument("inputs", nargs="*")
    o.set_defaults(func=cmd_op)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    v.add_argument("--timings", action="store_true", help="include wall times (output no longer reproducible)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("support", parents=[common], help="support of a module file")
    s.add_argument("inputs", nargs=1)
    s.set_defaults(func=cmd_support)

    pr = sub.add_parser("primes", parents=[common], help="primes of the stable category (cyclic p-groups of order p)")
    pr.set_defaults(func=cmd_primes)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.group is not None and args.group.lstrip().startswith("{"):
        try:
            args.group = json.loads(args.group)
        except json.JSONDecodeError as e:
            print(f"error: bad group JSON: {e}", file=sys.stderr)
            return EXIT_PARSE
    try:
        return args.func(args)
    except (io.FormatError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONSTRAINT


if __name__ == "__main__":
    sys.exit(main())
