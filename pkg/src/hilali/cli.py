"""Command-line interface: hilali {validate,invariants,fibration-check,construct,bound,experiment}."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import report
from .algebra import ModelError, check_d_squared
from .asymptotics import (
    ExperimentConfig,
    TwoStageParams,
    case_bounds,
    run_experiment,
    two_stage_bound,
    threshold,
)
from .catalog import (
    CatalogEntry,
    CatalogFibration,
    degree_scale,
    cohomology_bound_and_fibration,
    lookup,
    random_two_stage,
)
from .dsl import format_model, parse_assignments, parse_model
from .elliptic import NotEllipticError, ellipticity_check, invariants
from .fibration import Decomposition, analyze_fibration, build_fibration, total_generators

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_model(ref: str, check: bool = True):
    """A catalog key (``catalog:cpn:3``) or a path to a model file."""
    if ref.startswith("catalog:"):
        item = lookup(ref)
        if isinstance(item, CatalogFibration):
            return item.fibration.total
        return item.model
    return parse_model(_read(ref), check=check)


def _emit(args, doc, text_fn):
    if args.json:
        print(report.dumps(doc))
    else:
        print(text_fn(doc))


def cmd_validate(args) -> int:
    model = load_model(args.model, check=False)
    sq = check_d_squared(model)
    doc = {"kind": "validation", "model": model.name, "d_squared_zero": sq.ok}
    if not sq.ok:
        doc["failing_generator"] = sq.generator
        doc["residue"] = str(sq.residue)
    else:
        ell = ellipticity_check(model, cap=args.cap)
        doc["ellipticity"] = ell.status
        doc["windows"] = [list(w) for w in ell.windows]
        doc["minimal"] = model.is_minimal()

    def text(d):
        lines = [f"model {d['model']}", f"  d^2 = 0: {d['d_squared_zero']}"]
        if not d["d_squared_zero"]:
            lines.append(f"  d^2 {d['failing_generator']} = {d['residue']}")
        else:
            lines.append(f"  minimal: {d['minimal']}")
            lines.append(f"  ellipticity: {d['ellipticity']}")
        return "\n".join(lines)

    _emit(args, doc, text)
    return EXIT_OK if sq.ok else EXIT_FAIL


def cmd_invariants(args) -> int:
    model = load_model(args.model)
    try:
        inv = invariants(model)
    except NotEllipticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(args, report.invariants_document(inv, model), report.invariants_text)
    return EXIT_OK


def _names(text):
    return tuple(x for x in (text or "").split(",") if x)


def cmd_fibration(args) -> int:
    if args.target:
        if args.base or args.fiber or args.perturbation:
            raise UsageError("give either a catalog fibration or --base/--fiber files, not both")
        item = lookup(args.target)
        if not isinstance(item, CatalogFibration):
            raise UsageError(f"{args.target} is not a catalog fibration")
        rep = analyze_fibration(item.fibration, item.fiber_dec, item.base_dec)
    else:
        if not (args.base and args.fiber):
            raise UsageError("fibration-check needs a catalog key or --base and --fiber")
        base = load_model(args.base)
        fiber = load_model(args.fiber)
        pert = {}
        if args.perturbation:
            gens = total_generators(base, fiber)
            pert = parse_assignments(_read(args.perturbation), gens)
        f = build_fibration(base, fiber, pert)
        fdec = bdec = None
        if args.fiber_t is not None and args.base_t is not None:
            ft, bt = _names(args.fiber_t), _names(args.base_t)
            fdec = Decomposition(ft, tuple(g.name for g in fiber.gens if g.name not in ft))
            bdec = Decomposition(bt, tuple(g.name for g in base.gens if g.name not in bt))
        rep = analyze_fibration(f, fdec, bdec)
    _emit(args, report.fibration_document(rep), report.fibration_text)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_construct(args) -> int:
    if args.random is not None:
        try:
            n, m, r = (int(x) for x in args.random.split(","))
        except ValueError:
            raise UsageError("--random expects n,m,r") from None
        model = random_two_stage(args.seed, n, m, r, pure=args.pure)
    else:
        if not args.key:
            raise UsageError("construct needs a catalog key or --random")
        item = lookup(args.key)
        if isinstance(item, CatalogFibration):
            f = item.fibration
            print("# base")
            print(format_model(f.base))
            print("# fiber")
            print(format_model(f.fiber))
            print("# total")
            print(format_model(f.total), end="")
            return EXIT_OK
        model = item.model if isinstance(item, CatalogEntry) else item
    if args.scale:
        model = degree_scale(model, args.scale)
    if args.cohomology_bound:
        res = cohomology_bound_and_fibration(model)
        print(f"# literal bound {res.literal_bound}, corrected bound {res.corrected_bound}, dim H {res.dim_H}")
        model = res.fibration.total
    print(format_model(model), end="")
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.threshold is not None:
        try:
            eps = Fraction(args.threshold)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad fraction {args.threshold!r}") from None
        if eps <= 0:
            raise UsageError("threshold must be positive")
        res = threshold(eps)
        doc = {
            "kind": "threshold",
            "epsilon": res.epsilon,
            "N": res.N,
            "witness": None if res.witness is None else [res.witness.n, res.witness.m, res.witness.r],
            "witness_bound": res.witness_bound,
            "verified_up_to": res.verified_up_to,
            "tail_from": res.tail_from,
        }

        def text(d):
            s = f"N = {d['N']} for epsilon = {report._fmt(d['epsilon'])}"
            if d["witness"] is not None:
                s += f"\nwitness (n, m, r) = {tuple(d['witness'])} at total {d['N'] - 1}, bound {report._fmt(d['witness_bound'])}"
            s += f"\nexhaustive up to total {d['verified_up_to']}, analytic tail from {d['tail_from']}"
            return s

        _emit(args, doc, text)
        return EXIT_OK
    if args.params is None:
        raise UsageError("bound needs n m r or --threshold")
    p = TwoStageParams(*args.params)
    c1, c2 = case_bounds(p)
    doc = {"kind": "bound", "n": p.n, "m": p.m, "r": p.r, "bound": two_stage_bound(p), "case1": c1, "case2": c2}
    _emit(args, doc, lambda d: "\n".join(f"{k} = {report._fmt(v)}" for k, v in d.items() if k != "kind"))
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig(samples=args.samples, seed=args.seed, pure=args.pure)
    res = run_experiment(cfg, args.csv)
    if args.csv is None:
        sys.stdout.write(res.csv_text())
    bad = [r for r in res.records if r.h > r.bound]
    for i, s, msg in res.failures:
        print(f"sample {i} (seed {s}) skipped: {msg}", file=sys.stderr)
    if bad:
        print(f"{len(bad)} samples exceed the bound", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hilali", description="Exact invariants of Sullivan models and fibration checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="emit a JSON report")

    p = sub.add_parser("validate", help="check d^2 = 0 and decide ellipticity")
    p.add_argument("model", help="model file or catalog:KEY")
    p.add_argument("--cap", type=_nonneg, default=None, help="largest degree examined")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("invariants", help="homotopy and cohomology invariants")
    p.add_argument("model")
    common(p)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("fibration-check", help="evaluate every fibration inequality")
    p.add_argument("target", nargs="?", help="catalog:KEY of a fibration")
    p.add_argument("--base")
    p.add_argument("--fiber")
    p.add_argument("--perturbation", help="file of 'd NAME = POLY' lines")
    p.add_argument("--fiber-t", help="comma list: odd-sphere part of the fiber")
    p.add_argument("--base-t", help="comma list: odd-sphere part of the base")
    common(p)
    p.set_defaults(func=cmd_fibration)

    p = sub.add_parser("construct", help="print a catalog or constructed model")
    p.add_argument("key", nargs="?")
    p.add_argument("--scale", type=_nonneg, default=0, help="degree scaling exponent i (3^i)")
    p.add_argument("--cohomology-bound", action="store_true", help="print the auxiliary total model of the cohomology bound")
    p.add_argument("--random", metavar="N,M,R")
    p.add_argument("--pure", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("bound", help="two-stage bound on h, or its threshold")
    p.add_argument("params", nargs="*", type=_nonneg, metavar="N M R")
    p.add_argument("--threshold", metavar="FRACTION")
    common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("experiment", help="random two-stage samples as CSV")
    p.add_argument("--samples", type=_nonneg, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--pure", action="store_true")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "command", None) == "bound":
        if args.params and len(args.params) != 3:
            ap.error("bound takes exactly three parameters n m r")
        args.params = args.params or None
    try:
        return args.func(args)
    except (UsageError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
