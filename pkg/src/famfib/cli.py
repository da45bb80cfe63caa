"""Command-line driver.

Exit codes: 0 success (or the check holds), 1 the check failed and the
counterexamples were printed, 2 bad input or usage.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
from pathlib import Path

from . import coinductive, inductive
from .errors import FamfibError, SpecError
from .finset import render
from .textformat import (
    SpecDocument,
    dump,
    label,
    load,
    resolve_container,
    resolve_functor,
    serialize,
)

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(path, kind):
    doc = load(path)
    if doc.kind != kind:
        raise InputError(f"{path}: expected a {kind} document, got {doc.kind}")
    return doc


def _same_container(c, other, what):
    if c != other:
        raise InputError(f"{what} is written for a different container")


def cmd_validate(args):
    try:
        doc = load(args.spec)
    except SpecError as exc:
        if exc.category == "io":
            raise
        print(f"{args.spec}:{exc}")
        return EXIT_FALSE
    print(f"ok: {doc.kind} document, version {doc.version}")
    return EXIT_OK


def cmd_enum(args):
    c = resolve_container(args.container, Path.cwd())
    trees = inductive.enumerate_trees(c, args.depth)
    for i in c.indices:
        print(f"{label(i)}: {len(trees[i])} trees")
        for t in trees[i]:
            print(f"  {t.render()}")
    return EXIT_OK


def cmd_fold(args):
    c = resolve_container(args.container, Path.cwd())
    h = _load(args.algebra, "algebra")
    t = _load(args.tree, "tree")
    _same_container(c, resolve_container(h.ref, Path(args.algebra).parent), "algebra")
    _same_container(c, resolve_container(t.ref, Path(args.tree).parent), "tree")
    print(label(inductive.fold(c, h.value, t.value)))
    return EXIT_OK


def cmd_lift_pred(args):
    F = resolve_functor(args.functor, Path.cwd())
    P = _load(args.pred, "predicate").value
    print(serialize(SpecDocument("predicate", inductive.lift_predicate_generic(F, P))), end="")
    return EXIT_OK


def cmd_lift_rel(args):
    F = resolve_functor(args.functor, Path.cwd())
    R = _load(args.rel, "relation").value
    print(serialize(SpecDocument("relation", coinductive.lift_relation_generic(F, R))), end="")
    return EXIT_OK


def cmd_quotient(args):
    R = _load(args.rel, "relation").value
    part, rho = coinductive.quotient(R)
    data = {
        "classes": {label(i): [[label(x) for x in b] for b in part.classes[i]]
                    for i in R.base.indices},
        "projection": {label(i): {label(x): label(rho(i, x)) for x in R.base[i]}
                       for i in R.base.indices},
    }
    print(dump(data), end="")
    return EXIT_OK


def cmd_coind_check(args):
    k = _load(args.coalgebra, "coalgebra").value
    R = _load(args.rel, "relation").value
    if R.base != k.carrier:
        raise InputError("the relation is not over the coalgebra's carrier")
    report = coinductive.check_coinduction_premise(k, R)
    if report.passed:
        print(f"premise holds: {report.checked} related pairs checked")
        return EXIT_OK
    _, rho = coinductive.quotient(R)
    print(f"premise fails: {len(report.violations)} of {report.checked} related pairs")
    for i, x, y in report.violations:
        fx = k.functor.map_element(rho, i, k(i, x))
        fy = k.functor.map_element(rho, i, k(i, y))
        print(f"  {label(i)}: {label(x)} ~ {label(y)}: {render(fx)} != {render(fy)}")
    return EXIT_FALSE


def to_dot(k: coinductive.FiniteCoalgebra, part: coinductive.EquivPartition) -> str:
    """Graph of a minimized coalgebra: one node per class, edges from the structure map."""
    multi = not k.carrier.is_single_index

    def node_id(i, x):
        return json.dumps(render((i, x)) if multi else render(x), ensure_ascii=False)

    lines = ["digraph minimized {"]
    for i in k.carrier.indices:
        for block in part.classes[i]:
            members = ", ".join(render(x) for x in block)
            lines.append(f"  {node_id(i, block[0])} [label={json.dumps(members, ensure_ascii=False)}];")
    for i, x in k.carrier.items():
        edges = []
        for lab, j, y in k.functor.successors(k(i, x)):
            j = i if j is None else j
            edges.append((lab, k.carrier.indices.index(j), k.carrier.position(j, y), j, y))
        for lab, _, _, j, y in sorted(set(edges)):
            attr = f" [label={json.dumps(lab, ensure_ascii=False)}]" if lab else ""
            lines.append(f"  {node_id(i, x)} -> {node_id(j, y)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_minimize(args):
    doc = _load(args.coalgebra, "coalgebra")
    small, rho = coinductive.minimize(doc.value)
    print(serialize(SpecDocument("coalgebra", small, doc.ref)), end="")
    if args.dot:
        part = coinductive.largest_bisimulation(doc.value)
        dot = to_dot(small, part)
        if args.dot == "-":
            print(dot, end="")
        else:
            Path(args.dot).write_text(dot, encoding="utf-8")
    return EXIT_OK


def cmd_induct_check(args):
    c = resolve_container(args.container, Path.cwd())
    P = _load(args.pred, "predicate").value
    report = inductive.check_induction_soundness(
        c, lambda t: P.base.contains(t.index, t.render()) and P.holds(t.index, t.render()),
        args.depth,
    )
    print(f"trees checked: {report.trees_checked} (depth <= {args.depth})")
    if not report.premise_holds:
        print(f"premise fails at {len(report.premise_counterexamples)} nodes:")
        for t in report.premise_counterexamples:
            print(f"  {label(t.index)}: {t.render()}")
        return EXIT_FALSE
    if not report.conclusion_holds:
        print("UNSOUND: premise holds but the conclusion fails at:")
        for t in report.conclusion_counterexamples:
            print(f"  {label(t.index)}: {t.render()}")
        return EXIT_FALSE
    print("premise holds; predicate holds for every tree")
    return EXIT_OK


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="famfib", description="Induction and coinduction checks on finite indexed data."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a spec document")
    p.add_argument("spec")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("enum", help="list all trees up to a depth")
    p.add_argument("--container", required=True)
    p.add_argument("--depth", required=True, type=_positive)
    p.set_defaults(func=cmd_enum)

    p = sub.add_parser("fold", help="fold an algebra over a tree")
    p.add_argument("--container", required=True)
    p.add_argument("--algebra", required=True)
    p.add_argument("--tree", required=True)
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("lift-pred", help="lift a predicate through a functor")
    p.add_argument("--functor", required=True)
    p.add_argument("--pred", required=True)
    p.set_defaults(func=cmd_lift_pred)

    p = sub.add_parser("lift-rel", help="lift a relation through a functor")
    p.add_argument("--functor", required=True)
    p.add_argument("--rel", required=True)
    p.set_defaults(func=cmd_lift_rel)

    p = sub.add_parser("quotient", help="quotient by the generated equivalence")
    p.add_argument("--rel", required=True)
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("coind-check", help="check the coinduction premise for a relation")
    p.add_argument("--coalgebra", required=True)
    p.add_argument("--rel", required=True)
    p.set_defaults(func=cmd_coind_check)

    p = sub.add_parser("minimize", help="quotient a coalgebra by its largest bisimulation")
    p.add_argument("--coalgebra", required=True)
    p.add_argument("--dot", metavar="FILE", help="also write a DOT graph ('-' for stdout)")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("induct-check", help="check the induction rule on enumerated trees")
    p.add_argument("--container", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--depth", required=True, type=_positive)
    p.set_defaults(func=cmd_induct_check)
    return parser


def run(argv, out=None, err=None) -> int:
    """Run one command, writing to ``out``/``err`` (default: the real streams)."""
    out = out or sys.stdout
    err = err or sys.stderr
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:
            return EXIT_INPUT if exc.code else EXIT_OK
        try:
            return args.func(args)
        except (InputError, FamfibError) as exc:
            print(f"error: {exc}", file=err)
            return EXIT_INPUT


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
