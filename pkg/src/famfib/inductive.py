"""Well-founded trees of an indexed container, fold, and induction.

Trees are finite by construction; the initial algebra is only ever observed
through explicit trees and depth-bounded enumeration.  Depth counts nodes on
the longest root-to-leaf path, so a lone leaf has depth 1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping, Sequence, Union

from .container import ExtensionElement, FinitaryFunctor, IndexedContainer, extension
from .errors import BaseMismatchError, FoldError, InductionError, WellFormednessError
from .finset import FinIndexedSet, Label, Predicate, comprehension, render


@dataclass(frozen=True)
class WTree:
    index: Label
    shape: Label
    children: tuple = ()

    @cached_property
    def depth(self) -> int:
        return 1 + max((t.depth for _, t in self.children), default=0)

    @cached_property
    def size(self) -> int:
        return 1 + sum(t.size for _, t in self.children)

    def child(self, j: Label, p: Label) -> "WTree":
        for key, t in self.children:
            if key == (j, p):
                return t
        raise KeyError((j, p))

    def subtrees(self) -> tuple:
        return tuple(t for _, t in self.children)

    def render(self) -> str:
        if not self.children:
            return render(self.shape)
        return f"{render(self.shape)}({', '.join(t.render() for t in self.subtrees())})"

    def __repr__(self):
        return f"WTree<{render(self.index)}: {self.render()}>"


def in_tree(c: IndexedContainer, i: Label, s: Label,
            children: Union[Mapping, Sequence] = ()) -> WTree:
    """Assemble a node.  ``children`` is keyed by ``(j, p)`` or given in slot order."""
    if s not in c.shapes_at(i):
        raise WellFormednessError(f"shape {render(s)} is not a shape at index {render(i)}")
    slots = c.slots(i, s)
    if isinstance(children, Mapping):
        extra = set(children) - set(slots)
        if extra:
            j, p = next(iter(extra))
            raise WellFormednessError(f"{render(s)}: unknown position {render(p)}@{render(j)}")
        missing = [jp for jp in slots if jp not in children]
        if missing:
            j, p = missing[0]
            raise WellFormednessError(f"{render(s)}: missing child at position {render(p)}@{render(j)}")
        kids = tuple((jp, children[jp]) for jp in slots)
    else:
        children = tuple(children)
        if len(children) != len(slots):
            raise WellFormednessError(
                f"{render(s)} at index {render(i)} takes {len(slots)} children, got {len(children)}"
            )
        kids = tuple(zip(slots, children))
    for (j, p), t in kids:
        if not isinstance(t, WTree) or t.index != j:
            got = render(t.index) if isinstance(t, WTree) else repr(t)
            raise WellFormednessError(
                f"{render(s)}: position {render(p)}@{render(j)} needs a tree at index "
                f"{render(j)}, got {got}"
            )
    return WTree(i, s, kids)


def in_ext(u: ExtensionElement) -> WTree:
    """The initial algebra map on an extension element whose arguments are trees."""
    return WTree(u.index, u.shape, u.args)


def out(t: WTree) -> ExtensionElement:
    return ExtensionElement(t.index, t.shape, t.children)


@dataclass(frozen=True)
class AlgebraTable:
    """An algebra ``[S,P] A ->_I A`` given by a table on extension elements."""

    carrier: FinIndexedSet
    table: Mapping

    def __call__(self, u: ExtensionElement):
        try:
            return self.table[u]
        except KeyError:
            raise FoldError(f"algebra has no entry for {u.render()} at index {render(u.index)}") from None

    def check_total(self, c: IndexedContainer) -> None:
        for i, u in extension(c, self.carrier).items():
            a = self(u)
            if not self.carrier.contains(i, a):
                raise WellFormednessError(
                    f"algebra sends {u.render()} to {render(a)}, not an element at index {render(i)}"
                )

    @classmethod
    def from_function(cls, c, carrier, fn: Callable[[ExtensionElement], Label]) -> "AlgebraTable":
        return cls(carrier, {u: fn(u) for _, u in extension(c, carrier).items()})


def fold(c: IndexedContainer, h, t: WTree):
    """Structural recursion: ``fold h (in (s, f)) = h (s, fold h . f)``.

    ``h`` is an :class:`AlgebraTable` or any callable on extension elements.
    """
    memo = {}

    def go(node):
        if node in memo:
            return memo[node]
        args = tuple((jp, go(child)) for jp, child in node.children)
        value = memo[node] = h(ExtensionElement(node.index, node.shape, args))
        return value

    return go(t)


def enumerate_trees(c: IndexedContainer, depth: int) -> dict:
    """All trees of depth at most ``depth``, per index.

    Trees are ordered by depth, then shape order, then the lexicographic order
    of their children in the enumeration itself.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    trees = {i: [] for i in c.indices}
    for level in range(1, depth + 1):
        fresh = {i: [] for i in c.indices}
        for i in c.indices:
            for s in c.shapes_at(i):
                slots = c.slots(i, s)
                pools = [trees[j] for j, _ in slots]
                for kids in itertools.product(*pools):
                    if max((k.depth for k in kids), default=0) != level - 1:
                        continue
                    fresh[i].append(WTree(i, s, tuple(zip(slots, kids))))
        for i in c.indices:
            trees[i].extend(fresh[i])
    return trees


def trees_as_set(trees: Mapping) -> FinIndexedSet:
    return FinIndexedSet.from_dict(trees)


def lift_predicate_container(c: IndexedContainer, Q: Predicate) -> Predicate:
    """Per-position choice of ``Q`` witnesses.

    A witness at ``(s, f)`` is a tuple ``((j, p), w)`` with ``w`` a witness of
    ``Q`` at ``f j p``, one entry per position.
    """
    ext = extension(c, Q.base)
    lifted = {}
    for i, u in ext.items():
        choices = [Q[(j, x)] for (j, _), x in u.args]
        lifted[(i, u)] = tuple(
            tuple(zip((jp for jp, _ in u.args), picked))
            for picked in itertools.product(*choices)
        )
    return Predicate(ext, lifted)


def lift_predicate_generic(F: FinitaryFunctor, Q: Predicate) -> Predicate:
    """Witnesses at ``u`` in ``F X`` are the elements of ``F {Q}`` lying over ``u``."""
    total, pi = comprehension(Q)
    FX = F.apply_obj(Q.base)
    Fpi = F.apply_map(pi)
    if Fpi.target != FX:
        raise BaseMismatchError("functor image of the projection has the wrong codomain")
    fibres = {key: [] for key in FX.items()}
    for i, v in Fpi.source.items():
        fibres[(i, Fpi(i, v))].append(v)
    return Predicate(FX, {k: tuple(v) for k, v in fibres.items()})


def container_witness(v: ExtensionElement) -> tuple:
    """Map a generic-lifting witness to the matching container-lifting witness."""
    return tuple((jp, xw[1]) for jp, xw in v.args)


class StepFunction:
    """Premises of the induction rule as an algebra for the lifted functor.

    A step receives an :class:`ExtensionElement` whose arguments are pairs
    ``(child value, child witness)`` and returns the witness for the node.
    The child value is the subtree itself, or its fold when inducting above
    an algebra.
    """

    def __init__(self, rule: Callable[[ExtensionElement], object], table: Mapping | None = None):
        self._rule = rule
        self.table = table

    @classmethod
    def from_table(cls, table: Mapping) -> "StepFunction":
        table = dict(table)

        def lookup(node):
            return table[node]

        return cls(lookup, table)

    @classmethod
    def constant(cls, witness) -> "StepFunction":
        return cls(lambda node: witness)

    def __call__(self, node: ExtensionElement):
        return self._rule(node)


def _path_text(path) -> str:
    return "/".join(["root", *(f"{render(s)}.{render(p)}" for s, p in path)]) or "root"


def induce(c: IndexedContainer, step: StepFunction, t: WTree,
           pred: Predicate | None = None, algebra=None):
    """Run the induction rule on one tree and return its witness.

    With ``pred`` given, each produced witness is checked to lie in ``pred`` at
    the node, or at ``fold algebra node`` when ``algebra`` is given.
    """
    memo = {}

    def go(node, path):
        if node in memo:
            return memo[node]
        values, witnesses = [], []
        for (j, p), child in node.children:
            v, w = go(child, path + ((node.shape, p),))
            values.append(v)
            witnesses.append(w)
        slots = tuple(jp for jp, _ in node.children)
        value = node if algebra is None else algebra(
            ExtensionElement(node.index, node.shape, tuple(zip(slots, values)))
        )
        arg = ExtensionElement(node.index, node.shape, tuple(zip(slots, zip(values, witnesses))))
        try:
            w = step(arg)
        except KeyError:
            raise InductionError(
                f"no step entry at {_path_text(path)} ({node.render()})"
            ) from None
        if pred is not None:
            if not pred.base.contains(node.index, value):
                raise InductionError(
                    f"{_path_text(path)}: {render(value)} is outside the predicate's base"
                )
            if w not in pred[(node.index, value)]:
                raise InductionError(
                    f"{_path_text(path)}: step produced {render(w)}, not a witness at {render(value)}"
                )
        memo[node] = (value, w)
        return value, w

    return go(t, ())[1]


@dataclass(frozen=True)
class Premise:
    """One premise of the induction rule: shape ``shape`` at ``index``.

    ``hypotheses`` lists the ``(j, p)`` positions whose subterms are assumed
    to satisfy the predicate.
    """

    index: Label
    shape: Label
    hypotheses: tuple


def induction_premises(c: IndexedContainer) -> tuple:
    return tuple(
        Premise(i, s, c.slots(i, s)) for i in c.indices for s in c.shapes_at(i)
    )


def render_rule(c: IndexedContainer, pred_names: Mapping, sort_names: Mapping,
                var: str = "n") -> list:
    """Text of the induction rule, one premise per line, conclusion last."""
    lines = []
    for prem in induction_premises(c):
        goal = pred_names[prem.index]
        if not prem.hypotheses:
            lines.append(f"{goal}({render(prem.shape)}) →")
            continue
        binders = " ".join(f"Π {render(p)} : {sort_names[j]}." for j, p in prem.hypotheses)
        assumptions = " → ".join(f"{pred_names[j]}({render(p)})" for j, p in prem.hypotheses)
        term = " ".join([render(prem.shape), *(render(p) for _, p in prem.hypotheses)])
        lines.append(f"({binders} {assumptions} → {goal}({term})) →")
    lines.append(" × ".join(
        f"(Π {var} : {sort_names[i]}. {pred_names[i]}({var}))" for i in c.indices
    ))
    return lines


@dataclass(frozen=True)
class InductionReport:
    depth: int
    trees_checked: int
    premise_counterexamples: tuple = ()
    conclusion_counterexamples: tuple = ()

    @property
    def premise_holds(self) -> bool:
        return not self.premise_counterexamples

    @property
    def conclusion_holds(self) -> bool:
        return not self.conclusion_counterexamples

    @property
    def sound(self) -> bool:
        """False only if the premise held everywhere but some tree escaped."""
        return not self.premise_holds or self.conclusion_holds


def check_induction_soundness(c: IndexedContainer, q, depth: int) -> InductionReport:
    """Check the induction rule pointwise on all trees up to ``depth``.

    ``q`` decides membership: a callable on trees, or a :class:`Predicate`
    whose base contains trees (trees outside the base count as not holding).
    """
    if isinstance(q, Predicate):
        P = q

        def q(t):
            return P.base.contains(t.index, t) and P.holds(t.index, t)

    trees = enumerate_trees(c, depth)
    holds = {t: bool(q(t)) for i in c.indices for t in trees[i]}
    premise_bad, conclusion_bad = [], []
    for i in c.indices:
        for t in trees[i]:
            if not holds[t]:
                conclusion_bad.append(t)
                if all(holds[k] for k in t.subtrees()):
                    premise_bad.append(t)
    return InductionReport(depth, len(holds), tuple(premise_bad), tuple(conclusion_bad))
