"""Relations over indexed sets, quotients, relational liftings and bisimulation.

Relations only ever relate elements at the same index.  They carry witness
tuples like predicates do, but every coinductive operation here looks only at
whether a pair has a witness; lifted relations carry the unit witness.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from scipy.cluster.hierarchy import DisjointSet

from .container import (
    FinitaryFunctor,
    IndexedContainer,
    PfinFunctor,
    extension,
)
from .errors import BaseMismatchError, FamfibError, WellFormednessError
from .finset import STAR, FinIndexedSet, IndexedMap, Label, render


@dataclass(frozen=True)
class Relation:
    """Witness tuples for same-index pairs ``(i, x, y)``; absent pairs are unrelated."""

    base: FinIndexedSet
    pairs: Mapping

    def __post_init__(self):
        pairs = {}
        for key, ws in self.pairs.items():
            if not (isinstance(key, tuple) and len(key) == 3):
                raise WellFormednessError(f"relation keys are (index, left, right), got {key!r}")
            i, x, y = key
            for z in (x, y):
                if not self.base.contains(i, z):
                    raise WellFormednessError(
                        f"relation mentions {render(z)}, not an element at index {render(i)}"
                    )
            ws = tuple(ws)
            if len(set(ws)) != len(ws):
                raise WellFormednessError(f"duplicate witness for {render(x)} ~ {render(y)}")
            if ws:
                pairs[key] = ws
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_pairs(cls, base: FinIndexedSet, pairs: Iterable[tuple]) -> "Relation":
        return cls(base, {key: (STAR,) for key in pairs})

    def related(self, i: Label, x: Label, y: Label) -> bool:
        return (i, x, y) in self.pairs

    def __getitem__(self, key: tuple) -> tuple:
        return self.pairs.get(key, ())

    def related_pairs(self) -> list:
        """Related pairs in canonical order (index, then left, then right)."""
        order = {}
        for k, i in enumerate(self.base.indices):
            for n, x in enumerate(self.base[i]):
                order[(i, x)] = (k, n)
        return sorted(
            self.pairs, key=lambda p: (order[(p[0], p[1])], order[(p[0], p[2])])
        )

    def support(self) -> frozenset:
        return frozenset(self.pairs)

    def issubset(self, other: "Relation") -> bool:
        return self.support() <= other.support()

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class EquivPartition:
    """A per-index partition; each class is listed in base order and the
    classes are ordered by their least element."""

    base: FinIndexedSet
    classes: Mapping
    _rep: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rep = {}
        classes = {}
        for i in self.base.indices:
            pos = {x: n for n, x in enumerate(self.base[i])}
            blocks = []
            for block in self.classes.get(i, ()):
                block = tuple(sorted(block, key=lambda x: pos[x]))
                if not block:
                    raise WellFormednessError("empty class in partition")
                blocks.append(block)
            blocks.sort(key=lambda b: pos[b[0]])
            for block in blocks:
                for x in block:
                    if (i, x) in rep:
                        raise WellFormednessError(f"{render(x)} lies in two classes")
                    rep[(i, x)] = block[0]
            if sum(map(len, blocks)) != len(pos):
                raise WellFormednessError(f"partition does not cover index {render(i)}")
            classes[i] = tuple(blocks)
        if set(self.classes) - set(self.base.indices):
            raise WellFormednessError("partition mentions an unknown index")
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "_rep", rep)

    @classmethod
    def by_key(cls, base: FinIndexedSet, key: Callable[[Label, Label], object]) -> "EquivPartition":
        classes = {}
        for i in base.indices:
            groups = {}
            for x in base[i]:
                groups.setdefault(key(i, x), []).append(x)
            classes[i] = list(groups.values())
        return cls(base, classes)

    def representative(self, i: Label, x: Label) -> Label:
        return self._rep[(i, x)]

    def same_class(self, i: Label, x: Label, y: Label) -> bool:
        return self._rep[(i, x)] == self._rep[(i, y)]

    def class_count(self) -> int:
        return sum(len(b) for b in self.classes.values())

    def is_discrete(self) -> bool:
        return self.class_count() == len(self.base)

    def quotient_set(self) -> FinIndexedSet:
        return FinIndexedSet(
            self.base.indices,
            tuple(tuple(b[0] for b in self.classes[i]) for i in self.base.indices),
        )

    def projection(self) -> IndexedMap:
        return IndexedMap(self.base, self.quotient_set(), dict(self._rep))

    def as_relation(self) -> Relation:
        return Relation.from_pairs(self.base, (
            (i, x, y) for i in self.base.indices
            for block in self.classes[i] for x in block for y in block
        ))


def eq_relation(X: FinIndexedSet) -> Relation:
    return Relation(X, {(i, x, x): (STAR,) for i, x in X.items()})


def equiv_closure(R: Relation) -> EquivPartition:
    """Least equivalence relation containing the related pairs of ``R``, per index."""
    ds = DisjointSet(list(R.base.items()))
    for i, x, y in R.pairs:
        ds.merge((i, x), (i, y))
    return EquivPartition.by_key(R.base, lambda i, x: ds[(i, x)])


def quotient(R: Relation) -> tuple:
    """Return the closure partition and the quotient map onto class representatives."""
    part = equiv_closure(R)
    return part, part.projection()


def kernel_of_map(f: IndexedMap) -> Relation:
    groups = {}
    for i, x in f.source.items():
        groups.setdefault((i, f(i, x)), []).append(x)
    return Relation(f.source, {
        (i, x, y): (STAR,)
        for (i, _), block in groups.items() for x in block for y in block
    })


def _check_base(R: Relation, X: FinIndexedSet):
    if R.base != X:
        raise BaseMismatchError("relation is over a different indexed set")


def lift_relation_generic(F: FinitaryFunctor, R: Relation) -> Relation:
    """Kernel of ``F rho_R``: ``u`` and ``v`` are related iff ``F rho_R`` identifies them."""
    _, rho = quotient(R)
    return kernel_of_map(F.apply_map(rho))


def lift_relation_container(c: IndexedContainer, R: Relation) -> Relation:
    """Same shape, and closure-related arguments position by position."""
    part = equiv_closure(R)
    ext = extension(c, R.base)
    pairs = {}
    for i in ext.indices:
        for u in ext[i]:
            for v in ext[i]:
                if u.shape == v.shape and all(
                    part.same_class(j, x, y)
                    for ((j, _), x), (_, y) in zip(u.args, v.args)
                ):
                    pairs[(i, u, v)] = (STAR,)
    return Relation(ext, pairs)


def lift_relation_pfin(R: Relation) -> Relation:
    """Mutual covering of finite subsets up to the closure of ``R``."""
    if not R.base.is_single_index:
        raise WellFormednessError("the powerset lifting needs a single-index base")
    part = equiv_closure(R)
    FX = PfinFunctor().apply_obj(R.base)
    (i,) = FX.indices

    def covered(xs, ys):
        return all(any(part.same_class(i, x, y) for y in ys) for x in xs)

    return Relation(FX, {
        (i, u, v): (STAR,)
        for u in FX[i] for v in FX[i]
        if covered(u, v) and covered(v, u)
    })


@dataclass(frozen=True)
class FiniteCoalgebra:
    """A structure map ``carrier ->_I F carrier`` given as a table keyed by ``(i, x)``."""

    functor: FinitaryFunctor
    carrier: FinIndexedSet
    structure: Mapping

    def __post_init__(self):
        structure = dict(self.structure)
        for i, x in self.carrier.items():
            if (i, x) not in structure:
                raise WellFormednessError(f"structure map undefined at {render(x)}")
            if not self.functor.contains(self.carrier, i, structure[(i, x)]):
                raise WellFormednessError(
                    f"structure map sends {render(x)} outside {self.functor.name} of the carrier"
                )
        if len(structure) != len(self.carrier):
            raise WellFormednessError("structure map has entries outside the carrier")
        object.__setattr__(self, "structure", structure)

    def __call__(self, i: Label, x: Label):
        return self.structure[(i, x)]


@dataclass(frozen=True)
class CoinductionReport:
    checked: int
    violations: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.violations


def check_coinduction_premise(k: FiniteCoalgebra, R: Relation) -> CoinductionReport:
    """Every ``R``-related pair must have successors related by the lifted relation."""
    _check_base(R, k.carrier)
    _, rho = quotient(R)
    F = k.functor
    bad = []
    pairs = R.related_pairs()
    for i, x, y in pairs:
        if F.map_element(rho, i, k(i, x)) != F.map_element(rho, i, k(i, y)):
            bad.append((i, x, y))
    return CoinductionReport(len(pairs), tuple(bad))


def largest_bisimulation(k: FiniteCoalgebra) -> EquivPartition:
    """Greatest fixpoint of ``R |-> R ∩ (k x k)^-1 (lift R)`` from the total relation.

    Every iterate is an equivalence, so the refinement step splits each class
    by the image of the structure map under ``F rho``.
    """
    F = k.functor
    part = EquivPartition(k.carrier, {i: [k.carrier[i]] for i in k.carrier.indices
                                      if k.carrier[i]})
    while True:
        rho = part.projection()
        refined = EquivPartition.by_key(
            k.carrier,
            lambda i, x: (part.representative(i, x), F.map_element(rho, i, k(i, x))),
        )
        if refined.class_count() == part.class_count():
            return part
        part = refined


def minimize(k: FiniteCoalgebra) -> tuple:
    """Quotient ``k`` by its largest bisimulation.

    Returns the minimized coalgebra, whose states are class representatives,
    and the projection from the original carrier.
    """
    part = largest_bisimulation(k)
    rho = part.projection()
    structure = {}
    for i, x in k.carrier.items():
        image = k.functor.map_element(rho, i, k(i, x))
        key = (i, rho(i, x))
        if structure.setdefault(key, image) != image:
            raise FamfibError(f"internal error: class of {render(x)} is not stable")
    return FiniteCoalgebra(k.functor, rho.target, structure), rho
