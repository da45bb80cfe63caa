"""Indexed containers and finitary functors on finite indexed sets.

A functor here is anything that can enumerate ``F X`` for a finite indexed
set ``X`` and push an indexed map through it.  Indexed containers provide one
family of instances; the finite powerset functors, which are not containers,
provide the others.
"""
from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import BaseMismatchError, ContainerError, WellFormednessError
from .finset import FinIndexedSet, IndexedMap, Label, render


@dataclass(frozen=True)
class IndexedContainer:
    """Shapes per index and, per ``(index, shape, target index)``, positions.

    Construction only normalizes the data; :func:`validate_container` checks
    the invariants.  Missing ``positions`` keys mean "no positions".
    """

    indices: tuple
    shapes: Mapping
    positions: Mapping
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        object.__setattr__(
            self, "shapes", {i: tuple(ss) for i, ss in self.shapes.items() if tuple(ss)}
        )
        object.__setattr__(
            self,
            "positions",
            {k: tuple(ps) for k, ps in self.positions.items() if tuple(ps)},
        )

    def shapes_at(self, i: Label) -> tuple:
        return self.shapes.get(i, ())

    def slots(self, i: Label, s: Label) -> tuple:
        """Positions of shape ``s`` at ``i`` as ``(j, p)`` in declared order."""
        return tuple(
            (j, p) for j in self.indices for p in self.positions.get((i, s, j), ())
        )

    def is_nullary(self, i: Label, s: Label) -> bool:
        return not self.slots(i, s)


def validate_container(c: IndexedContainer) -> None:
    """Raise :class:`ContainerError` naming the first violated invariant."""
    seen = set()
    for i in c.indices:
        if i in seen:
            raise ContainerError(f"indices: duplicate index {render(i)}")
        seen.add(i)
    for i, shapes in c.shapes.items():
        if i not in seen:
            raise ContainerError(f"shapes[{render(i)}]: unknown index {render(i)}")
        if len(set(shapes)) != len(shapes):
            dup = next(s for s in shapes if shapes.count(s) > 1)
            raise ContainerError(f"shapes[{render(i)}]: duplicate shape {render(dup)}")
    for (i, s, j), ps in c.positions.items():
        path = f"positions[{render(i)}, {render(s)}, {render(j)}]"
        if i not in seen:
            raise ContainerError(f"{path}: unknown index {render(i)}")
        if s not in c.shapes_at(i):
            raise ContainerError(f"{path}: unknown shape {render(s)} at index {render(i)}")
        if j not in seen:
            raise ContainerError(f"{path}: unknown index {render(j)}")
        if len(set(ps)) != len(ps):
            dup = next(p for p in ps if ps.count(p) > 1)
            raise ContainerError(f"{path}: duplicate position {render(dup)}")


@dataclass(frozen=True)
class ExtensionElement:
    """An element ``(s, f)`` of ``[S,P] X i``.

    ``args`` lists ``((j, p), x)`` in the container's declared position order.
    """

    index: Label
    shape: Label
    args: tuple = ()

    def arg(self, j: Label, p: Label) -> Label:
        for key, x in self.args:
            if key == (j, p):
                return x
        raise KeyError((j, p))

    def values(self) -> tuple:
        return tuple(x for _, x in self.args)

    def render(self) -> str:
        if not self.args:
            return render(self.shape)
        return f"{render(self.shape)}({', '.join(render(x) for x in self.values())})"


def extension(c: IndexedContainer, X: FinIndexedSet) -> FinIndexedSet:
    """Enumerate ``[S,P] X``: shapes in order, then assignments lexicographically."""
    if X.indices != c.indices:
        raise BaseMismatchError("indexed set and container have different index sets")
    fibres = []
    for i in c.indices:
        elems = []
        for s in c.shapes_at(i):
            slots = c.slots(i, s)
            for choice in itertools.product(*(X[j] for j, _ in slots)):
                elems.append(ExtensionElement(i, s, tuple(zip(slots, choice))))
        fibres.append(tuple(elems))
    return FinIndexedSet(c.indices, tuple(fibres))


def extension_map(c: IndexedContainer, g: IndexedMap) -> IndexedMap:
    """``(s, f) |-> (s, g . f)``."""
    source = extension(c, g.source)
    target = extension(c, g.target)
    return IndexedMap(
        source, target, {(i, u): _map_ext(g, u) for i, u in source.items()}
    )


def _map_ext(g: IndexedMap, u: ExtensionElement) -> ExtensionElement:
    return ExtensionElement(u.index, u.shape, tuple((jp, g(jp[0], x)) for jp, x in u.args))


class FinitaryFunctor(ABC):
    """A functor on finite indexed sets, given by its action on elements."""

    name = "functor"

    def __init__(self):
        self._obj_cache = {}

    def apply_obj(self, X: FinIndexedSet) -> FinIndexedSet:
        cached = self._obj_cache.get(X)
        if cached is None:
            cached = self._obj_cache[X] = self._enumerate(X)
        return cached

    def apply_map(self, f: IndexedMap) -> IndexedMap:
        FX = self.apply_obj(f.source)
        FY = self.apply_obj(f.target)
        return IndexedMap(FX, FY, {(i, u): self.map_element(f, i, u) for i, u in FX.items()})

    @abstractmethod
    def _enumerate(self, X: FinIndexedSet) -> FinIndexedSet: ...

    @abstractmethod
    def map_element(self, f: IndexedMap, i: Label, u) -> object:
        """Image of a single element ``u`` of ``F X`` at ``i`` under ``F f``."""

    @abstractmethod
    def contains(self, X: FinIndexedSet, i: Label, u) -> bool:
        """Whether ``u`` is an element of ``F X`` at ``i`` (without enumerating)."""

    @abstractmethod
    def successors(self, u) -> Iterator[tuple]:
        """Yield ``(edge label, index, element)`` for each element of ``X`` in ``u``."""

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class ContainerFunctor(FinitaryFunctor):
    def __init__(self, container: IndexedContainer):
        super().__init__()
        self.container = container
        self.name = container.name or "container"

    def _enumerate(self, X):
        return extension(self.container, X)

    def map_element(self, f, i, u):
        return _map_ext(f, u)

    def contains(self, X, i, u):
        c = self.container
        if not isinstance(u, ExtensionElement) or u.index != i:
            return False
        if u.shape not in c.shapes_at(i):
            return False
        if tuple(jp for jp, _ in u.args) != c.slots(i, u.shape):
            return False
        return all(X.contains(j, x) for (j, _), x in u.args)

    def successors(self, u):
        for (j, p), x in u.args:
            yield f"{render(u.shape)}.{render(p)}", j, x

    def __eq__(self, other):
        return isinstance(other, ContainerFunctor) and other.container == self.container

    def __hash__(self):
        return hash(tuple(self.container.indices))


def as_functor(c: IndexedContainer) -> ContainerFunctor:
    validate_container(c)
    return ContainerFunctor(c)


def _require_single(X: FinIndexedSet, name: str):
    if not X.is_single_index:
        raise WellFormednessError(f"{name} is only defined over a single-index base")


def _subsets(items: tuple) -> Iterator[frozenset]:
    for k in range(len(items) + 1):
        for combo in itertools.combinations(items, k):
            yield frozenset(combo)


class PfinFunctor(FinitaryFunctor):
    """Finite powerset; ``F f`` takes direct images."""

    name = "pfin"

    def _enumerate(self, X):
        _require_single(X, "Pfin")
        return FinIndexedSet(X.indices, (tuple(_subsets(X.fibres[0])),))

    def map_element(self, f, i, u):
        return frozenset(f(i, x) for x in u)

    def contains(self, X, i, u):
        return isinstance(u, frozenset) and all(X.contains(i, x) for x in u)

    def successors(self, u):
        for x in u:
            yield "", None, x

    def __eq__(self, other):
        return type(other) is PfinFunctor

    def __hash__(self):
        return hash(self.name)


class PfinProdFunctor(FinitaryFunctor):
    """``Pfin(A x -)``: finitely branching transition structure labelled by ``A``."""

    def __init__(self, labels: Iterable[Label]):
        super().__init__()
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise WellFormednessError("duplicate action label")
        self.name = "lts:" + ",".join(render(a) for a in self.labels)

    def _enumerate(self, X):
        _require_single(X, "Pfin(A x -)")
        pairs = tuple((a, x) for a in self.labels for x in X.fibres[0])
        return FinIndexedSet(X.indices, (tuple(_subsets(pairs)),))

    def map_element(self, f, i, u):
        return frozenset((a, f(i, x)) for a, x in u)

    def contains(self, X, i, u):
        return isinstance(u, frozenset) and all(
            isinstance(ax, tuple) and len(ax) == 2 and ax[0] in self.labels
            and X.contains(i, ax[1])
            for ax in u
        )

    def successors(self, u):
        for a, x in u:
            yield render(a), None, x

    def __eq__(self, other):
        return isinstance(other, PfinProdFunctor) and other.labels == self.labels

    def __hash__(self):
        return hash(self.labels)


def pfin_functor() -> PfinFunctor:
    return PfinFunctor()


def pfin_prod_functor(labels: Iterable[Label]) -> PfinProdFunctor:
    return PfinProdFunctor(labels)
