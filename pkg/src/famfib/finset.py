"""Finite indexed sets and predicates over them (the families fibration).

An indexed set assigns to every index label an ordered, duplicate-free tuple
of element labels.  Predicates are proof relevant: every element carries a
finite ordered tuple of witnesses, and "holds" means "has a witness".

Element labels are arbitrary hashable values.  Composite elements built by
this package are plain tuples (pairs), frozensets (finite subsets) or the
frozen dataclasses of :mod:`famfib.container` and :mod:`famfib.inductive`,
so equality of composite elements is structural.  :func:`render` gives the
canonical textual form used for display and serialization.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping

from .errors import BaseMismatchError, WellFormednessError

Label = Hashable

STAR = "⋆"
DEFAULT_INDEX = "_"

_SIMPLE_LABEL = re.compile(r'[^\s(){},"\[\]]+\Z')


def render(value: Any) -> str:
    """Canonical string form of an element, witness or index label."""
    if isinstance(value, str):
        if _SIMPLE_LABEL.match(value):
            return value
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, tuple):
        return "(" + ", ".join(render(v) for v in value) + ")"
    if isinstance(value, frozenset):
        return "{" + ", ".join(sorted(render(v) for v in value)) + "}"
    rendered = getattr(value, "render", None)
    if rendered is not None:
        return rendered()
    raise TypeError(f"cannot render {value!r}")


def _distinct(labels: Iterable[Label], what: str) -> tuple:
    labels = tuple(labels)
    seen = set()
    for x in labels:
        if x in seen:
            raise WellFormednessError(f"duplicate {what} {render(x)}")
        seen.add(x)
    return labels


@dataclass(frozen=True)
class FinIndexedSet:
    """An ``I``-indexed family of finite ordered sets.

    ``fibres[k]`` lists the elements at ``indices[k]``.
    """

    indices: tuple
    fibres: tuple
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)
    _members: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        indices = _distinct(self.indices, "index label")
        fibres = tuple(_distinct(f, "element label") for f in self.fibres)
        if len(indices) != len(fibres):
            raise WellFormednessError("one fibre is required per index")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "fibres", fibres)
        object.__setattr__(self, "_lookup", dict(zip(indices, fibres)))
        object.__setattr__(
            self, "_members", {i: frozenset(f) for i, f in zip(indices, fibres)}
        )

    @classmethod
    def from_dict(cls, elems: Mapping[Label, Iterable[Label]]) -> "FinIndexedSet":
        return cls(tuple(elems), tuple(tuple(v) for v in elems.values()))

    @classmethod
    def single(cls, elems: Iterable[Label], index: Label = DEFAULT_INDEX) -> "FinIndexedSet":
        return cls((index,), (tuple(elems),))

    def __getitem__(self, i: Label) -> tuple:
        try:
            return self._lookup[i]
        except KeyError:
            raise WellFormednessError(f"unknown index {render(i)}") from None

    def has_index(self, i: Label) -> bool:
        return i in self._lookup

    def contains(self, i: Label, x: Label) -> bool:
        members = self._members.get(i)
        return members is not None and x in members

    def position(self, i: Label, x: Label) -> int:
        return self._lookup[i].index(x)

    def items(self) -> Iterator[tuple]:
        """Yield ``(index, element)`` pairs in canonical order."""
        for i, fibre in zip(self.indices, self.fibres):
            for x in fibre:
                yield i, x

    def as_dict(self) -> dict:
        return dict(self._lookup)

    def __len__(self) -> int:
        return sum(len(f) for f in self.fibres)

    @property
    def is_single_index(self) -> bool:
        return len(self.indices) == 1

    def same_indices(self, other: "FinIndexedSet") -> bool:
        return self.indices == other.indices

    def __repr__(self):
        body = ", ".join(
            f"{render(i)}: [{', '.join(render(x) for x in f)}]"
            for i, f in zip(self.indices, self.fibres)
        )
        return f"FinIndexedSet({{{body}}})"


@dataclass(frozen=True)
class IndexedMap:
    """An index-preserving total function ``source ->_I target``.

    ``table`` is keyed by ``(index, element)``.
    """

    source: FinIndexedSet
    target: FinIndexedSet
    table: Mapping

    def __post_init__(self):
        if not self.source.same_indices(self.target):
            raise BaseMismatchError("indexed maps need the same index set on both sides")
        table = dict(self.table)
        for i, x in self.source.items():
            if (i, x) not in table:
                raise WellFormednessError(f"map undefined at {render(i)}/{render(x)}")
            y = table[(i, x)]
            if not self.target.contains(i, y):
                raise WellFormednessError(
                    f"image {render(y)} of {render(x)} is not in the target at index {render(i)}"
                )
        if len(table) != len(self.source):
            raise WellFormednessError("map table has entries outside the source")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_function(cls, source, target, fn: Callable[[Label, Label], Label]) -> "IndexedMap":
        return cls(source, target, {(i, x): fn(i, x) for i, x in source.items()})

    @classmethod
    def identity(cls, X: FinIndexedSet) -> "IndexedMap":
        return cls(X, X, {(i, x): x for i, x in X.items()})

    def __call__(self, i: Label, x: Label) -> Label:
        return self.table[(i, x)]

    def then(self, g: "IndexedMap") -> "IndexedMap":
        """The composite ``g . self``."""
        if self.target != g.source:
            raise BaseMismatchError("cannot compose: codomain and domain differ")
        return IndexedMap(self.source, g.target, {k: g(k[0], y) for k, y in self.table.items()})

    def is_injective(self) -> bool:
        return len({(i, y) for (i, _), y in self.table.items()}) == len(self.table)


def compose(g: IndexedMap, f: IndexedMap) -> IndexedMap:
    return f.then(g)


@dataclass(frozen=True)
class Predicate:
    """A proof-relevant predicate: a finite witness tuple per element of ``base``."""

    base: FinIndexedSet
    witnesses: Mapping

    def __post_init__(self):
        ws = {}
        for i, x in self.base.items():
            ws[(i, x)] = _distinct(self.witnesses.get((i, x), ()), "witness")
        extra = set(self.witnesses) - set(ws)
        if extra:
            i, x = sorted(extra, key=render)[0]
            raise WellFormednessError(f"predicate keyed by unknown element {render(i)}/{render(x)}")
        object.__setattr__(self, "witnesses", ws)

    @classmethod
    def from_function(cls, base, fn: Callable[[Label, Label], Iterable]) -> "Predicate":
        return cls(base, {(i, x): tuple(fn(i, x)) for i, x in base.items()})

    def __getitem__(self, key: tuple) -> tuple:
        return self.witnesses[key]

    def holds(self, i: Label, x: Label) -> bool:
        return bool(self.witnesses[(i, x)])

    def total_witnesses(self) -> int:
        return sum(len(w) for w in self.witnesses.values())


def _require_base(actual: FinIndexedSet, expected: FinIndexedSet, what: str):
    if actual != expected:
        raise BaseMismatchError(f"{what} is based on {actual!r}, expected {expected!r}")


def reindex_pred(f: IndexedMap, P: Predicate) -> Predicate:
    """Pull ``P`` back along ``f``: the result at ``x`` is ``P`` at ``f x``."""
    _require_base(P.base, f.target, "predicate")
    return Predicate(f.source, {(i, x): P[(i, f(i, x))] for i, x in f.source.items()})


def opreindex_pred(f: IndexedMap, P: Predicate) -> Predicate:
    """Push ``P`` forward along ``f`` by disjoint union over each fibre of ``f``.

    Witnesses at ``y`` are the pairs ``(x, w)`` with ``f x = y`` and ``w`` in
    ``P x``, ordered by ``x`` then ``w``.
    """
    _require_base(P.base, f.source, "predicate")
    out = {key: [] for key in f.target.items()}
    for i, x in f.source.items():
        out[(i, f(i, x))].extend((x, w) for w in P[(i, x)])
    return Predicate(f.target, {k: tuple(v) for k, v in out.items()})


def truth_predicate(X: FinIndexedSet) -> Predicate:
    return Predicate(X, {key: (STAR,) for key in X.items()})


def comprehension(P: Predicate) -> tuple:
    """Return ``({P}, pi)`` where ``{P}`` holds the pairs ``(x, w)``."""
    total = FinIndexedSet(
        P.base.indices,
        tuple(tuple((x, w) for x in fibre for w in P[(i, x)])
              for i, fibre in zip(P.base.indices, P.base.fibres)),
    )
    pi = IndexedMap(total, P.base, {(i, xw): xw[0] for i, xw in total.items()})
    return total, pi


def predicate_morphisms(P: Predicate, Q: Predicate) -> Iterator[dict]:
    """Enumerate every vertical morphism ``P -> Q`` over the identity.

    A morphism picks, for each element ``x`` and each witness of ``P x``, a
    witness of ``Q x``.  The result maps ``(i, x, w)`` to the chosen witness.
    """
    _require_base(Q.base, P.base, "codomain predicate")
    slots = [(i, x, w) for i, x in P.base.items() for w in P[(i, x)]]
    choices = [Q[(i, x)] for i, x, _ in slots]
    for picked in itertools.product(*choices):
        yield dict(zip(slots, picked))
