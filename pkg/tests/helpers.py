"""Random instance generators shared by the test modules."""
import itertools
import random

from famfib import (
    FinIndexedSet,
    FiniteCoalgebra,
    IndexedMap,
    Predicate,
    Relation,
)
from famfib.container import ContainerFunctor, PfinFunctor, PfinProdFunctor


def indexed_set(sizes, prefix="x"):
    """``sizes`` maps index label to fibre size; labels are ``<prefix><index><n>``."""
    return FinIndexedSet.from_dict(
        {i: [f"{prefix}{i}{n}" for n in range(k)] for i, k in sizes.items()}
    )


def random_set(rng, indices, max_size=3, min_size=0, prefix="x"):
    return indexed_set({i: rng.randint(min_size, max_size) for i in indices}, prefix)


def random_map(rng, X, Y):
    return IndexedMap(X, Y, {(i, x): rng.choice(Y[i]) for i, x in X.items()})


def random_predicate(rng, X, max_witnesses=2):
    return Predicate(X, {
        (i, x): tuple(f"w{n}" for n in range(rng.randint(0, max_witnesses)))
        for i, x in X.items()
    })


def random_relation(rng, X, density=None):
    density = rng.random() if density is None else density
    return Relation.from_pairs(X, (
        (i, x, y) for i in X.indices for x in X[i] for y in X[i] if rng.random() < density
    ))


def all_maps(X, Y):
    keys = list(X.items())
    for images in itertools.product(*(Y[i] for i, _ in keys)):
        yield IndexedMap(X, Y, dict(zip(keys, images)))


def random_structure(rng, F, X, i, x):
    if isinstance(F, PfinProdFunctor):
        p = rng.random() * 0.6
        return frozenset((a, y) for a in F.labels for y in X[i] if rng.random() < p)
    if isinstance(F, PfinFunctor):
        p = rng.random() * 0.6
        return frozenset(y for y in X[i] if rng.random() < p)
    if isinstance(F, ContainerFunctor):
        return rng.choice(F.apply_obj(X)[i])
    raise TypeError(F)


def random_coalgebra(rng, F, X):
    return FiniteCoalgebra(F, X, {(i, x): random_structure(rng, F, X, i, x) for i, x in X.items()})


def seeded(seed):
    return random.Random(seed)
