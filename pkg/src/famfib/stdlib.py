"""Ready-made containers and functors.

Every label is a string so that entries survive a round trip through the
text format unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .container import (
    FinitaryFunctor,
    IndexedContainer,
    PfinProdFunctor,
    as_functor,
    pfin_functor,
    pfin_prod_functor,
)
from .errors import WellFormednessError
from .finset import DEFAULT_INDEX


def nat_container() -> IndexedContainer:
    """``N X = 1 + X``: shape ``z`` is nullary, shape ``s`` has one position ``p``."""
    i = DEFAULT_INDEX
    return IndexedContainer((i,), {i: ("z", "s")}, {(i, "s", i): ("p",)}, name="nat")


def lam_container(n_max: int) -> IndexedContainer:
    """Untyped lambda terms with free variables among ``n`` names, ``n <= n_max``.

    At index ``n`` the shapes are ``Var_0 .. Var_{n-1}``, ``App`` with positions
    ``f`` and ``a`` at ``n``, and ``Abs`` with position ``b`` at ``n + 1``.
    ``Abs`` is dropped at ``n_max`` so the index set stays finite.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    indices = tuple(str(n) for n in range(n_max + 1))
    shapes, positions = {}, {}
    for n in range(n_max + 1):
        i = str(n)
        ss = [f"Var_{v}" for v in range(n)] + ["App"]
        positions[(i, "App", i)] = ("f", "a")
        if n < n_max:
            ss.append("Abs")
            positions[(i, "Abs", str(n + 1))] = ("b",)
        shapes[i] = tuple(ss)
    return IndexedContainer(indices, shapes, positions, name=f"lam:{n_max}")


def odds_evens_container() -> IndexedContainer:
    """Mutually defined even and odd numerals: ``zero``, ``evenSucc``, ``oddSucc``."""
    return IndexedContainer(
        ("even", "odd"),
        {"even": ("zero", "evenSucc"), "odd": ("oddSucc",)},
        {("even", "evenSucc", "odd"): ("n",), ("odd", "oddSucc", "even"): ("n",)},
        name="odds-evens",
    )


def lts_functor(labels) -> PfinProdFunctor:
    return pfin_prod_functor(labels)


@dataclass(frozen=True)
class StdlibEntry:
    name: str
    build: Callable
    doc: str
    is_container: bool = True


ENTRIES = {
    "nat": StdlibEntry("nat", nat_container, "natural numbers, N X = 1 + X"),
    "lam": StdlibEntry("lam", lam_container,
                       "untyped lambda terms indexed by the number of free variables"),
    "odds-evens": StdlibEntry("odds-evens", odds_evens_container,
                              "mutually inductive even and odd numerals"),
    "pfin": StdlibEntry("pfin", pfin_functor, "finite powerset", is_container=False),
    "lts": StdlibEntry("lts", lts_functor,
                       "finitely branching labelled transitions, Pfin(A x -)",
                       is_container=False),
}


def stdlib_containers(lam_max: int = 2) -> dict:
    return {
        "nat": nat_container(),
        f"lam:{lam_max}": lam_container(lam_max),
        "odds-evens": odds_evens_container(),
    }


def stdlib_functors(labels=("a", "b"), lam_max: int = 2) -> dict:
    functors = {name: as_functor(c) for name, c in stdlib_containers(lam_max).items()}
    functors["pfin"] = pfin_functor()
    functors[f"lts:{','.join(labels)}"] = lts_functor(labels)
    return functors


def container_from_ref(ref: str) -> IndexedContainer:
    """Resolve ``nat``, ``odds-evens`` or ``lam:N``."""
    name, _, arg = ref.partition(":")
    entry = ENTRIES.get(name)
    if entry is None or not entry.is_container:
        raise WellFormednessError(f"unknown container {ref!r}")
    if name == "lam":
        try:
            return lam_container(int(arg or 2))
        except ValueError:
            raise WellFormednessError(f"bad lambda bound in {ref!r}") from None
    if arg:
        raise WellFormednessError(f"{name} takes no parameter")
    return entry.build()


def functor_from_ref(ref: str) -> FinitaryFunctor:
    """Resolve a functor name: a container name, ``pfin`` or ``lts:a,b``."""
    name, _, arg = ref.partition(":")
    if name == "pfin" and not arg:
        return pfin_functor()
    if name == "lts":
        labels = [a for a in arg.split(",") if a]
        if not labels:
            raise WellFormednessError("lts needs at least one label, e.g. lts:a,b")
        return lts_functor(labels)
    return as_functor(container_from_ref(ref))
