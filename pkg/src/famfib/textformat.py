"""The YAML-based spec document format.

One document per file.  Every document is a mapping with a ``kind`` and a
mandatory ``version`` (currently ``1``); the remaining keys depend on the
kind and are listed in ``docs/format.md``.  Unknown keys are rejected.  All
scalars are read as strings, so ``0`` and ``"0"`` denote the same label.

Serialization is canonical: mapping keys are sorted, lists keep the declared
order, and ``serialize(parse(serialize(parse(t))))`` equals
``serialize(parse(t))``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import yaml

from .coinductive import FiniteCoalgebra, Relation
from .container import (
    ContainerFunctor,
    ExtensionElement,
    FinitaryFunctor,
    IndexedContainer,
    PfinFunctor,
    PfinProdFunctor,
    validate_container,
)
from .errors import ContainerError, SpecError, WellFormednessError
from .finset import STAR, FinIndexedSet, Predicate, render
from .inductive import AlgebraTable, WTree
from .stdlib import ENTRIES, container_from_ref, functor_from_ref

VERSION = "1"
KINDS = ("container", "coalgebra", "relation", "predicate", "algebra", "tree")


@dataclass
class SpecDocument:
    """A parsed document.

    ``value`` holds the domain object.  ``ref`` is the functor reference of a
    coalgebra or the container reference of an algebra or tree, exactly as
    written in the file.
    """

    kind: str
    value: object
    ref: str | None = None
    version: str = VERSION


# -- reading -----------------------------------------------------------------


def _err(node, message, category="schema"):
    mark = node.start_mark if node is not None else None
    if mark is None:
        return SpecError(message, category=category)
    return SpecError(message, mark.line + 1, mark.column + 1, category)


def _scalar(node, what):
    if not isinstance(node, yaml.ScalarNode):
        raise _err(node, f"{what} must be a scalar")
    return node.value


def _seq(node, what):
    if not isinstance(node, yaml.SequenceNode):
        raise _err(node, f"{what} must be a list")
    return node.value


def _map(node, what, required=(), optional=()):
    if not isinstance(node, yaml.MappingNode):
        raise _err(node, f"{what} must be a mapping")
    out = {}
    for knode, vnode in node.value:
        key = _scalar(knode, f"key in {what}")
        if key in out:
            raise _err(knode, f"duplicate key {key!r} in {what}")
        out[key] = (knode, vnode)
    if required or optional:
        for key, (knode, _) in out.items():
            if key not in required and key not in optional:
                raise _err(knode, f"unknown field {key!r} in {what}")
        for key in required:
            if key not in out:
                raise _err(node, f"missing field {key!r} in {what}")
    return {k: v for k, (_, v) in out.items()} if (required or optional) else out


def _labels(node, what):
    labels = [_scalar(n, what) for n in _seq(node, f"{what} list")]
    seen = set()
    for n, x in zip(_seq(node, what), labels):
        if x in seen:
            raise _err(n, f"duplicate {what} {x!r}")
        seen.add(x)
    return labels


def _indexed_set(node, what="base"):
    fields = _map(node, what, ("indices", "elements"))
    indices = _labels(fields["indices"], "index")
    elems_node = fields["elements"]
    elems = {}
    for i, (knode, vnode) in _map(elems_node, f"{what}.elements").items():
        if i not in indices:
            raise _err(knode, f"unknown index {i!r}", "referential")
        elems[i] = _labels(vnode, "element")
    return FinIndexedSet(tuple(indices), tuple(tuple(elems.get(i, ())) for i in indices))


def _element(X, i, node, what="element"):
    x = _scalar(node, what)
    if not X.contains(i, x):
        raise _err(node, f"{what} {x!r} is not declared at index {i!r}", "referential")
    return x


def _per_index(node, X, what):
    """Iterate ``(index, value node)`` for a mapping keyed by index labels."""
    for i, (knode, vnode) in _map(node, what).items():
        if not X.has_index(i):
            raise _err(knode, f"unknown index {i!r}", "referential")
        yield i, vnode


def _parse_container(fields, name=""):
    indices = _labels(fields["indices"], "index")
    shapes, positions = {}, {}
    for i, (knode, vnode) in _map(fields["shapes"], "shapes").items():
        if i not in indices:
            raise _err(knode, f"unknown index {i!r}", "referential")
        shapes[i] = []
        for snode in _seq(vnode, f"shapes of {i!r}"):
            sf = _map(snode, "shape entry", ("shape",), ("positions",))
            s = _scalar(sf["shape"], "shape")
            if s in shapes[i]:
                raise _err(snode, f"duplicate shape {s!r} at index {i!r}")
            shapes[i].append(s)
            if "positions" in sf:
                for j, (jnode, pnode) in _map(sf["positions"], "positions").items():
                    if j not in indices:
                        raise _err(jnode, f"unknown index {j!r}", "referential")
                    ps = [_scalar(n, "position") for n in _seq(pnode, "positions")]
                    for n, p in zip(_seq(pnode, "positions"), ps):
                        if ps.count(p) > 1:
                            raise _err(n, f"duplicate position {p!r}")
                    positions[(i, s, j)] = ps
    c = IndexedContainer(tuple(indices), shapes, positions, name=name)
    try:
        validate_container(c)
    except ContainerError as exc:
        raise SpecError(str(exc), category="schema") from None
    return c


def _ext_element(c, X, i, node):
    ef = _map(node, "container element", ("shape",), ("args",))
    s = _scalar(ef["shape"], "shape")
    if s not in c.shapes_at(i):
        raise _err(ef["shape"], f"unknown shape {s!r} at index {i!r}", "referential")
    given = {}
    if "args" in ef:
        for j, (jnode, pmap) in _map(ef["args"], "args").items():
            for p, (pnode, xnode) in _map(pmap, "args").items():
                given[(j, p)] = (pnode, xnode)
    slots = c.slots(i, s)
    for key, (pnode, _) in given.items():
        if key not in slots:
            raise _err(pnode, f"shape {s!r} has no position {key[1]!r} at index {key[0]!r}",
                       "referential")
    args = []
    for j, p in slots:
        if (j, p) not in given:
            raise _err(node, f"missing argument for position {p!r} at index {j!r}")
        args.append(((j, p), _element(X, j, given[(j, p)][1])))
    return ExtensionElement(i, s, tuple(args))


def _functor_element(F, X, i, node):
    if isinstance(F, ContainerFunctor):
        return _ext_element(F.container, X, i, node)
    if isinstance(F, PfinFunctor):
        items = [_element(X, i, n) for n in _seq(node, "subset")]
        return frozenset(items)
    if isinstance(F, PfinProdFunctor):
        pairs = []
        for pnode in _seq(node, "transition list"):
            parts = _seq(pnode, "transition")
            if len(parts) != 2:
                raise _err(pnode, "a transition is a pair [label, state]")
            a = _scalar(parts[0], "label")
            if a not in F.labels:
                raise _err(parts[0], f"unknown action label {a!r}", "referential")
            pairs.append((a, _element(X, i, parts[1])))
        return frozenset(pairs)
    raise SpecError(f"no text encoding for functor {F.name}")


_TOKEN = re.compile(r'\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<punct>[(),])|(?P<name>[^\s(),"]+))')


def parse_term(text: str, c: IndexedContainer, index) -> WTree:
    """Parse a tree written as ``shape(child, ...)``."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SpecError(f"cannot read tree term at offset {pos}", category="syntax")
        if m.group("str"):
            tokens.append(("name", json.loads(m.group("str"))))
        elif m.group("punct"):
            tokens.append((m.group("punct"), None))
        else:
            tokens.append(("name", m.group("name")))
        pos = m.end()
    k = 0

    def node(i):
        nonlocal k
        if k >= len(tokens) or tokens[k][0] != "name":
            raise SpecError("expected a shape name in tree term", category="syntax")
        s = tokens[k][1]
        k += 1
        if s not in c.shapes_at(i):
            raise SpecError(f"unknown shape {s!r} at index {i!r}", category="referential")
        slots = c.slots(i, s)
        kids = []
        if k < len(tokens) and tokens[k][0] == "(":
            k += 1
            for n, (j, _) in enumerate(slots):
                if n:
                    if k >= len(tokens) or tokens[k][0] != ",":
                        raise SpecError(f"{s} expects {len(slots)} children", category="syntax")
                    k += 1
                kids.append(node(j))
            if k >= len(tokens) or tokens[k][0] != ")":
                raise SpecError(f"{s} expects {len(slots)} children", category="syntax")
            k += 1
        if len(kids) != len(slots):
            raise SpecError(f"{s} expects {len(slots)} children", category="syntax")
        return WTree(i, s, tuple(zip(slots, kids)))

    tree = node(index)
    if k != len(tokens):
        raise SpecError("trailing input after tree term", category="syntax")
    return tree


def resolve_container(ref: str, base_dir: Path | None = None) -> IndexedContainer:
    """A stdlib name (``nat``, ``lam:2``, ...) or a path to a container document."""
    if ref.endswith((".yaml", ".yml")):
        path = Path(ref)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            doc = parse(path.read_text(encoding="utf-8"), base_dir=path.parent)
        except OSError as exc:
            raise SpecError(f"cannot read container {ref!r}: {exc.strerror}",
                            category="referential") from None
        if doc.kind != "container":
            raise SpecError(f"{ref!r} is a {doc.kind} document, not a container",
                            category="referential")
        return doc.value
    try:
        return container_from_ref(ref)
    except WellFormednessError as exc:
        raise SpecError(str(exc), category="referential") from None


def resolve_functor(ref: str, base_dir: Path | None = None) -> FinitaryFunctor:
    name = ref.partition(":")[0]
    if name in ENTRIES and not ENTRIES[name].is_container:
        try:
            return functor_from_ref(ref)
        except WellFormednessError as exc:
            raise SpecError(str(exc), category="referential") from None
    return ContainerFunctor(resolve_container(ref, base_dir))


_FIELDS = {
    "container": (("indices", "shapes"), ("name",)),
    "predicate": (("base", "witnesses"), ()),
    "relation": (("base", "pairs"), ()),
    "coalgebra": (("functor", "carrier", "structure"), ()),
    "algebra": (("container", "carrier", "table"), ()),
    "tree": (("container", "index", "tree"), ()),
}


def parse(text: str, base_dir: Path | None = None) -> SpecDocument:
    """Parse one document.  Raises :class:`SpecError` with a location when known."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise SpecError(exc.problem or str(exc),
                        mark.line + 1 if mark else None,
                        mark.column + 1 if mark else None, "syntax") from None
    except yaml.YAMLError as exc:
        raise SpecError(str(exc), category="syntax") from None
    if root is None:
        raise SpecError("empty document", 1, 1)
    top = _map(root, "document")
    if "kind" not in top:
        raise _err(root, "missing field 'kind'")
    kind = _scalar(top["kind"][1], "kind")
    if kind not in KINDS:
        raise _err(top["kind"][1], f"unknown kind {kind!r}")
    required, optional = _FIELDS[kind]
    fields = _map(root, f"{kind} document", ("kind", "version", *required), optional)
    version = _scalar(fields["version"], "version")
    if version != VERSION:
        raise _err(fields["version"], f"unsupported version {version!r}")
    parser = globals()[f"_read_{kind}"]
    value, ref = parser(fields, base_dir)
    return SpecDocument(kind, value, ref, version)


def _read_container(fields, base_dir):
    name = _scalar(fields["name"], "name") if "name" in fields else ""
    return _parse_container(fields, name), None


def _read_predicate(fields, base_dir):
    X = _indexed_set(fields["base"])
    ws = {}
    for i, emap in _per_index(fields["witnesses"], X, "witnesses"):
        for x, (xnode, wnode) in _map(emap, "witnesses").items():
            _element(X, i, xnode)
            ws[(i, x)] = _labels(wnode, "witness")
    return Predicate(X, ws), None


def _read_relation(fields, base_dir):
    X = _indexed_set(fields["base"])
    pairs = {}
    for i, plist in _per_index(fields["pairs"], X, "pairs"):
        for pnode in _seq(plist, "pairs"):
            parts = _seq(pnode, "pair")
            if len(parts) not in (2, 3):
                raise _err(pnode, "a pair is [left, right] or [left, right, [witnesses]]")
            x = _element(X, i, parts[0])
            y = _element(X, i, parts[1])
            if (i, x, y) in pairs:
                raise _err(pnode, f"duplicate pair [{x}, {y}]")
            pairs[(i, x, y)] = _labels(parts[2], "witness") if len(parts) == 3 else [STAR]
    return Relation(X, pairs), None


def _read_coalgebra(fields, base_dir):
    ref = _scalar(fields["functor"], "functor")
    F = resolve_functor(ref, base_dir)
    X = _indexed_set(fields["carrier"], "carrier")
    structure = {}
    for i, smap in _per_index(fields["structure"], X, "structure"):
        for x, (xnode, unode) in _map(smap, "structure").items():
            _element(X, i, xnode, "state")
            structure[(i, x)] = _functor_element(F, X, i, unode)
    for i, x in X.items():
        if (i, x) not in structure:
            raise _err(fields["structure"], f"structure map undefined at state {x!r}")
    try:
        return FiniteCoalgebra(F, X, structure), ref
    except WellFormednessError as exc:
        raise _err(fields["structure"], str(exc)) from None


def _read_algebra(fields, base_dir):
    ref = _scalar(fields["container"], "container")
    c = resolve_container(ref, base_dir)
    A = _indexed_set(fields["carrier"], "carrier")
    if A.indices != c.indices:
        raise _err(fields["carrier"], "carrier indices differ from the container's",
                   "referential")
    table = {}
    for i, rows in _per_index(fields["table"], A, "table"):
        for rnode in _seq(rows, "table rows"):
            rf = _map(rnode, "table row", ("in", "out"))
            u = _ext_element(c, A, i, rf["in"])
            if u in table:
                raise _err(rnode, f"duplicate table entry for {u.render()}")
            table[u] = _element(A, i, rf["out"])
    return AlgebraTable(A, table), ref


def _read_tree(fields, base_dir):
    ref = _scalar(fields["container"], "container")
    c = resolve_container(ref, base_dir)
    i = _scalar(fields["index"], "index")
    if i not in c.indices:
        raise _err(fields["index"], f"unknown index {i!r}", "referential")
    node = fields["tree"]
    try:
        return parse_term(_scalar(node, "tree"), c, i), ref
    except SpecError as exc:
        raise _err(node, exc.message, exc.category) from None


# -- writing -----------------------------------------------------------------


def label(x) -> str:
    return x if isinstance(x, str) else render(x)


def _set_data(X: FinIndexedSet) -> dict:
    return {
        "indices": [label(i) for i in X.indices],
        "elements": {label(i): [label(x) for x in X[i]] for i in X.indices},
    }


def _ext_data(u: ExtensionElement) -> dict:
    data = {"shape": label(u.shape)}
    if u.args:
        args = {}
        for (j, p), x in u.args:
            args.setdefault(label(j), {})[label(p)] = label(x)
        data["args"] = args
    return data


def functor_element_data(F: FinitaryFunctor, X: FinIndexedSet, i, u):
    if isinstance(F, ContainerFunctor):
        return _ext_data(u)
    order = {x: n for n, x in enumerate(X[i])}
    if isinstance(F, PfinFunctor):
        return [label(x) for x in sorted(u, key=order.__getitem__)]
    if isinstance(F, PfinProdFunctor):
        aorder = {a: n for n, a in enumerate(F.labels)}
        return [[label(a), label(x)]
                for a, x in sorted(u, key=lambda ax: (aorder[ax[0]], order[ax[1]]))]
    raise SpecError(f"no text encoding for functor {F.name}")


def to_data(doc: SpecDocument) -> dict:
    """The canonical plain-data form of a document."""
    v = doc.value
    data = {"kind": doc.kind, "version": int(doc.version)}
    if doc.kind == "container":
        shapes = {}
        for i in v.indices:
            entries = []
            for s in v.shapes_at(i):
                entry = {"shape": label(s)}
                pos = {label(j): [label(p) for p in v.positions[(i, s, j)]]
                       for j in v.indices if (i, s, j) in v.positions}
                if pos:
                    entry["positions"] = pos
                entries.append(entry)
            shapes[label(i)] = entries
        data.update(indices=[label(i) for i in v.indices], shapes=shapes)
        if v.name:
            data["name"] = v.name
    elif doc.kind == "predicate":
        data["base"] = _set_data(v.base)
        data["witnesses"] = {
            label(i): {label(x): [label(w) for w in v[(i, x)]] for x in v.base[i]}
            for i in v.base.indices
        }
    elif doc.kind == "relation":
        data["base"] = _set_data(v.base)
        pairs = {label(i): [] for i in v.base.indices}
        for i, x, y in v.related_pairs():
            ws = v[(i, x, y)]
            entry = [label(x), label(y)]
            if ws != (STAR,):
                entry.append([label(w) for w in ws])
            pairs[label(i)].append(entry)
        data["pairs"] = pairs
    elif doc.kind == "coalgebra":
        data["functor"] = doc.ref or v.functor.name
        data["carrier"] = _set_data(v.carrier)
        data["structure"] = {
            label(i): {label(x): functor_element_data(v.functor, v.carrier, i, v(i, x))
                       for x in v.carrier[i]}
            for i in v.carrier.indices
        }
    elif doc.kind == "algebra":
        data["container"] = doc.ref
        data["carrier"] = _set_data(v.carrier)
        table = {label(i): [] for i in v.carrier.indices}
        for u, a in v.table.items():
            table[label(u.index)].append({"in": _ext_data(u), "out": label(a)})
        data["table"] = table
    elif doc.kind == "tree":
        data.update(container=doc.ref, index=label(v.index), tree=v.render())
    else:
        raise SpecError(f"unknown kind {doc.kind!r}")
    return data


def dump(data) -> str:
    return yaml.safe_dump(data, sort_keys=True, allow_unicode=True,
                          default_flow_style=None, width=4096)


def serialize(doc: SpecDocument) -> str:
    return dump(to_data(doc))


def load(path, base_dir: Path | None = None) -> SpecDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}", category="io") from None
    return parse(text, base_dir=path.parent if base_dir is None else base_dir)


def export_stdlib(directory) -> list:
    """Write each stdlib container as a document; returns the written paths."""
    from .stdlib import stdlib_containers

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, c in stdlib_containers().items():
        path = directory / f"{name.replace(':', '')}.yaml"
        path.write_text(serialize(SpecDocument("container", c)), encoding="utf-8")
        written.append(path)
    return written
