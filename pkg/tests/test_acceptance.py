"""Acceptance gate.  One test per criterion; the terminal summary prints a
PASS/FAIL line for each.  Runtime bounds are wall-clock on the test machine.
"""
import itertools
import time

import pytest

from famfib import (
    AlgebraTable,
    ExtensionElement,
    Predicate,
    Relation,
    StepFunction,
    as_functor,
    check_coinduction_premise,
    check_induction_soundness,
    container_witness,
    enumerate_trees,
    eq_relation,
    fold,
    in_ext,
    induce,
    induction_premises,
    kernel_of_map,
    lam_container,
    largest_bisimulation,
    lift_predicate_container,
    lift_predicate_generic,
    lift_relation_generic,
    lift_relation_pfin,
    nat_container,
    odds_evens_container,
    opreindex_pred,
    pfin_functor,
    pfin_prod_functor,
    predicate_morphisms,
    quotient,
    reindex_pred,
    render_rule,
    truth_predicate,
)
from famfib.inductive import trees_as_set
from famfib.stdlib import stdlib_containers, stdlib_functors
from famfib.textformat import load, parse, serialize

from helpers import indexed_set, random_coalgebra, random_map, random_predicate, random_relation, seeded
from oracles import (
    closure_by_squaring,
    count_fibre_morphisms,
    is_strong_bisimulation,
    lambda_terms,
    strong_bisimilarity,
)
from test_cli import CASES, FIXTURES, GOLDEN, invoke


def size_grid(indices, max_size):
    """Every indexed set with fibre sizes up to ``max_size``."""
    for sizes in itertools.product(range(max_size + 1), repeat=len(indices)):
        yield indexed_set(dict(zip(indices, sizes)))


@pytest.mark.criterion(1, "fold in = id on enumerated trees, depth 5 (lam:2 to depth 4)")
def test_c1_fold_in_is_identity(record_property):
    start = time.perf_counter()
    # Lam grows doubly exponentially: 899 terms at nMax=1, depth 5, but
    # about 2.4 million at nMax=2, so nMax=2 runs to depth 4 (2062 terms).
    cases = [(nat_container(), 5), (odds_evens_container(), 5),
             (lam_container(1), 5), (lam_container(2), 4)]
    total = 0
    for c, depth in cases:
        trees = enumerate_trees(c, depth)
        for i in c.indices:
            for t in trees[i]:
                assert fold(c, in_ext, t) == t
                total += 1
        # the same, with in given as a finite table on the trees one level down
        smaller = enumerate_trees(c, depth - 1)
        h = AlgebraTable.from_function(c, trees_as_set(smaller), in_ext)
        for i in c.indices:
            for t in trees[i]:
                if all(k.depth < depth for k in t.subtrees()):
                    assert fold(c, h, t) == t
    elapsed = time.perf_counter() - start
    record_property("detail", f"{total} trees, {elapsed:.2f}s < 5s")
    assert elapsed < 5


@pytest.mark.criterion(2, "generic and container predicate liftings agree")
def test_c2_lifting_equivalence(record_property):
    start = time.perf_counter()
    rng = seeded(20)
    cases = 0
    for c in stdlib_containers(2).values():
        F = as_functor(c)
        for _ in range(200):
            X = indexed_set({i: rng.randint(0, 3) for i in c.indices})
            Q = random_predicate(rng, X, 2)
            gen = lift_predicate_generic(F, Q)
            con = lift_predicate_container(c, Q)
            assert gen.base == con.base
            for key in con.base.items():
                # canonical bijection: drop the element component of each argument
                assert [container_witness(v) for v in gen[key]] == list(con[key])
            cases += 1
    elapsed = time.perf_counter() - start
    record_property("detail", f"{cases} cases, {elapsed:.2f}s < 30s")
    assert cases >= 500 and elapsed < 30


@pytest.mark.criterion(3, "generic lifting preserves truth")
def test_c3_truth_preservation(record_property):
    checked = 0
    for name, F in stdlib_functors(("a", "b"), 2).items():
        indices = F.container.indices if hasattr(F, "container") else ("_",)
        for X in size_grid(indices, 4):
            lifted = lift_predicate_generic(F, truth_predicate(X))
            assert all(len(ws) == 1 for ws in lifted.witnesses.values()), name
            checked += 1
    record_property("detail", f"{checked} carriers")


@pytest.mark.criterion(4, "relational lifting preserves equality")
def test_c4_equality_preservation(record_property):
    checked = 0
    for name, F in stdlib_functors(("a", "b"), 2).items():
        indices = F.container.indices if hasattr(F, "container") else ("_",)
        for X in size_grid(indices, 3):
            assert lift_relation_generic(F, eq_relation(X)) == eq_relation(F.apply_obj(X)), name
            checked += 1
    record_property("detail", f"{checked} carriers")


@pytest.mark.criterion(5, "quotient kernel equals the closure oracle")
def test_c5_quotient_correctness(record_property):
    rng = seeded(50)
    for _ in range(200):
        X = indexed_set({i: rng.randint(0, 6) for i in ("i", "j")})
        R = random_relation(rng, X, rng.random() * 0.3)
        _, rho = quotient(R)
        kernel = kernel_of_map(rho)
        for i in X.indices:
            expected = closure_by_squaring(
                list(X[i]), [(x, y) for j, x, y in R.related_pairs() if j == i]
            )
            assert {(x, y) for j, x, y in kernel.support() if j == i} == expected
    for X in size_grid(("i", "j"), 6):
        part, rho = quotient(eq_relation(X))
        assert part.is_discrete() and rho.is_injective() and rho.target == X
    record_property("detail", "200 random relations")


@pytest.mark.criterion(6, "powerset covering rule equals the generic lifting")
def test_c6_pfin_rule(record_property):
    checked = 0
    F = pfin_functor()
    for n in range(5):
        X = indexed_set({"_": n})
        pairs = [("_", x, y) for x in X["_"] for y in X["_"]]
        for k in range(4):
            for chosen in itertools.combinations(pairs, k):
                R = Relation.from_pairs(X, chosen)
                assert lift_relation_pfin(R).support() == lift_relation_generic(F, R).support()
                checked += 1
    rng = seeded(60)
    X = indexed_set({"_": 4})
    pairs = [("_", x, y) for x in X["_"] for y in X["_"]]
    for _ in range(2000):
        mask = rng.getrandbits(16)
        R = Relation.from_pairs(X, (p for b, p in enumerate(pairs) if mask >> b & 1))
        assert lift_relation_pfin(R).support() == lift_relation_generic(F, R).support()
        checked += 1
    record_property("detail", f"{checked} relations")


def bisim_subrelation(rng, part, keep):
    """Each off-diagonal pair of the partition, kept with probability ``keep``."""
    pairs = [(i, x, y) for i, x, y in part.as_relation().related_pairs() if x != y]
    return Relation.from_pairs(part.base, (p for p in pairs if rng.random() < keep))


@pytest.mark.criterion(7, "coinduction premise implies bisimilarity")
def test_c7_coinduction_soundness(record_property):
    start = time.perf_counter()
    rng = seeded(70)
    functors = [as_functor(nat_container()), pfin_functor(),
                pfin_prod_functor(("a",)), pfin_prod_functor(("a", "b"))]
    passes = violations = 0
    for n in range(100):
        F = functors[n % len(functors)]
        X = indexed_set({"_": rng.randint(1, 6)}, "s")
        k = random_coalgebra(rng, F, X)
        part = largest_bisimulation(k)
        for m in range(100):
            if m % 2:
                R = random_relation(rng, X, rng.random() * 0.4)
            else:
                # keeping every pair gives the largest bisimulation itself
                R = bisim_subrelation(rng, part, 1.0 if m % 4 == 0 else 0.5)
            if check_coinduction_premise(k, R).passed:
                passes += 1
                violations += sum(not part.same_class(*p) for p in R.related_pairs())
    elapsed = time.perf_counter() - start
    record_property("detail", f"{passes} premise passes, {violations} violations, {elapsed:.2f}s < 60s")
    assert violations == 0 and passes > 0 and elapsed < 60


def random_lts(rng):
    labels = ("a", "b")[: rng.randint(1, 2)]
    X = indexed_set({"_": rng.randint(1, 8)}, "s")
    return random_coalgebra(rng, pfin_prod_functor(labels), X)


def random_partition(rng, states):
    blocks = {}
    for x in states:
        blocks.setdefault(rng.randint(0, len(states) - 1), []).append(x)
    return list(blocks.values())


def partition_relation(X, blocks):
    return Relation.from_pairs(X, (("_", x, y) for b in blocks for x in b for y in b))


@pytest.mark.criterion(8, "agreement with classical strong bisimulation")
def test_c8_classical_bisimulation(record_property):
    rng = seeded(80)
    agree = positives = 0
    for _ in range(50):
        k = random_lts(rng)
        states = list(k.carrier["_"])
        succ = {x: set(k("_", x)) for x in states}
        oracle = strong_bisimilarity(states, succ)
        part = largest_bisimulation(k)
        assert {(x, y) for _, x, y in part.as_relation().support()} == oracle
        candidates = [part.classes["_"], [[x] for x in states], [states]]
        candidates += [random_partition(rng, states) for _ in range(10)]
        for blocks in candidates:
            R = partition_relation(k.carrier, blocks)
            classical = is_strong_bisimulation(succ, {(x, y) for _, x, y in R.support()})
            assert check_coinduction_premise(k, R).passed == classical
            agree += 1
            positives += classical
    record_property("detail", f"{agree} equivalences checked, {positives} bisimulations")


ODDS_EVENS_RULE = [
    "P(zero) →",
    "(Π n : odds. Q(n) → P(evenSucc n)) →",
    "(Π n : evens. P(n) → Q(oddSucc n)) →",
    "(Π n : evens. P(n)) × (Π n : odds. Q(n))",
]


@pytest.mark.criterion(9, "odds/evens rule instance and soundness to depth 6")
def test_c9_odds_evens(record_property):
    c = odds_evens_container()
    rule = render_rule(c, {"even": "P", "odd": "Q"}, {"even": "evens", "odd": "odds"})
    assert rule == ODDS_EVENS_RULE

    def successors(t):
        return 0 if not t.children else 1 + successors(t.subtrees()[0])

    # P: even number of successors, Q: odd number
    report = check_induction_soundness(
        c, lambda t: successors(t) % 2 == (0 if t.index == "even" else 1), 6
    )
    assert report.premise_holds and report.conclusion_holds
    record_property("detail", f"{report.trees_checked} trees")


def free_vars(t):
    if t.shape.startswith("Var_"):
        return frozenset({int(t.shape[4:])})
    if t.shape == "Abs":
        return free_vars(t.subtrees()[0]) - {int(t.index)}
    return frozenset().union(*(free_vars(k) for k in t.subtrees()))


@pytest.mark.criterion(10, "Lam rule instance, counts, and induce")
def test_c10_lam(record_property):
    n_max = 2
    lam = lam_container(n_max)
    premises = induction_premises(lam)
    families = {"Var": [], "App": [], "Abs": []}
    for p in premises:
        families[p.shape.split("_")[0]].append(p)
    assert sum(map(len, families.values())) == len(premises)
    for p in families["Var"]:
        assert p.hypotheses == ()
    for p in families["App"]:
        assert p.hypotheses == ((p.index, "f"), (p.index, "a"))
    for p in families["Abs"]:
        assert p.hypotheses == ((str(int(p.index) + 1), "b"),)
    assert len(families["Var"]) == n_max * (n_max + 1) // 2
    assert len(families["App"]) == n_max + 1 and len(families["Abs"]) == n_max
    rule = render_rule(lam, {i: "Q" for i in lam.indices}, {i: f"Lam{i}" for i in lam.indices})
    assert "(Π f : Lam1. Π a : Lam1. Q(f) → Q(a) → Q(App f a)) →" in rule

    trees = enumerate_trees(lam, 3)
    for i in lam.indices:
        assert {t.render() for t in trees[i]} == lambda_terms(int(i), n_max, 3)

    # Q n t: the free variables of t, all below n.  Abs at scope n binds
    # variable n of its body.
    Q = Predicate(trees_as_set(trees), {
        (i, t): (free_vars(t),) if free_vars(t) <= set(range(int(i))) else ()
        for i in lam.indices for t in trees[i]
    })
    table = {}
    for i in lam.indices:
        for t in trees[i]:
            node = in_ext_with_witnesses(t, Q)
            ws = [w for _, w in node.values()]
            if t.shape.startswith("Var_"):
                table[node] = frozenset({int(t.shape[4:])})
            elif t.shape == "Abs":
                table[node] = ws[0] - {int(i)}
            else:
                table[node] = ws[0] | ws[1]
    step = StepFunction.from_table(table)
    witnessed = 0
    for i in lam.indices:
        for t in trees[i]:
            assert induce(lam, step, t, pred=Q) is not None
            witnessed += 1
    record_property("detail", f"{witnessed} terms witnessed")


def in_ext_with_witnesses(t, Q):
    return ExtensionElement(t.index, t.shape, tuple(
        (jp, (child, Q[(child.index, child)][0])) for jp, child in t.children
    ))


@pytest.mark.criterion(11, "opreindexing is left adjoint to reindexing")
def test_c11_adjunction(record_property):
    rng = seeded(110)
    for _ in range(100):
        X = indexed_set({i: rng.randint(0, 3) for i in ("i", "j")})
        Y = indexed_set({i: rng.randint(1, 3) for i in ("i", "j")}, "y")
        f = random_map(rng, X, Y)
        P, Q = random_predicate(rng, X, 2), random_predicate(rng, Y, 2)
        left = sum(1 for _ in predicate_morphisms(opreindex_pred(f, P), Q))
        right = sum(1 for _ in predicate_morphisms(P, reindex_pred(f, Q)))
        assert left == right == count_fibre_morphisms(P, reindex_pred(f, Q))
    record_property("detail", "100 random (f, P, Q)")


@pytest.mark.criterion(12, "command line: round trip, stable goldens, exit codes")
def test_c12_cli(record_property, monkeypatch):
    corpus = sorted(FIXTURES.glob("*.yaml"))
    for path in corpus:
        once = serialize(load(path))
        assert serialize(parse(once, FIXTURES)) == once
    monkeypatch.chdir(FIXTURES)
    for name, argv, code in CASES:
        first, second = invoke(argv), invoke(argv)
        assert first == second
        assert first[0] == code
        assert first[1] == (GOLDEN / f"{name}.txt").read_text(encoding="utf-8")
    for argv in (["--bogus"], ["validate", "missing.yaml"],
                 ["enum", "--container", "nat", "--depth", "-1"]):
        assert invoke(argv)[0] == 2
    for path in sorted((FIXTURES / "invalid").glob("*.yaml")):
        assert invoke(["validate", str(path.relative_to(FIXTURES))])[0] == 1
    record_property("detail", f"{len(corpus)} documents, {len(CASES)} golden commands")
