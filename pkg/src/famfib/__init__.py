"""Datatype-generic induction and coinduction over finite indexed sets."""
from .coinductive import (
    CoinductionReport,
    EquivPartition,
    FiniteCoalgebra,
    Relation,
    check_coinduction_premise,
    eq_relation,
    equiv_closure,
    kernel_of_map,
    largest_bisimulation,
    lift_relation_container,
    lift_relation_generic,
    lift_relation_pfin,
    minimize,
    quotient,
)
from .container import (
    ContainerFunctor,
    ExtensionElement,
    FinitaryFunctor,
    IndexedContainer,
    PfinFunctor,
    PfinProdFunctor,
    as_functor,
    extension,
    extension_map,
    pfin_functor,
    pfin_prod_functor,
    validate_container,
)
from .errors import (
    BaseMismatchError,
    ContainerError,
    FamfibError,
    FoldError,
    InductionError,
    SpecError,
    WellFormednessError,
)
from .finset import (
    STAR,
    FinIndexedSet,
    IndexedMap,
    Predicate,
    comprehension,
    opreindex_pred,
    predicate_morphisms,
    reindex_pred,
    render,
    truth_predicate,
)
from .inductive import (
    AlgebraTable,
    InductionReport,
    Premise,
    StepFunction,
    WTree,
    check_induction_soundness,
    container_witness,
    enumerate_trees,
    fold,
    in_ext,
    in_tree,
    induce,
    induction_premises,
    lift_predicate_container,
    lift_predicate_generic,
    render_rule,
)
from .stdlib import (
    functor_from_ref,
    lam_container,
    lts_functor,
    nat_container,
    odds_evens_container,
)

__version__ = "0.1.0"
