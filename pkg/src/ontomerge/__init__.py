"""Pushout-based merging of finite ontologies and the algebra of merging systems."""
from .algebra import (
    UNDEFINED,
    MergingSystem,
    NullExtendedSystem,
    TableSystem,
    UnknownElement,
    evaluate_merge,
    is_defined,
    natural_leq,
    null_extend,
)
from .canonical import CanonicalKey, canonical_form, find_isomorphism, isomorphic, short_key
from .category import (
    AlignmentPairHom,
    CoconeDoesNotCommute,
    Correspondence,
    PullbackResult,
    PushoutResult,
    VAlignmentPair,
    coproduct,
    derive_alignments,
    induced_merge_hom,
    mediating_hom,
    pullback,
    pushout,
)
from .closure import (
    ClosureResult,
    ClosureSystem,
    LimitExceeded,
    Limits,
    Repository,
    UnknownKey,
    compute_closure,
    provenance_of,
)
from .homsearch import BudgetExceeded, find_homomorphisms, has_homomorphism
from .ontology import (
    EMPTY,
    Concept,
    DomainMismatch,
    Homomorphism,
    InvalidHomomorphism,
    Ontology,
    Relation,
    ValidationError,
    check_hom_kind,
    compose_homs,
    identity_hom,
    validate,
)
from .poset import Poset, build_poset, poset_query
from .properties import (
    OrderRequired,
    PreconditionFailed,
    PropertyReport,
    check_order_theorem,
    check_property,
    verify_report,
)

__version__ = "0.1.0"
