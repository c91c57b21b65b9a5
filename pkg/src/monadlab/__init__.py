"""monadlab: a desk-scale laboratory for state-monad algebras over finite sets."""

from .finset import (
    ExpCodec,
    Factorization,
    FinSet,
    FinSetError,
    Morphism,
    MorphismClass,
    ProductCodec,
    classify,
    compose,
    curry,
    evaluation,
    exp_map,
    factorize,
    hom,
    hom_size,
    identity,
    morphism_from_dict,
    morphism_to_dict,
    pairing,
    product_map,
    uncurry,
)
from .statemonad import LawCheck, StateMonadCtx
from .algebra import (
    AlgebraMorphism,
    AlgebraViolation,
    SearchCeilingExceeded,
    TAlgebra,
    algebra_from_dict,
    algebra_morphism,
    algebra_to_dict,
    check_algebra,
    check_morphism,
    enumerate_algebras,
    free_algebra,
    iso_classes,
    morphism_witness,
)
from .monadicity import (
    BaseData,
    SectionRetraction,
    VerificationReport,
    base_iso,
    base_map,
    check_suite,
    compare_inverse,
    compare_is_algebra_map,
    compare_retraction,
    compare_section,
    empty_state_diagnostic,
    epi_section,
    extract_base,
    function_algebra,
    function_algebra_map,
    section_retraction,
    verify_monadicity,
)
from .equational import (
    FreeClasses,
    Lookup,
    RewriteLimitExceeded,
    StateAlgebra,
    Term,
    TermError,
    Update,
    Var,
    canonical_algebra,
    denote,
    format_term,
    free_classes,
    normalize,
    parse_term,
    random_term,
    state_algebra_violation,
    terms_equal,
    to_state_algebra,
    to_t_algebra,
)

__version__ = "0.1.0"
