"""Exact and numeric tools for the Painlevé equations, their Hamiltonian forms and Bäcklund symmetries."""

from .algebra import (
    Derivation,
    Kind,
    Polynomial,
    RationalFunction,
    Var,
    arith,
    differentiate,
    is_integer_constant,
    normalize,
    poly_gcd,
    sqrt_in_field,
    substitute,
    symbol,
)
from .backlund import (
    GENERATORS,
    act_params,
    act_solution,
    apply_word,
    in_hyperplane_set,
    orbit_search,
    parse_word,
    translation_coset_equal,
    verify_solution_preservation,
)
from .classify import (
    boalch_coset,
    classify_PII,
    classify_PIV,
    classify_PV,
    classify_SIIIp,
    genericity_report,
    strongly_minimal_PVI,
)
from .errors import PainleveError, UsageError
from .parser import format, lower, parse
from .systems import (
    Family,
    ParamTuple,
    build_equation,
    convert_params,
    invert_pvi,
    lift_to_hamiltonian,
    reduce_to_second_order,
    residual_second_order,
    residual_system,
)

__version__ = "0.1.0"
