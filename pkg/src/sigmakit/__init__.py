"""sigmakit: Sigma-invariant membership and finite models for free complexes over Laurent rings.

The library works with finite free based chain complexes over ``R[Z^r]``
(``R`` one of Z, Q, F_p) and answers, for a character ``xi``, whether the
complex is ``k``-contractible after completing towards ``xi``.
"""

from .lattice import (
    GF,
    QQ,
    ZZ,
    Character,
    CoefficientRing,
    GroupRingElem,
    NotAUnit,
    diam,
    laurent,
    parse_element,
    xi_valuation,
)
from .series import NovikovSeries, novikov_invert
from .chain import (
    BasedFreeComplex,
    GradedMap,
    Matrix,
    SigmaCertificate,
    Valuation,
    certificate_shift,
    chain_homotopy,
    chain_map,
    compose,
    iterate,
    iterate_certificate,
    standard_valuation,
    tensor_coefficients,
    validate,
    verify_certificate,
)
from .laurent_pid import AbelianGroup, homology_lambda, integer_homology
from .builders import (
    BUILTIN_NAMES,
    PresentationInput,
    builtin,
    fox_derivative,
    ground_complex,
    mapping_torus,
    presentation_complex,
    random_complex,
)
from .decide import (
    CatBound,
    Conclusion,
    Movability,
    MovabilityResult,
    NoWitness,
    NotInSigma,
    SigmaReport,
    SigmaVerdict,
    Status,
    cat_upper_bound,
    movable_to_infinity,
    promote,
    sigma_membership,
    sphere_scan,
    verify_no_witness,
)
from .finite_type import (
    DominationResult,
    MissingDirection,
    assemble_atlas,
    check_resolution,
    finite_type_reduce,
    push_maps,
    total_complex_assemble,
    verify_domination,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
