"""Positivity and S-lemma certificates for quadratic matrix-valued NC polynomials."""

from .errors import (
    AsymmetricCoefficients,
    DimensionTooLarge,
    InvalidInput,
    NCSLemmaError,
    NotGloballyPSD,
    NotPSD,
    ParseError,
    PreconditionViolated,
    ShapeMismatch,
    SlaterViolated,
    SplitFailed,
    SymmetryBroken,
    VerificationFailed,
    WitnessConstructionFailed,
)
from .linalg import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DEFAULT_TOL_STRICT,
    EigDecomp,
    is_psd,
    kron,
    maximize_spectral,
    psd_factor,
    psd_project,
    spectraplex_project,
    sym_eig,
)
from .poly import (
    MatTuple,
    NCQuadPoly,
    ScalarQuad,
    coefficient_matrix,
    direct_sum_repeat,
    evaluate,
    evaluate_compressed,
    evaluate_hereditary,
    new_quad_poly,
    new_scalar_quad,
    new_tuple,
    pad_coefficients,
    scalar_to_nc,
)
from .cpmaps import (
    ChoiMatrix,
    ShuffleMatrix,
    apply_map,
    apply_map_blockwise,
    apply_map_to_poly,
    choi_from_action,
    gram,
    identity_choi,
    is_completely_positive,
    new_choi,
    rearrange,
    shuffle,
    trace_choi,
)
from .positivity import (
    PositivityReport,
    ScalarSLemmaResult,
    SOSFactor,
    evaluate_factor,
    is_globally_psd,
    rank_one_split,
    scalar_slemma,
    sos_factor,
    witness_tuple,
)
from .slemma import (
    CPCertificate,
    CertifySearch,
    Counterexample,
    Decision,
    HereditaryCounterexample,
    HomogenizationResult,
    SeparatorSearch,
    build_counterexample,
    build_counterexample_hereditary,
    certify,
    decide,
    decide_hereditary,
    find_separator,
    homogenize,
    homogenized_poly,
    reconcile,
    verify_certificate,
    verify_counterexample,
)

__version__ = "0.1.0"
