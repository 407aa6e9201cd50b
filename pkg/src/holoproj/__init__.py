"""Exact q-series engine and verification toolkit for small-divisor /
holomorphic-projection identities."""

from .rings import CyclotomicNumber, Rational, cyc, value_from_json, value_to_json
from .characters import (
    CharacterTableError,
    DirichletCharacter,
    char_conjugate,
    char_from_spec,
    char_from_table,
    char_inverse,
    char_kronecker,
    char_product,
)
from .qseries import QSeries, SeriesRangeError
from .theta import theta_power_direct, theta_power_series, theta_series
from .smalldiv import (
    ABPair,
    CharacterParityError,
    CharacterPlacement,
    DivisorTuple,
    MultiIndex,
    ab_substitution,
    divisor_sum,
    divisor_tuples,
    sigma_sm,
    sigma_sm_classical,
    small_divisors,
)
from .jacobi import (
    DegenerateRecurrenceError,
    HypergeomPoleError,
    UnivariatePoly,
    jacobi_hypergeom,
    jacobi_poly,
    jacobi_recurrence,
)
from .kernel import (
    BivariateLaurent,
    ModularMeta,
    NonSquareArgumentError,
    ProjectionKernel,
    WeightData,
    WeightError,
    kernel_bivariate,
    kernel_eval,
    modular_meta,
    parallelogram_check,
    projection_kernel,
    verify_closed_forms,
    weights_for_dim,
)
from .projection import (
    CalibrationInstance,
    CalibrationResult,
    FullSideResult,
    OddDimensionError,
    ProjectionConfig,
    ResidualReport,
    calibrate_constants,
    eisenstein_e2,
    full_pairs_side,
    lemma_gap_witnesses,
    ordered_pairs_side,
    residual_report,
    sigma_side,
)
from .numeric import (
    EichlerCalibration,
    FMinusValue,
    UpperHalfPoint,
    XiCheckResult,
    calibrate_eichler,
    eichler_integral,
    eval_f_minus,
    inc_gamma,
    theta_numeric,
    xi_check,
    xi_finite_difference,
)

__version__ = "0.1.0"
