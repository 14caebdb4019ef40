"""Certification, potential synthesis, and fixed-point solving for
contractive selfmap pairs on metric spaces."""

from .comparison import (
    SUM_TOL,
    VALUE_TOL,
    ComparisonFunction,
    Linear,
    PropertyReport,
    SeriesBoundInput,
    Staircase,
    Table,
    build_staircase,
    check_b03_sequence,
    check_coercive,
    check_regressive,
    check_superadditive,
    coercivity_exact,
    compute_g,
    eval_phi,
    eval_psi,
    lemma1_bound,
    piece_lower_bounds,
    superadditivity_exact,
)
from .space import (
    AffineMap,
    EuclideanSpace,
    FiniteMetricSpace,
    Orbit,
    ProductOrbit,
    SelfMap,
    Space,
    TableMap,
    identity_map,
    orbit,
    product_orbit,
    validate_metric,
)
from .certify import (
    Certificate,
    MatrixPotential,
    PointFunction,
    Potential,
    TablePointFunction,
    WeightedNormPointFunction,
    WeightedNormsPotential,
    Witness,
    bhakta_to_main,
    dien_to_main,
    verify_bhakta_basu,
    verify_caristi,
    verify_dien,
    verify_main,
    verify_sum_form,
)
from .synth import ExcessField, SynthesisResult, excess_field, minimality_oracle, synthesize_gamma
from .solve import (
    SeriesTrace,
    SolveReport,
    apriori_bound,
    caristi_descent,
    common_fixed_points_bruteforce,
    dual_iterate,
    series_trace,
)
from .cli import InstanceFile, generate_instance, load_instance, run_command
from .errors import (
    CertificateMissingError,
    DomainExceededError,
    FixpairError,
    InstanceFormatError,
    InsufficientCoverageError,
    InvalidKnotsError,
    NonCoerciveEvidenceError,
    PropertyNotExactError,
    RetryBudgetExhaustedError,
    UnsupportedSpaceError,
)

__version__ = "0.1.0"
