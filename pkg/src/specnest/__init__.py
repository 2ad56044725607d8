"""Curve-ordered normal + nilpotent matrix decomposition and its calculus."""

from . import serialize
from .curve import HilbertCurveMap, curve_point, first_hit_time
from .decompose import (
    ConvergenceReport,
    DecompositionResult,
    convergence_report,
    decompose,
    expectation_dyadic,
    expectation_full,
    pinch_commutant,
)
from .detbrown import (
    DensityGrid,
    SpectralMeasure,
    block_det_identity_check,
    brown_density_grid,
    brown_measure_exact,
    fk_determinant,
    regularized_log_det,
)
from .ensembles import (
    EnsembleSpec,
    FromFile,
    Ginibre,
    Jordan,
    NormalPlusNilpotent,
    UpperTriangularRandom,
    generate,
)
from .hsnest import (
    Ball,
    CurveSegment,
    Predicate,
    build_nest,
    default_curve,
    growth_subspace_check,
    hs_projection,
    power_limit_operator,
)
from .majorize import (
    DEFAULT_GAUGES,
    CustomGauge,
    LogShift,
    Power,
    hlp_transfer,
    log_plus_equivalence_check,
    log_submajorizes,
    pinch_log_check,
    shift_lemma_check,
    submajorizes,
    tau_log_plus,
    weyl_check,
)
from .matrices import (
    ProjectionNest,
    StepFunction,
    distribution_function,
    normalized_trace,
    operator_norm,
    ordered_schur,
    singular_value_function,
    singular_values,
    spectral_nest,
)

__version__ = "0.1.0"
