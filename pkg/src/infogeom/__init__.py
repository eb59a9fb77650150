"""Desk-scale numerics for measures, statistics, and Fisher-metric machinery.

The package provides finite positive measures on discrete sets and
quadrature-discretized intervals, statistics between them with exact
pushforwards and conditional expectations, computable fragments of the mixed
topology on function-measure pairs, parametrized measure models with scores
and integrability scans, covariant tensor fields with pullbacks (Fisher
metric, symmetric score third moment), and a battery of theorem-level
verification checks behind the ``infogeom`` CLI.
"""

from .measures import (
    DiracCombination,
    DiscretePartition,
    DiscreteSpace,
    GridFunction,
    IntervalPartition,
    IntervalSpace,
    Measure,
    PartitionCoverageError,
    SpaceMismatchError,
    StepFunction,
    common_refinement,
    dirac_approximate,
    discrete_space,
    dyadic_partitions,
    grid_function,
    integrate,
    interval_space,
    lebesgue,
    log_interval_space,
    lp_norm,
    rescale_reference,
    weak_contains,
)
from .statistic import (
    ContractionReport,
    Statistic,
    binning_statistic,
    compose,
    constant_statistic,
    contraction_report,
    identity_statistic,
    pushforward_function,
    pushforward_measure,
    relabel_statistic,
    zero_mass_fibers,
)
from .topology import (
    ApproximantError,
    ConvergenceReport,
    HolderBoundReport,
    MixedNeighborhood,
    MixedPoint,
    WeakNeighborhood,
    converges_mixed,
    holder_bound_check,
    mixed_contains,
    pushforward_map_continuity_probe,
)
from .models import (
    DomainBoundsError,
    IntegrabilityScanReport,
    NonPositiveDensityError,
    ParametrizedModel,
    TangentDirection,
    bernoulli,
    categorical,
    density_at,
    exp_inverse_power,
    exponential_family,
    factorized,
    factorized_projection,
    integrability_norm,
    integrability_scan,
    laplace_location,
    regularity_probe,
    score,
    with_rescaled_reference,
)
from .tensors import (
    CovariantTensorField,
    StrongContinuityReport,
    WeakFunctional,
    amari_chentsov,
    constant_weight,
    custom_tensor,
    evaluate_tensor,
    fisher,
    fisher_metric_field,
    kernel_two_tensor,
    mass_power_weight,
    pullback,
    scaled_product_tensor,
    strong_continuity_probe,
)
from .checks import (
    AcChainReport,
    CongruentEmbedding,
    LossReport,
    UniquenessReport,
    ac_monotonicity_probe,
    chentsov_invariance_residual,
    monotonicity_check,
    reference_independence_check,
    sufficiency_check,
    uniqueness_limit_probe,
)

__version__ = "0.1.0"
