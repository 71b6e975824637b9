"""Wigner-function statistics of chaotic quantum maps on compact phase spaces."""

from .errors import (
    DegenerateDistributionError,
    DegenerateLineError,
    EmptyInputError,
    EmptyStatisticsError,
    InvalidArgumentError,
    InvalidDimensionError,
    InvalidOperatorError,
    OutOfDomainError,
    WigstatError,
)
from .lines import (
    ClusterDistribution,
    SphereLineModel,
    StructureStats,
    TorusLineModel,
    WFLine,
    discrete_cluster_distribution,
    find_zeros,
    random_wfl,
    semicircle_variances,
    structure_statistics,
    wfl_sphere,
    wfl_torus,
)
from .spectral import (
    EigenSystem,
    empirical_cdf,
    excess_of_eigenstates,
    goe_ensemble_excess,
    propagator_matrix,
    unitary_eigensystem,
)
from .sphere import (
    SphereWigner,
    TopParams,
    coherent_state_sphere,
    gkq_coefficients,
    kicked_top_step,
    multipole_matrix,
    spherical_harmonic,
    sphere_quadrature,
    wigner_3j,
    wigner_sphere_equator,
    wigner_sphere_eval,
    wigner_sphere_grid,
)
from .states import QuantumState, RngStream, basis_state, random_state
from .stats import (
    Histogram,
    RelaxationSeries,
    StatsSummary,
    WeightedSamples,
    autocorrelation_torus,
    gaussian_reference,
    lyapunov_sawtooth,
    moments_and_excess,
    relaxation_scan,
    value_histogram,
)
from .torus import (
    TorusMapParams,
    TorusWigner,
    coherent_state_torus,
    fat_delta,
    kernel_matrix_torus,
    sawtooth_step,
    sym_indices,
    wigner_torus,
)

__version__ = "0.1.0"
