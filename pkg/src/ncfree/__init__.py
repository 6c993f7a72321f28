"""ncfree: uniform non-crossing partitions, their large-deviations rate
functions, and a free-cumulant support-edge solver."""

__version__ = "0.1.0"

from .catalan import (
    DyckPath,
    NonCrossingPartition,
    block_size_histogram,
    catalan_number,
    enumerate_dyck_paths,
    expected_block_count,
    expected_singleton_count,
    is_noncrossing,
    narayana,
    path_to_partition,
    partition_to_path,
)
from .edge import (
    EdgeResult,
    edge_objective,
    free_poisson_reference,
    moment_growth_estimate,
    solve_edge,
    solve_tilt_stationarity,
)
from .freeprob import (
    CumulantSpec,
    cumulants_from_moments,
    dilate,
    free_convolve,
    free_poisson,
    from_cumulants,
    levy_khintchine_cumulants,
    moments_from_cumulants,
    moments_from_cumulants_bruteforce,
    point_mass,
    semicircle,
    shift_first_cumulant,
    spec_from_json,
    uniform_symmetric,
    zeta_weighted_cumulants,
)
from .ldp import (
    PmfOnN,
    block_size_rate,
    block_size_rate_joint,
    bounded_lipschitz_distance,
    entropy,
    geometric_joint_rate,
    max_entropy_given_mean,
    relative_entropy_vs_geometric,
)
from .sampling import (
    ConditionedSampleTrace,
    EmpiricalStats,
    empirical_block_stats,
    sample_dyck_cycle,
    sample_dyck_rejection,
    sample_geometric_half,
    stream_rng,
)

__all__ = [name for name in dir() if not name.startswith("_")]
