"""Exact unitary decompositions of Kraus operators and single-ancilla channel sampling."""

__version__ = "0.1.0"

from .channels import (  # noqa: E402
    AdcParams,
    CPTPReport,
    KrausChannel,
    apply_channel_exact,
    load_channel,
    make_adc,
    validate_cptp,
)
from .decompose import (  # noqa: E402
    KrausDecomposition,
    UnitaryExpansion,
    approximate_expansion,
    decompose_channel,
    decompose_kraus,
)
from .interpolation import (  # noqa: E402
    InterpolationProblem,
    analytic_two_point,
    solve_exact,
    unique_eigenvalues,
)
from .linalg import GeneratorPair, Spectrum, expm_normal, hermitian_eig, sa_split  # noqa: E402
from .optimize import (  # noqa: E402
    OptimizationResult,
    OptimizerConfig,
    l1_objective,
    local_minimize,
    multistart_optimize,
    sqr,
)
from .scu import (  # noqa: E402
    EstimateResult,
    Observable,
    TermTable,
    allocate_shots,
    build_term_table,
    estimate_observable,
    exact_expectation,
    reconstruct_density_matrix,
    term_outcome_distribution,
)
