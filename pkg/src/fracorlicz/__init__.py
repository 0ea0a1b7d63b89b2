"""Young functions, Schwarz symmetrization and fractional Orlicz-Sobolev
seminorms, with numerical certificates for the domain rearrangement
inequalities."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    CaseHypothesisFails,
    EmptyDomain,
    FracOrliczError,
    Inconclusive,
    Indistinguishable,
    MaximizerDiverged,
    NonIntegrableSingularity,
    NonYoung,
    OnBoundary,
    OutsideDomain,
    TooCoarse,
)
from .geometry import (  # noqa: F401
    Domain,
    GridFunction,
    Lattice,
    inscribed_ball,
    schwarz_rearrange,
    symmetric_difference_measure,
    symmetrized_set,
)
from .quadrature import (  # noqa: F401
    CubatureSpec,
    Estimate,
    double_integral,
    exterior_tail_integral,
    radial_comparison_check,
)
from .seminorm import (  # noqa: F401
    SeminormRequest,
    cross_term,
    fractional_request,
    modular,
    seminorm_domain,
    seminorm_fullspace,
)
from .theorems import (  # noqa: F401
    BumpSpec,
    build_bump,
    decomposition_residual,
    hardy_quotient,
    verify_comparison,
    verify_counterexample,
)
from .young import (  # noqa: F401
    KernelSpec,
    YoungFunction,
    beta,
    classify_theorem2_case,
    complementary,
    delta2_constant,
    exponent_bounds,
    kernel_conditions_check,
    legendre_identity_residual,
    make_young,
    two_sided_scaling_check,
)
