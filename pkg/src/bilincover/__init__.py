"""Hull machinery for mixed-integer bilinear covering rows.

The package provides closed-form cut generation and linear-time separation
for a single covering row (with or without integer bounds), exhaustive hull
oracles for small instances, exact linear optimization over the row, a
small bounded-variable simplex, and a cutting-plane driver that tightens
LP relaxations of trim-loss style problems.
"""

from .model import (
    DeltaMap,
    Instance,
    LinearObjective,
    Point,
    TrimLossInstance,
    ValidationError,
    apply_delta_transform,
    eval_bilinear,
    validate_instance,
    validate_trimloss,
)
from .separation import (
    BoundViolation,
    ColumnMin,
    Cut,
    FacetCoeff,
    SeparationResult,
    column_term,
    facet_coeffs,
    min_column_bounded,
    separate_bounded,
    separate_unbounded,
)
from .hull import (
    CapExceeded,
    Membership,
    enumerate_extreme_points,
    enumerate_facets,
    membership,
)
from .optimize import (
    OptResult,
    OptStatus,
    near_optimal_witness,
    optimize_bounded,
    optimize_column,
    optimize_fixed_column,
    optimize_unbounded,
)
from .simplex import (
    LpProblem,
    LpSolution,
    LpStatus,
    NumericalError,
    SimplexSolver,
    solve_lp,
)
from .cutplane import (
    CutFamily,
    IterationLog,
    IterationRecord,
    build_root_relaxation,
    run_cutting_plane,
)
from .fileio import gen_trimloss, parse_instance, write_instance

__version__ = "0.1.0"
