"""Simulation of piecewise-smooth systems with sliding on switching manifolds
and their intersections."""

from .detect import (
    AttractiveSliding,
    CrossingRecord,
    DenseOutput,
    Grazing,
    Mixed,
    Transversal,
    classify_switch_point,
    detect_sign_changes,
    locate_switch_point,
)
from .errors import HybridSlideError, InvalidArgument, NumericFailure, PreconditionViolation
from .integrator import (
    SimConfig,
    SimTrace,
    SimulationFailed,
    TraceEvent,
    bathe_sliding_step,
    project_to_manifold,
    rk2_step,
    simulate,
)
from .model import (
    HybridModel,
    OnManifold,
    SwitchingFunction,
    build_sign_matrix,
    lie_derivative,
    normal_projection_matrix,
    region_index,
    relative_degree,
)
from .models import (
    Belt3Params,
    StickSlip2Params,
    make_case_study_1,
    make_case_study_2,
)
from .sliding import (
    ConvexWeights,
    SlidingRegime,
    exit_monitor,
    sliding_vector_field,
    sliding_weights,
    solve_alpha,
    solve_kappa,
)

__version__ = "0.1.0"
