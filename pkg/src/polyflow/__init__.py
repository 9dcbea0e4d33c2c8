"""Polygons with prescribed edge lengths and the gradient flow of their signed area."""

from .calculus import (
    D,
    EdgeField,
    I,
    K,
    M,
    VertexField,
    center,
    conj_c,
    derivative_e2v,
    derivative_v2e,
    diag,
    hermitian,
    integrate_e2v,
    integrate_e2v_solve,
    integrate_v2e,
    midpoint_e2v,
    midpoint_v2e,
    real_inner,
    smooth_k,
)
from .cyclic import Side, b_kernel, edge_slot
from .errors import (
    CollinearPoints,
    CollinearPolygon,
    ConstraintViolation,
    DuplicatePoints,
    FieldMismatch,
    InadmissibleLengths,
    InitFailure,
    NewtonDivergence,
    NonPositiveLength,
    NotCocyclic,
    PolyflowError,
    ZeroEdge,
)
from .flow import (
    CriticalCluster,
    FlowConfig,
    FlowResult,
    FlowTrajectory,
    StepRecord,
    StopReason,
    enumerate_critical,
    euler_step,
    newton_reproject,
    random_constrained_polygon,
    rotation_normalize,
    run_flow,
)
from .geometry import (
    AT_INFINITY,
    Circle,
    CircleFit,
    area_differential,
    circumcenter,
    developed_perimeter,
    developed_polygon,
    fit_circle,
    is_collinear,
    oriented_area,
)
from .relations import (
    betti_sum_bound,
    brahmagupta_residual,
    check_cluster_relations,
    delta_n,
    heron_residual,
)
from .shape_space import (
    LengthSpec,
    area_gradient,
    check_free_edge_critical,
    check_perimeter_constrained_critical,
    cot_multipliers,
    criticality,
    lagrange_multipliers,
    make_length_spec,
    membership_residual,
    project_params,
    stationarity_residual,
    tangent_lift,
    turning,
)

__version__ = "0.1.0"
