"""Generating graphs of finite groups, chief-series degree bounds, tensor
products of generating graphs and towers of finite quotients."""
from .caps import Caps, caps_override, get_caps, set_caps
from .errors import (
    CapExceeded,
    GenGraphError,
    LemmaViolation,
    LiftNotFound,
    ParityObstruction,
    PreconditionError,
    SpecError,
    UnsupportedGroup,
)
from .gen_graph import (
    GraphView,
    adjacent,
    degree,
    degrees,
    export,
    generating_graph,
    generation_matrix,
    generation_row,
    graph_metrics,
    neighborhood,
    non_isolated,
    swap_graph,
    verify_swap_refinement,
)
from .group_core import Group, Subgroup, build_group, cached_group, chief_series, parse_spec
from .local_degrees import (
    degree_factorization,
    diam2_criterion,
    gaschutz_lift,
    local_degree,
    phi_independence,
    verify_degree_bound,
)
from .product_graphs import ProductGraph, lift_path, power_adjacent, product_distance, separation_witnesses
from .profinite_tower import build_tower, degree_growth, delta_p, measure_v, v_characterization, v_consistency

__version__ = "0.1.0"
