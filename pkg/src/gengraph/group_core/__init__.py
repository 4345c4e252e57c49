"""Finite groups as index tables, plus subgroup and chief-series machinery."""
from .build import build_group, cached_group, direct_product, klein_coordinates, klein_element
from .group import Group, Subgroup, closure_mask, generates, greedy_generators
from .lattice import (
    ChiefFactor,
    ChiefSeries,
    Quotient,
    all_subgroups,
    center,
    centralizer,
    chief_series,
    closure,
    conjugacy_classes,
    d_rel,
    frattini,
    is_soluble,
    maximal_subgroups,
    min_generating_set,
    minimal_normal_subgroups,
    normal_closure,
    normal_subgroups,
    quotient,
    subgroup_from_mask,
)
from .spec import GroupSpec, parse_spec, spec_order

__all__ = [
    "ChiefFactor", "ChiefSeries", "Group", "GroupSpec", "Quotient", "Subgroup",
    "all_subgroups", "build_group", "cached_group", "center", "centralizer", "chief_series",
    "closure", "closure_mask", "conjugacy_classes", "d_rel", "direct_product", "frattini",
    "generates", "greedy_generators", "is_soluble", "klein_coordinates", "klein_element",
    "maximal_subgroups", "min_generating_set", "minimal_normal_subgroups", "normal_closure",
    "normal_subgroups", "parse_spec", "quotient", "spec_order", "subgroup_from_mask",
]
