"""Exact anti-concentration of inner products over hypercube subsets."""

from .distribution import (
    concentration_probability,
    cube_sum_distribution,
    direction_census,
    inner_product_distribution,
    interval_mass,
)
from .domain import (
    CubeSubset,
    IntegerDistribution,
    TwoCube,
    VectorSet,
    hypercube,
    make_two_cube,
    make_vector_set,
)
from .structure import r_ell, sidon_classify, solve_parameters, structure_profile

__all__ = [
    "CubeSubset",
    "IntegerDistribution",
    "TwoCube",
    "VectorSet",
    "concentration_probability",
    "cube_sum_distribution",
    "direction_census",
    "hypercube",
    "inner_product_distribution",
    "interval_mass",
    "make_two_cube",
    "make_vector_set",
    "r_ell",
    "sidon_classify",
    "solve_parameters",
    "structure_profile",
]
