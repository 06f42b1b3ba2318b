"""Shortest paths with independent, finite-support, integer random travel times."""
from ._backend import BACKEND
from .distribution import (
    PLUS_INFINITY,
    ZERO,
    Distribution,
    cdf,
    convolve,
    expectation,
    first_violation,
    from_pmf,
    leq_st,
    max_support,
    meet,
    min_support,
    point_mass,
)
from .graph import Arc, Instance, Path, dijkstra_to_destination, load, save, validate, zero_arc_transform
from .risk import RiskKind, RiskMeasure, evaluate
from .sota import build_upper_bound_lists, extract_lower_bounds, solve_sota
from .srcspp import Status, solve_srcspp
from .sspp import solve_sspp

__version__ = "0.1.0"
