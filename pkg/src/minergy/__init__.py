"""Minimum-energy data routing in one-dimensional sensor networks."""

from .errors import *  # noqa: F401,F403
from .graphs import (
    DIRECT,
    DIRECT_PERTURBED,
    NEXT_HOP,
    NEXT_HOP_PERTURBED,
    GraphKind,
    Solution,
    TransmissionGraph,
    enumerate_canonical,
    n_prime,
    realize,
    split,
)
from .instances import load_instance, parse_instance, serialize_instance
from .model import (
    Additivity,
    FlowMatrix,
    InverseGain,
    Monomial,
    MultiTerm,
    NetworkInstance,
    TwoTerm,
    check_feasible,
    edge_cost,
    superadditivity_check,
    total_energy,
)
from .oracle import RoutingTree, enumerate_trees, oracle_min
from .sinr import (
    PowerGain,
    RadioParams,
    TwoTermGain,
    capacity,
    interference_penalty_check,
    make_schedule,
    reduce_to_flow,
    sinr_value,
)
from .solver import solve, solve_monomial, solve_multiterm, solve_twoterm
from .thresholds import (
    ThresholdTable,
    classify_exponent,
    exponent_table,
    find_a_root,
    lambda_crossover,
    lambda_table,
)

__version__ = "0.1.0"
