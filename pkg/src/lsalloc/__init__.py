"""Allocation of n items to n agents over n rounds under the Latin square
constraint: approximation algorithms, value-parameterized solvers, exact
oracles, fairness checkers and hardness-family instance generators."""

from ._kernels import BACKEND, HAVE_COMPILED
from .complete_solver import CompleteApproxResult, solve_complete_approx
from .config_lp import (
    DualPrices,
    FractionalSolution,
    LpIterationLimit,
    marginals,
    price,
    solve_configuration_lp,
)
from .extension import ExtensionPreconditionError, extend, extend_allocation, rectangularize
from .fpt import ColorScheme, FptResult, OracleLimitError, solve_exact_enumeration, solve_fpt_value
from .instance import (
    EFFICIENCY_NOTIONS,
    FAIRNESS_NOTIONS,
    Allocation,
    Instance,
    agent_utilities,
    efficiency_check,
    egalitarian_welfare,
    fairness_check,
    is_bundle,
    is_feasible,
    uniform_random_instance,
    utilitarian_welfare,
)
from .matching import BipartiteMultigraph, WeightedBipartiteGraph, edge_color, max_weight_matching
from .oracle import binary_partial_emax_positive, exact_umax_emax, exists_fair_complete
from .rounding import (
    RoundingOutcome,
    conditional_expectation,
    expected_welfare,
    round_derandomized,
    round_randomized,
)

__version__ = "0.1.0"
