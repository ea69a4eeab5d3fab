"""Equilibrium toolkit for finite games with set-valued priors."""

from .config import DEFAULT, Tolerances
from .dist import (
    DiscreteDistribution,
    GridError,
    GridTooLargeError,
    LatticeConstructionError,
    SupportGrid,
    dirac,
    expectation,
    lattice_join,
    lattice_meet,
    mix,
    product,
    pushforward,
    stochastic_leq,
)
from .game import (
    AmbiguityAttitude,
    GameSpec,
    StrategyProfile,
    ValidationError,
    reduce_traditional,
    scenario_a_priors,
    scenario_b_priors,
)
from .payoffvec import (
    FiniteKernel,
    PayoffDistVector,
    action_payoff_vector,
    integrate_kernel,
    kernel,
    strategy_payoff_vector,
)
from .satisfaction import check_shape, prefers, s0, satisfaction
from .bestresponse import (
    BestResponseResult,
    action_best_set,
    agent_form,
    dist_best_response,
    dist_best_response_grid,
    is_action_best_response,
)
from .equilibrium import (
    EquilibriumReport,
    NoConvergence,
    best_response_iteration,
    enumerate_pure_equilibria,
    pure_equilibrium_indices,
    robustness_probe,
    verify_profile,
)
from .monotone import (
    MonotoneProfile,
    ParametricFamily,
    check_increasing_differences,
    check_monotone_assumptions,
    comparative_statics_sweep,
    tarski_iterate,
)
from .models import AuctionSpec, PricingSpec, build_auction, build_lo_auction, build_pricing_game

__version__ = "0.1.0"
