"""Small reference games used by the tests, the examples and the CLI."""

from __future__ import annotations

import numpy as np

from .dist import SupportGrid
from .game import AmbiguityAttitude, GameSpec
from .models import AuctionSpec, PricingSpec, build_auction, build_lo_auction, build_pricing_game
from .monotone import ParametricFamily

COIN_PRIORS = ((0.4, 0.6), (0.6, 0.4))


def _single_state_game(tables, attitudes_kind="traditional", name=""):
    """Normal-form game with one type per player and one state."""
    N = len(tables)
    shapes = np.asarray(tables[0]).shape
    grids = tuple((SupportGrid.indices(k),) for k in shapes)
    payoffs = tuple((np.asarray(t, dtype=float)[..., None],) for t in tables)
    atts = tuple((AmbiguityAttitude(attitudes_kind, ((1.0,),)),) for _ in range(N))
    return GameSpec((1,) * N, grids, payoffs, atts, tilde_grid=SupportGrid.line([0.0]), name=name)


def ambiguous_coin(kind: str = "alarmist") -> GameSpec:
    """One player bets on heads (action 0) or tails (action 1) of a coin of unknown bias.

    A correct bet pays 1. The prior set holds two biases, 0.4 and 0.6 on heads.
    """
    priors = COIN_PRIORS if kind != "traditional" else (COIN_PRIORS[0],)
    return GameSpec(
        type_counts=(1,),
        action_grids=((SupportGrid.indices(2),),),
        payoffs=((np.eye(2),),),
        attitudes=((AmbiguityAttitude(kind, priors),),),
        tilde_grid=SupportGrid.indices(2),
        name=f"ambiguous coin ({kind})",
    )


def matching_pennies() -> GameSpec:
    p0 = [[1.0, 0.0], [0.0, 1.0]]
    p1 = [[0.0, 1.0], [1.0, 0.0]]
    return _single_state_game([p0, p1], name="matching pennies")


PD_ROW = [[3.0, 0.0], [5.0, 1.0]]  # action 0 cooperates, 1 defects


def prisoners_dilemma() -> GameSpec:
    row = np.array(PD_ROW)
    return _single_state_game([row, row.T], name="prisoner's dilemma")


def prisoners_dilemma_ambiguous(kind: str = "alarmist") -> GameSpec:
    """Two-state dilemma; defection stays dominant in both states."""
    s0 = np.array(PD_ROW)
    s1 = np.array([[3.5, 0.5], [5.0, 1.2]])
    row = np.stack([s0, s1], axis=-1)
    col = np.stack([s0.T, s1.T], axis=-1)
    priors = ((0.3, 0.7), (0.7, 0.3))
    grids = ((SupportGrid.indices(2),), (SupportGrid.indices(2),))
    atts = ((AmbiguityAttitude(kind, priors),), (AmbiguityAttitude(kind, priors),))
    return GameSpec((1, 1), grids, ((row,), (col,)), atts, tilde_grid=SupportGrid.indices(2), name="ambiguous dilemma")


def threshold_game() -> GameSpec:
    """Risky action 0 pays 1 or 0, safe action 1 pays 0.96.

    The base priors put almost all mass on the good state, so the risky action
    is the unique equilibrium; moving priors 10% toward uniform makes the safe
    action strictly better, while a 1% move does not.
    """
    table = np.array([[1.0, 0.0], [0.96, 0.96]])
    priors = ((1.0, 0.0), (0.99, 0.01))
    return GameSpec(
        type_counts=(1,),
        action_grids=((SupportGrid.indices(2),),),
        payoffs=((table,),),
        attitudes=((AmbiguityAttitude.alarmist(priors),),),
        tilde_grid=SupportGrid.indices(2),
        name="threshold",
    )


# -- pricing ------------------------------------------------------------------

PRICING_STATES = (0.0, 0.5, 1.0)
PRICING_CHAIN = ((0.5, 0.3, 0.2), (0.3, 0.4, 0.3), (0.2, 0.3, 0.5))


def pricing_spec(points: int = 21, b_scale: float = 1.0, kind: str = "enterprising", singleton: bool = False) -> PricingSpec:
    """Symmetric duopoly, two demand types per firm, prices on ``[1, 3]``.

    Each type's prior set over the global demand shock is a two-element chain;
    the high type's chain sits above the low type's.
    """
    lo, mid, hi = (np.array(m) for m in PRICING_CHAIN)
    if singleton:
        sets_by_type = [[mid], [hi]]
    else:
        sets_by_type = [[lo, mid], [mid, hi]]
    tilde_sets = [[[s, s] for s in sets_by_type] for _ in range(2)]
    prices = np.linspace(1.0, 3.0, points).tolist()
    return PricingSpec(
        costs=[1.0, 1.0],
        price_levels=[prices, prices],
        b=[2.0 * b_scale, 2.0 * b_scale],
        c=[1.0, 1.0],
        d=[[0.0, 0.3], [0.3, 0.0]],
        e=[0.5, 0.5],
        f=[0.5, 0.5],
        g=[0.2, 0.2],
        type_counts=[2, 2],
        state_levels=list(PRICING_STATES),
        type_probs=[[0.5, 0.5], [0.5, 0.5]],
        tilde_sets=tilde_sets,
        kind=kind,
        name=f"pricing duopoly ({points} prices)",
    )


def pricing_game(points: int = 21, **kw) -> GameSpec:
    return build_pricing_game(pricing_spec(points, **kw))


def pricing_family(lambdas=(1.0, 1.1, 1.2, 1.3), points: int = 21) -> ParametricFamily:
    """Demand base scaled by the parameter."""
    return ParametricFamily(list(lambdas), lambda lam: pricing_game(points, b_scale=lam))


# -- auctions -------------------------------------------------------------------

AUCTION_BIDS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


def two_bidder_auction(rule: str = "first") -> GameSpec:
    """Known worths 1.0 and 0.4, one type each."""
    spec = AuctionSpec(
        n_bidders=2,
        type_count=1,
        bid_levels=AUCTION_BIDS,
        worth_levels=[[1.0], [0.4]],
        rule=rule,
        priors=[[[([1.0], [[1.0]])]], [[([1.0], [[1.0]])]]],
        kind="traditional",
        name=f"two-bidder {rule}-price auction",
    )
    return build_auction(spec)


LO_WORTHS = (0.2, 0.5, 0.8)
LO_BIDS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
LO_PRIORS = ((0.5, 0.3, 0.2), (0.2, 0.3, 0.5))


def lo_auction(kind: str = "alarmist", priors=LO_PRIORS) -> GameSpec:
    """Symmetric two-bidder auction, worths as types, two beliefs about the rival."""
    return build_lo_auction(LO_WORTHS, 2, LO_BIDS, [priors, priors], kind=kind)
