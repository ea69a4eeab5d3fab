"""Builders for auction and price-competition games.

Auctions integrate the uniform tie-breaking lottery analytically: a bidder
tied with ``k - 1`` others at the top bid wins with probability ``1/k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dist import DiscreteDistribution, SupportGrid
from .game import (
    AmbiguityAttitude,
    GameSpec,
    ValidationError,
    scenario_a_priors,
    selections_to_arrays,
)

STATE_CAP = 10**6
RULES = ("first", "second")


def win_shares(bids: np.ndarray) -> np.ndarray:
    """Expected win indicator per bidder; ``bids`` has shape ``(..., N)``."""
    top = bids.max(axis=-1, keepdims=True)
    winners = bids == top
    return winners / winners.sum(axis=-1, keepdims=True)


def _bid_profiles(bid_levels: Sequence[np.ndarray]) -> np.ndarray:
    mesh = np.meshgrid(*bid_levels, indexing="ij")
    return np.stack(mesh, axis=-1)  # (|A_1|, ..., |A_N|, N)


def _auction_utility(bids, worth, n, rule, loser_payment):
    """Utility of bidder ``n`` per bid profile for a given worth."""
    share = win_shares(bids)[..., n]
    others = np.delete(bids, n, axis=-1)
    if rule == "first":
        price = bids[..., n]
    else:
        price = others.max(axis=-1) if others.shape[-1] else np.zeros(bids.shape[:-1])
    u = share * (worth - price)
    if loser_payment is not None:
        u = u - (1.0 - share) * np.vectorize(loser_payment, signature="(),(k)->()")(bids[..., n], others)
    return u


@dataclass
class AuctionSpec:
    """Sealed-bid auction with types informing beliefs about worths.

    ``worth_levels[n]`` is bidder ``n``'s worth grid; the state is the worth
    profile. ``priors[n][t_n]`` is a list of ``(p, nu)`` pairs: ``p`` over
    opponents' type profiles and ``nu`` of shape ``(|T_-n|, |worth profiles|)``.
    ``loser_payment(own_bid, other_bids)`` charges losing bidders (none by default).
    """

    n_bidders: int
    type_count: int
    bid_levels: Sequence[float]
    worth_levels: Sequence[Sequence[float]]
    rule: str = "first"
    priors: Sequence = ()
    kind: str = "alarmist"
    loser_payment: Callable | None = None
    name: str = "auction"


def build_auction(spec: AuctionSpec) -> GameSpec:
    if spec.rule not in RULES:
        raise ValidationError(f"pricing rule must be one of {RULES}")
    N, T = spec.n_bidders, spec.type_count
    if len(spec.worth_levels) != N:
        raise ValidationError("need one worth grid per bidder")
    tilde = SupportGrid(tuple(tuple(w) for w in spec.worth_levels))
    n_opp = T ** (N - 1)
    if n_opp * tilde.size > STATE_CAP:
        raise ValidationError(f"{n_opp * tilde.size} states per player-type exceeds the cap {STATE_CAP}")
    bids = SupportGrid.line(spec.bid_levels)
    profiles = _bid_profiles([bids.levels] * N)
    type_counts = (T,) * N
    n_profiles = T**N
    payoffs = []
    for n in range(N):
        per_state = np.stack(
            [_auction_utility(profiles, w[n], n, spec.rule, spec.loser_payment) for w in tilde.points],
            axis=-1,
        )
        payoffs.append(tuple(per_state for _ in range(n_profiles)))
    attitudes = []
    for n in range(N):
        row = []
        for tn in range(T):
            pairs = spec.priors[n][tn]
            if not pairs:
                raise ValidationError(f"bidder {n} type {tn} has no priors")
            ps = [np.asarray(p, dtype=float) for p, _ in pairs]
            nus = [np.asarray(nu, dtype=float).reshape(n_opp, tilde.size) for _, nu in pairs]
            if all(np.array_equal(ps[0], p) for p in ps):
                row.append(AmbiguityAttitude.factored(spec.kind, ps[0], nus))
            else:
                flat = [(p[:, None] * nu).ravel() for p, nu in zip(ps, nus)]
                row.append(AmbiguityAttitude(spec.kind, tuple(flat)))
        attitudes.append(row)
    return GameSpec(
        type_counts=type_counts,
        action_grids=tuple((bids,) * T for _ in range(N)),
        payoffs=tuple(payoffs),
        attitudes=attitudes,
        tilde_grid=tilde,
        name=spec.name,
    )


def build_lo_auction(
    worth_levels: Sequence[float],
    n_bidders: int,
    bid_levels: Sequence[float],
    prior_sets: Sequence[Sequence],
    rule: str = "first",
    kind: str = "alarmist",
    name: str = "lo_auction",
) -> GameSpec:
    """Auction whose types are the bidders' own worths.

    ``prior_sets[n]`` lists distributions over opponents' worth profiles
    (lexicographic over ``worth_levels``), shared by all of bidder ``n``'s
    types. There is no residual state, so the state grid is a single point.
    """
    if rule not in RULES:
        raise ValidationError(f"pricing rule must be one of {RULES}")
    N, W = n_bidders, len(worth_levels)
    n_opp = W ** (N - 1)
    if n_opp > STATE_CAP:
        raise ValidationError(f"{n_opp} opponent worth profiles exceeds the cap {STATE_CAP}")
    worths = np.asarray(worth_levels, dtype=float)
    bids = SupportGrid.line(bid_levels)
    profiles = _bid_profiles([bids.levels] * N)
    tilde = SupportGrid.line([0.0])
    payoffs = []
    for n in range(N):
        tabs = []
        for t in itertools.product(range(W), repeat=N):
            tabs.append(_auction_utility(profiles, worths[t[n]], n, rule, None)[..., None])
        payoffs.append(tuple(tabs))
    attitudes = []
    for n in range(N):
        qs = [np.asarray(q, dtype=float).reshape(n_opp) for q in prior_sets[n]]
        if not qs:
            raise ValidationError(f"bidder {n} has an empty prior set")
        if kind == "traditional" and len(qs) == 1:
            row = [AmbiguityAttitude.traditional(qs[0]) for _ in range(W)]
        else:
            row = [AmbiguityAttitude(kind, tuple(qs)) for _ in range(W)]
        attitudes.append(row)
    return GameSpec(
        type_counts=(W,) * N,
        action_grids=tuple((bids,) * W for _ in range(N)),
        payoffs=tuple(payoffs),
        attitudes=attitudes,
        tilde_grid=tilde,
        name=name,
    )


@dataclass
class PricingSpec:
    """Price competition with demand ``b - c a_n + sum d a_m + e t + f w + g t w``.

    Types are valued ``1..type_counts[n]``. ``type_probs[n]`` is firm ``n``'s
    belief over opponents' type profiles (the same for all its types);
    ``tilde_sets[n][t_n][j]`` is the prior set over the state grid for the
    ``j``-th opponent type profile. The attitude's vector set is the monotone
    selections of those sets.
    """

    costs: Sequence[float]
    price_levels: Sequence[Sequence[float]]
    b: Sequence[float]
    c: Sequence[float]
    d: Sequence[Sequence[float]]
    e: Sequence[float]
    f: Sequence[float]
    g: Sequence[float]
    type_counts: Sequence[int]
    state_levels: Sequence[float]
    type_probs: Sequence[Sequence[float]] = ()
    tilde_sets: Sequence = ()
    kind: str = "enterprising"
    name: str = "pricing"

    def __post_init__(self):
        N = len(self.costs)
        for key in ("b", "c", "e", "f", "g"):
            vals = np.asarray(getattr(self, key), dtype=float)
            if vals.shape != (N,) or np.any(vals <= 0):
                raise ValidationError(f"constant {key} must hold {N} positive values")
        d = np.asarray(self.d, dtype=float)
        if d.shape != (N, N):
            raise ValidationError(f"cross-price matrix must be {N} x {N}")
        off = d[~np.eye(N, dtype=bool)]
        if np.any(off <= 0):
            raise ValidationError("cross-price effects must be positive")
        for n, levels in enumerate(self.price_levels):
            if min(levels) < self.costs[n]:
                raise ValidationError(f"firm {n} has prices below its cost")


def pricing_utility(spec: PricingSpec, n: int, tn_value: float, prices: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Profit of firm ``n``; ``prices`` has shape ``(..., N)``."""
    d = np.asarray(spec.d, dtype=float)
    cross = sum(d[n, m] * prices[..., m] for m in range(len(spec.costs)) if m != n)
    a = prices[..., n]
    demand = (
        spec.b[n] - spec.c[n] * a + cross + spec.e[n] * tn_value
        + spec.f[n] * omega + spec.g[n] * tn_value * omega
    )
    return (a - spec.costs[n]) * demand


def closed_form_best_response(spec: PricingSpec, n: int, tn_value: float, other_prices: Sequence[float], mean_state: float) -> float:
    """Stationary point of the expected profit in the own price."""
    d = np.asarray(spec.d, dtype=float)
    others = [m for m in range(len(spec.costs)) if m != n]
    cross = sum(d[n, m] * p for m, p in zip(others, other_prices))
    num = (
        spec.costs[n] * spec.c[n] + spec.b[n] + cross + spec.e[n] * tn_value
        + spec.f[n] * mean_state + spec.g[n] * tn_value * mean_state
    )
    return num / (2.0 * spec.c[n])


def build_pricing_game(spec: PricingSpec) -> GameSpec:
    N = len(spec.costs)
    type_counts = tuple(int(k) for k in spec.type_counts)
    grids = [SupportGrid.line(p) for p in spec.price_levels]
    tilde = SupportGrid.line(spec.state_levels)
    omega = tilde.levels
    prices = _bid_profiles([g.levels for g in grids])
    n_prof = int(np.prod(type_counts))
    if prices[..., 0].size * tilde.size * n_prof > STATE_CAP * 10:
        raise ValidationError("pricing game exceeds the table-size cap")
    profiles = list(itertools.product(*[range(k) for k in type_counts]))
    payoffs = []
    for n in range(N):
        tabs = []
        for t in profiles:
            u = pricing_utility(spec, n, t[n] + 1.0, prices[..., None, :], omega)
            tabs.append(u)
        payoffs.append(tuple(tabs))
    attitudes = []
    for n in range(N):
        opp_counts = [k for m, k in enumerate(type_counts) if m != n]
        n_opp = int(np.prod(opp_counts)) if opp_counts else 1
        p = np.asarray(spec.type_probs[n], dtype=float) if spec.type_probs else np.full(n_opp, 1.0 / n_opp)
        row = []
        for tn in range(type_counts[n]):
            per_profile = [[DiscreteDistribution(tilde, mu) for mu in s] for s in spec.tilde_sets[n][tn]]
            sel = scenario_a_priors(per_profile, opp_counts)
            row.append(
                AmbiguityAttitude.factored(
                    spec.kind, p, selections_to_arrays(sel),
                    tilde_sets=[[mu.weights for mu in s] for s in per_profile],
                )
            )
        attitudes.append(row)
    return GameSpec(
        type_counts=type_counts,
        action_grids=tuple((g,) * type_counts[n] for n, g in enumerate(grids)),
        payoffs=tuple(payoffs),
        attitudes=attitudes,
        tilde_grid=tilde,
        name=spec.name,
    )


# -- parameter dictionaries (game files) ---------------------------------------


def _levels(x) -> list[float]:
    """Explicit level list or ``{"low", "high", "count"}`` range."""
    if isinstance(x, dict):
        return np.linspace(float(x["low"]), float(x["high"]), int(x["count"])).tolist()
    return [float(v) for v in x]


def pricing_spec_from_params(params: dict) -> PricingSpec:
    p = dict(params)
    N = len(p["costs"])
    prices = p["prices"]
    if isinstance(prices, dict) or (prices and not isinstance(prices[0], (list, dict))):
        prices = [prices] * N
    return PricingSpec(
        costs=p["costs"],
        price_levels=[_levels(x) for x in prices],
        b=p["b"], c=p["c"], d=p["d"], e=p["e"], f=p["f"], g=p["g"],
        type_counts=p["types"],
        state_levels=_levels(p["states"]),
        type_probs=p.get("type_probs", ()),
        tilde_sets=p["tilde_sets"],
        kind=p.get("kind", "enterprising"),
        name=p.get("name", "pricing"),
    )


def auction_spec_from_params(params: dict) -> AuctionSpec:
    p = dict(params)
    priors = [
        [[(pair["p"], pair["nu"]) for pair in per_type] for per_type in per_bidder]
        for per_bidder in p["priors"]
    ]
    return AuctionSpec(
        n_bidders=int(p["bidders"]),
        type_count=int(p["types"]),
        bid_levels=_levels(p["bids"]),
        worth_levels=[_levels(w) for w in p["worths"]],
        rule=p.get("rule", "first"),
        priors=priors,
        kind=p.get("kind", "alarmist"),
        name=p.get("name", "auction"),
    )


def build_from_params(model: str, params: dict) -> GameSpec:
    """Expand a ``model`` name plus parameters into a game."""
    if model == "pricing":
        return build_pricing_game(pricing_spec_from_params(params))
    if model == "auction":
        return build_auction(auction_spec_from_params(params))
    if model == "lo_auction":
        return build_lo_auction(
            worth_levels=_levels(params["worths"]),
            n_bidders=int(params["bidders"]),
            bid_levels=_levels(params["bids"]),
            prior_sets=params["priors"],
            rule=params.get("rule", "first"),
            kind=params.get("kind", "alarmist"),
            name=params.get("name", "lo_auction"),
        )
    raise ValidationError(f"unknown model {model!r}")
