"""Action-based and distribution-based best responses, and the agent form.

Everything rests on one matrix per player-type: ``G[a, r]`` is the expected
utility of pure action ``a`` under prior ``r`` against the opponents' current
strategies. A pure action's satisfaction is the attitude's reduction of its
row; a mixed strategy ``d`` has satisfaction ``opt_r (d @ G)[r]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .config import DEFAULT
from .dist import DiscreteDistribution
from .game import GameSpec, StrategyProfile, ValidationError
from .lp import solve_matrix_game
from .payoffvec import integrate_kernel, kernel, opponent_joint
from .satisfaction import prefers

MAX_SIMPLEX_POINTS = 10**6


class GridTooLargeError(ValueError):
    """Requested simplex grid exceeds the point cap."""


def payoff_means(game: GameSpec, n: int, tn: int, profile: StrategyProfile) -> np.ndarray:
    """Expected utility per (own action, state): shape ``(|A_{n,t_n}|, |Omega_{n,t_n}|)``."""
    N = game.n_players
    cols = []
    for t_minus, ti, _ in game.blocks(n, tn):
        table = np.moveaxis(game.payoffs[n][ti], n, 0)
        joint = opponent_joint(game, n, t_minus, profile)
        cols.append(np.tensordot(table, joint, axes=(list(range(1, N)), list(range(N - 1)))))
    return np.concatenate(cols, axis=1)


def value_matrix(game: GameSpec, n: int, tn: int, profile: StrategyProfile) -> np.ndarray:
    """``G[a, r]``: expected utility of action ``a`` under prior ``r``."""
    att = game.attitude(n, tn)
    return payoff_means(game, n, tn, profile) @ att.prior_matrix.T


def action_values(game: GameSpec, n: int, tn: int, profile: StrategyProfile) -> np.ndarray:
    """Satisfaction of every pure action against ``profile``."""
    return game.attitude(n, tn).opt(value_matrix(game, n, tn, profile), axis=1)


def distribution_value(game: GameSpec, n: int, tn: int, delta: DiscreteDistribution, profile: StrategyProfile) -> float:
    """Satisfaction of the mixed strategy ``delta`` against ``profile``."""
    G = value_matrix(game, n, tn, profile)
    return float(game.attitude(n, tn).opt(delta.weights @ G))


def _custom_maximal(game, n, tn, profile) -> list[int]:
    att = game.attitude(n, tn)
    kern = kernel(game, n, tn, profile)
    rows = [kern.row(a) for a in range(kern.weights.shape[0])]
    return [
        a for a, pa in enumerate(rows)
        if not any(prefers(pb, pa, att) for b, pb in enumerate(rows) if b != a)
    ]


def action_best_set(game: GameSpec, n: int, tn: int, profile: StrategyProfile, eps: float = DEFAULT.regret) -> list[int]:
    """Indices of actions within ``eps`` of the best pure satisfaction.

    Custom preferences return the actions no other action is strictly
    preferred to; ``eps`` is ignored there.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if game.attitude(n, tn).kind == "custom":
        return _custom_maximal(game, n, tn, profile)
    vals = action_values(game, n, tn, profile)
    return [int(i) for i in np.flatnonzero(vals >= vals.max() - eps)]


def is_action_best_response(
    delta: DiscreteDistribution, game: GameSpec, n: int, tn: int, profile: StrategyProfile, eps: float = DEFAULT.regret
) -> tuple[bool, float]:
    """Whether ``delta`` is supported on maximal actions, and its off-support mass."""
    best = action_best_set(game, n, tn, profile, eps)
    off = float(np.delete(delta.weights, best).sum())
    return off <= DEFAULT.mass, off


@dataclass
class BestResponseResult:
    """Outcome of a best-response query for one player-type."""

    mode: str
    value: float
    kind: str
    matrix: np.ndarray = field(repr=False)
    maximal_actions: list[int] = field(default_factory=list)
    optimal_dist: DiscreteDistribution | None = None

    def regret_of(self, query) -> float:
        """Best value minus the value achieved by an action index or a distribution."""
        reduce = {"alarmist": np.min, "enterprising": np.max}.get(self.kind, lambda v: v[0])
        if isinstance(query, DiscreteDistribution):
            achieved = reduce(query.weights @ self.matrix)
        else:
            achieved = reduce(self.matrix[int(query)])
        return float(self.value - achieved)


def action_best_response(game: GameSpec, n: int, tn: int, profile: StrategyProfile, eps: float = DEFAULT.regret) -> BestResponseResult:
    att = game.attitude(n, tn)
    G = value_matrix(game, n, tn, profile)
    vals = att.opt(G, axis=1)
    best = [int(i) for i in np.flatnonzero(vals >= vals.max() - eps)]
    return BestResponseResult("action", float(vals.max()), att.kind, G, maximal_actions=best)


def dist_best_response(game: GameSpec, n: int, tn: int, profile: StrategyProfile) -> BestResponseResult:
    """Optimal mixed strategy and its satisfaction.

    Traditional and enterprising satisfaction is convex in the mixture, so a
    pure argmax is optimal. Alarmist satisfaction is a maxmin over priors,
    solved exactly as a matrix game.
    """
    att = game.attitude(n, tn)
    if att.kind == "custom":
        raise ValueError("custom preferences need dist_best_response_grid")
    G = value_matrix(game, n, tn, profile)
    grid = game.action_grids[n][tn]
    if att.kind == "alarmist":
        sol = solve_matrix_game(G)
        w, value = sol.row_strategy, sol.value
    else:
        vals = att.opt(G, axis=1)
        w = np.zeros(grid.size)
        w[int(np.argmax(vals))] = 1.0
        value = float(vals.max())
    return BestResponseResult("distribution", float(value), att.kind, G, optimal_dist=DiscreteDistribution(grid, w))


def simplex_grid(m: int, h: float) -> np.ndarray:
    """All points of the ``m``-simplex whose coordinates are multiples of ``h``."""
    if not 0 < h <= 1:
        raise ValueError("h must lie in (0, 1]")
    k = int(round(1.0 / h))
    count = comb(k + m - 1, m - 1)
    if count > MAX_SIMPLEX_POINTS:
        raise GridTooLargeError(f"simplex grid has {count} points, above the cap {MAX_SIMPLEX_POINTS}")
    # stars and bars: bar positions split k units into m parts
    bars = np.array(list(itertools.combinations(range(k + m - 1), m - 1)), dtype=int).reshape(-1, m - 1)
    edges = np.hstack([np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), k + m - 1)])
    return (np.diff(edges, axis=1) - 1) / k


@dataclass
class GridBestResponse:
    """Maximal grid points of the simplex; values are None for custom preferences."""

    points: np.ndarray
    maximal: np.ndarray
    values: np.ndarray | None
    step: float

    @property
    def best_value(self) -> float | None:
        return None if self.values is None else float(self.values.max())

    def maximal_points(self) -> np.ndarray:
        return self.points[self.maximal]


def dist_best_response_grid(game: GameSpec, n: int, tn: int, profile: StrategyProfile, h: float = 0.01) -> GridBestResponse:
    """Maximal distributions among simplex grid points with spacing ``h``."""
    att = game.attitude(n, tn)
    m = game.action_grids[n][tn].size
    pts = simplex_grid(m, h)
    if att.kind != "custom":
        vals = att.opt(pts @ value_matrix(game, n, tn, profile), axis=1)
        return GridBestResponse(pts, np.flatnonzero(vals == vals.max()), vals, h)
    kern = kernel(game, n, tn, profile)
    grid = game.action_grids[n][tn]
    vecs = [integrate_kernel(kern, DiscreteDistribution(grid, p)) for p in pts]
    maximal = [
        i for i, v in enumerate(vecs)
        if not any(prefers(u, v, att) for j, u in enumerate(vecs) if j != i)
    ]
    return GridBestResponse(pts, np.array(maximal, dtype=int), None, h)


# -- agent form -----------------------------------------------------------


@dataclass
class AgentForm:
    """Normal-form game with one agent per (player, type).

    ``per_prior[i]`` has one axis per agent (size 1 where agent ``i``'s
    satisfaction does not depend on that agent) plus a trailing prior axis;
    ``values[i]`` reduces it with agent ``i``'s attitude.
    """

    agents: tuple[tuple[int, int], ...]
    sizes: tuple[int, ...]
    kinds: tuple[str, ...]
    per_prior: list[np.ndarray] = field(repr=False)
    values: list[np.ndarray] = field(repr=False)

    def value(self, agent: int, profile: Sequence[int]) -> float:
        arr = self.values[agent]
        idx = tuple(p if s > 1 else 0 for p, s in zip(profile, arr.shape))
        return float(arr[idx])

    def prior_row(self, agent: int, profile: Sequence[int]) -> np.ndarray:
        """Matrix ``G[a, r]`` for ``agent`` with everyone else fixed at ``profile``."""
        arr = self.per_prior[agent]
        idx = [p if s > 1 else 0 for p, s in zip(profile, arr.shape[:-1])]
        idx[agent] = slice(None)
        return arr[tuple(idx)]


def _embed(game: GameSpec, t: tuple[int, ...], arr: np.ndarray) -> np.ndarray:
    """Reshape an array over ``t``'s action axes (plus a trailing axis) onto agent axes."""
    shape = [1] * len(game.agents) + [arr.shape[-1]]
    for m, tm in enumerate(t):
        shape[game.agent_index(m, tm)] = arr.shape[m]
    return arr.reshape(shape)


def agent_form(game: GameSpec, path: str = "auto") -> AgentForm:
    """Tabulate every agent's satisfaction over pure agent profiles.

    ``path="general"`` integrates utilities against flat priors block by block;
    ``path="structured"`` uses the factored form (opponent-type probabilities
    times per-profile state distributions). ``"auto"`` picks the factored form
    when the attitude carries it.
    """
    per_prior, values, kinds = [], [], []
    for n, tn in game.agents:
        att = game.attitude(n, tn)
        if att.kind == "custom":
            raise ValidationError("the agent form needs satisfaction attitudes")
        use_factored = path == "structured" or (path == "auto" and att.is_factored)
        if use_factored and not att.is_factored:
            raise ValidationError(f"attitude ({n},{tn}) has no factored prior data")
        total = 0.0
        for j, (t_minus, ti, sl) in enumerate(game.blocks(n, tn)):
            t = game.full_profile(n, tn, t_minus)
            table = game.payoffs[n][ti]
            if use_factored:
                nus = np.stack([nu[j] for nu in att.nu_set])  # (|Q|, |tilde|)
                part = att.type_probs[j] * np.tensordot(table, nus, axes=([-1], [1]))
            else:
                part = np.tensordot(table, att.prior_matrix[:, sl], axes=([-1], [1]))
            total = total + _embed(game, t, part)
        # every agent axis the value depends on is present; fill the rest
        per_prior.append(np.asarray(total))
        values.append(att.opt(np.asarray(total), axis=-1))
        kinds.append(att.kind)
    sizes = tuple(game.action_grids[n][tn].size for n, tn in game.agents)
    return AgentForm(game.agents, sizes, tuple(kinds), per_prior, values)
