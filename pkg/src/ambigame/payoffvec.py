"""Payoff-distribution vectors and finite kernels.

Entries are distributions of utility values: for each state the player-type
considers possible, the distribution of its utility induced by opponents'
randomization (and, for strategy vectors, its own).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .dist import DiscreteDistribution, SupportGrid
from .game import GameSpec, StrategyProfile


@dataclass(frozen=True, eq=False)
class PayoffDistVector:
    """State-indexed utility distributions for one player-type.

    ``weights[w]`` is the distribution over ``grid`` levels at state ``w``.
    """

    owner: tuple[int, int]
    grid: SupportGrid
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[1] != self.grid.size:
            raise ValueError(f"weights of shape {w.shape} do not match a grid of {self.grid.size} levels")
        if np.any(w < -1e-15) or np.any(np.abs(w.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("every entry must be a probability vector")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n_states(self) -> int:
        return self.weights.shape[0]

    def entry(self, w: int) -> DiscreteDistribution:
        return DiscreteDistribution(self.grid, np.clip(self.weights[w], 0.0, None))

    def means(self) -> np.ndarray:
        """Expected utility at every state."""
        return self.weights @ self.grid.levels

    def allclose(self, other: PayoffDistVector, atol: float = 1e-12) -> bool:
        return (
            self.owner == other.owner
            and self.grid == other.grid
            and np.allclose(self.weights, other.weights, rtol=0, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class FiniteKernel:
    """Payoff-distribution vector for every pure action: ``weights[a, w, level]``."""

    owner: tuple[int, int]
    grid: SupportGrid
    weights: np.ndarray = field(repr=False)

    def row(self, a: int) -> PayoffDistVector:
        return PayoffDistVector(self.owner, self.grid, self.weights[a])


def mix_vectors(components: Sequence[tuple[float, PayoffDistVector]]) -> PayoffDistVector:
    """Entrywise convex combination of vectors sharing owner and grid."""
    first = components[0][1]
    w = sum(c * v.weights for c, v in components)
    return PayoffDistVector(first.owner, first.grid, w)


def opponent_joint(game: GameSpec, n: int, t_minus: Sequence[int], profile: StrategyProfile) -> np.ndarray:
    """Product measure of opponents' strategies, shaped over their action axes."""
    t = list(t_minus)
    others = [m for m in range(game.n_players) if m != n]
    ws = [profile[m, t[i]].weights for i, m in enumerate(others)]
    if not ws:
        return np.ones(())
    return reduce(np.multiply.outer, ws)


def _kernel_weights(game: GameSpec, n: int, tn: int, profile: StrategyProfile, actions) -> np.ndarray:
    grid = game.utility_grid(n, tn)
    G = grid.size
    out = []
    for t_minus, ti, sl in game.blocks(n, tn):
        table = game.payoffs[n][ti]
        joint = opponent_joint(game, n, t_minus, profile)
        K = table.shape[-1]
        rows = []
        for a in actions:
            sub = np.take(table, a, axis=n)  # (A_-n..., K)
            idx = grid.snap(sub.ravel()).reshape(sub.shape)
            flat = (np.arange(K) * G + idx).reshape(-1, K)
            wts = np.broadcast_to(joint.reshape(-1, 1), flat.shape)
            rows.append(np.bincount(flat.ravel(), weights=wts.ravel(), minlength=K * G).reshape(K, G))
        out.append(np.stack(rows))
    return np.concatenate(out, axis=1)


def action_payoff_vector(game: GameSpec, n: int, tn: int, a: int, profile: StrategyProfile) -> PayoffDistVector:
    """Vector obtained when ``(n, t_n)`` plays action index ``a`` against ``profile``.

    Player ``n``'s own entries of ``profile`` are ignored.
    """
    w = _kernel_weights(game, n, tn, profile, [a])[0]
    return PayoffDistVector((n, tn), game.utility_grid(n, tn), w)


def kernel(game: GameSpec, n: int, tn: int, profile: StrategyProfile) -> FiniteKernel:
    actions = range(game.action_grids[n][tn].size)
    w = _kernel_weights(game, n, tn, profile, actions)
    return FiniteKernel((n, tn), game.utility_grid(n, tn), w)


def integrate_kernel(kern: FiniteKernel, delta: DiscreteDistribution) -> PayoffDistVector:
    if delta.grid.size != kern.weights.shape[0]:
        raise ValueError("strategy grid does not match the kernel's action count")
    w = np.tensordot(delta.weights, kern.weights, axes=(0, 0))
    return PayoffDistVector(kern.owner, kern.grid, w)


def strategy_payoff_vector(
    game: GameSpec, n: int, tn: int, delta: DiscreteDistribution, profile: StrategyProfile
) -> PayoffDistVector:
    """Mixture of the pure-action vectors with weights ``delta``."""
    return integrate_kernel(kernel(game, n, tn, profile), delta)
