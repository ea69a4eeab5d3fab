"""Random structured games for property tests."""

from __future__ import annotations

import numpy as np

from .dist import SupportGrid
from .game import AmbiguityAttitude, GameSpec, StrategyProfile

KINDS = ("traditional", "alarmist", "enterprising")


def random_game(
    rng: np.random.Generator,
    kind: str | None = None,
    players=(2, 3),
    types=(1, 2),
    actions=(2, 4),
    states=(2, 4),
    prior_size=(1, 3),
    factored: bool = False,
) -> GameSpec:
    """Structured game with utilities uniform on ``[0, 1]``.

    ``kind=None`` draws an attitude kind per player. Ranges are inclusive.
    Factored attitudes draw one opponent-type distribution and a set of
    per-profile state distributions; otherwise priors are drawn directly over
    each player-type's states.
    """
    draw = lambda r: int(rng.integers(r[0], r[1] + 1))
    N = draw(players)
    type_counts = tuple(draw(types) for _ in range(N))
    grids = tuple(
        tuple(SupportGrid.indices(draw(actions)) for _ in range(type_counts[n])) for n in range(N)
    )
    K = draw(states)
    tilde = SupportGrid.indices(K)
    profiles = np.ndindex(*type_counts)
    sizes = [[g.size for g in row] for row in grids]
    payoffs = [[] for _ in range(N)]
    for t in profiles:
        shape = tuple(sizes[m][tm] for m, tm in enumerate(t)) + (K,)
        for n in range(N):
            payoffs[n].append(rng.uniform(size=shape))
    attitudes = []
    for n in range(N):
        k = kind or KINDS[int(rng.integers(len(KINDS)))]
        n_opp = int(np.prod([c for m, c in enumerate(type_counts) if m != n], dtype=int))
        row = []
        for _ in range(type_counts[n]):
            count = 1 if k == "traditional" else draw(prior_size)
            if factored:
                p = rng.dirichlet(np.ones(n_opp))
                nus = [rng.dirichlet(np.ones(K), size=n_opp) for _ in range(count)]
                row.append(AmbiguityAttitude.factored(k, p, nus))
            else:
                row.append(AmbiguityAttitude(k, tuple(rng.dirichlet(np.ones(n_opp * K)) for _ in range(count))))
        attitudes.append(row)
    return GameSpec(type_counts, grids, tuple(tuple(p) for p in payoffs), attitudes, tilde_grid=tilde, name="random")


def random_profile(rng: np.random.Generator, game: GameSpec, sparsity: float = 0.0):
    """Random mixed profile; ``sparsity`` is the chance each weight is zeroed."""
    rows = []
    for grids in game.action_grids:
        row = []
        for g in grids:
            w = rng.dirichlet(np.ones(g.size))
            if sparsity:
                mask = rng.uniform(size=g.size) >= sparsity
                if not mask.any():
                    mask[rng.integers(g.size)] = True
                w = np.where(mask, w, 0.0)
                w = w / w.sum()
            row.append(w)
        rows.append(row)
    return StrategyProfile.from_weights(game, rows)
