import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ambigame import fixtures as fx
from ambigame.dist import DiscreteDistribution, SupportGrid, dirac
from ambigame.game import AmbiguityAttitude, GameSpec, StrategyProfile
from ambigame.payoffvec import (
    FiniteKernel,
    action_payoff_vector,
    integrate_kernel,
    kernel,
    mix_vectors,
    strategy_payoff_vector,
)
from ambigame.randomgames import random_game, random_profile
from oracles import brute_vector


def two_by_two(row):
    """Player 0 faces an opponent; payoff table ``row`` for a single state."""
    grids = ((SupportGrid.indices(2),), (SupportGrid.indices(2),))
    row = np.asarray(row, dtype=float)[..., None]
    atts = ((AmbiguityAttitude.traditional((1.0,)),), (AmbiguityAttitude.traditional((1.0,)),))
    return GameSpec((1, 1), grids, ((row,), (np.zeros((2, 2, 1)),)), atts, tilde_grid=SupportGrid.line([0.0]))


def test_pure_opponents_give_diracs():
    game = fx.prisoners_dilemma_ambiguous()
    prof = StrategyProfile.from_agent_indices(game, (0, 1))
    vec = action_payoff_vector(game, 0, 0, 1, prof)
    grid = game.utility_grid(0, 0)
    for w in range(2):
        entry = vec.entry(w)
        assert entry.weights.max() == 1.0
        assert grid.point(int(entry.weights.argmax())) == game.payoffs[0][0][1, 1, w]


def test_opponent_independent_utility():
    game = two_by_two([[2.0, 2.0], [0.0, 0.0]])
    a = StrategyProfile.from_weights(game, [[[0.5, 0.5]], [[1.0, 0.0]]])
    b = StrategyProfile.from_weights(game, [[[0.5, 0.5]], [[0.2, 0.8]]])
    for act in range(2):
        assert action_payoff_vector(game, 0, 0, act, a).allclose(action_payoff_vector(game, 0, 0, act, b))


def test_mixing_opponent_gives_bernoulli():
    game = two_by_two([[0.0, 1.0], [1.0, 1.0]])
    prof = StrategyProfile.from_weights(game, [[[1.0, 0.0]], [[0.5, 0.5]]])
    vec = action_payoff_vector(game, 0, 0, 0, prof)
    assert vec.grid.levels.tolist() == [0.0, 1.0]
    assert vec.weights.tolist() == [[0.5, 0.5]]


def test_strategy_vector_examples():
    game = two_by_two([[0.0, 1.0], [3.0, 1.0]])
    prof = StrategyProfile.from_weights(game, [[[1.0, 0.0]], [[1.0, 0.0]]])
    acts = game.action_grids[0][0]
    for a in range(2):
        pure = strategy_payoff_vector(game, 0, 0, dirac(acts, a), prof)
        assert pure.allclose(action_payoff_vector(game, 0, 0, a, prof))
    half = strategy_payoff_vector(game, 0, 0, DiscreteDistribution.uniform(acts), prof)
    assert np.allclose(half.weights, [[0.5, 0.0, 0.5]])  # levels 0, 1, 3


def test_two_action_two_outcome_product_measure():
    game = two_by_two([[0.0, 1.0], [1.0, 0.0]])
    prof = StrategyProfile.from_weights(game, [[[0.3, 0.7]], [[0.6, 0.4]]])
    delta = prof[0, 0]
    got = strategy_payoff_vector(game, 0, 0, delta, prof)
    # outcome 1 happens on (0,1) and (1,0)
    p_one = 0.3 * 0.4 + 0.7 * 0.6
    assert np.allclose(got.weights, [[1 - p_one, p_one]], atol=1e-15)
    assert np.allclose(got.weights, brute_vector(game, 0, 0, delta.weights, prof), atol=1e-15)


def test_kernel_examples():
    rng = np.random.default_rng(3)
    game = random_game(rng, players=(2, 2), actions=(3, 3))
    prof = random_profile(rng, game)
    kern = kernel(game, 0, 0, prof)
    acts = game.action_grids[0][0]
    for a in range(acts.size):
        assert integrate_kernel(kern, dirac(acts, a)).allclose(kern.row(a))
    const = FiniteKernel(kern.owner, kern.grid, np.broadcast_to(kern.weights[0], kern.weights.shape))
    any_delta = DiscreteDistribution(acts, [0.2, 0.3, 0.5])
    assert integrate_kernel(const, any_delta).allclose(kern.row(0))
    mixed = integrate_kernel(kern, any_delta)
    assert mixed.allclose(strategy_payoff_vector(game, 0, 0, any_delta, prof))
    assert mixed.allclose(mix_vectors([(w, kern.row(a)) for a, w in enumerate(any_delta.weights)]))


@given(st.integers(0, 10**6))
def test_vectors_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    game = random_game(rng, players=(1, 3), actions=(1, 3))
    prof = random_profile(rng, game, sparsity=0.3)
    for n, tn in game.agents:
        delta = prof[n, tn]
        got = strategy_payoff_vector(game, n, tn, delta, prof)
        assert np.allclose(got.weights, brute_vector(game, n, tn, delta.weights, prof), atol=1e-12)
        for a in range(delta.grid.size):
            pure = strategy_payoff_vector(game, n, tn, dirac(delta.grid, delta.grid.point(a)), prof)
            assert np.array_equal(pure.weights, action_payoff_vector(game, n, tn, a, prof).weights)


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 1.0])
def test_strategy_vector_is_linear_in_own_strategy(alpha):
    rng = np.random.default_rng(11)
    for _ in range(10):
        game = random_game(rng)
        prof = random_profile(rng, game)
        n, tn = game.agents[-1]
        grid = game.action_grids[n][tn]
        d0 = DiscreteDistribution(grid, rng.dirichlet(np.ones(grid.size)))
        d1 = DiscreteDistribution(grid, rng.dirichlet(np.ones(grid.size)))
        dm = DiscreteDistribution(grid, (1 - alpha) * d0.weights + alpha * d1.weights)
        lhs = strategy_payoff_vector(game, n, tn, dm, prof)
        rhs = mix_vectors([(1 - alpha, strategy_payoff_vector(game, n, tn, d0, prof)),
                           (alpha, strategy_payoff_vector(game, n, tn, d1, prof))])
        assert lhs.allclose(rhs, atol=1e-12)
