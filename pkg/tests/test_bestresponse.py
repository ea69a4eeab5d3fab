import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ambigame import fixtures as fx
from ambigame.bestresponse import (
    GridTooLargeError,
    action_best_response,
    action_best_set,
    action_values,
    agent_form,
    dist_best_response,
    dist_best_response_grid,
    distribution_value,
    is_action_best_response,
    simplex_grid,
)
from ambigame.dist import DiscreteDistribution, SupportGrid, dirac
from ambigame.game import AmbiguityAttitude, GameSpec, StrategyProfile
from ambigame.payoffvec import action_payoff_vector, strategy_payoff_vector
from ambigame.randomgames import random_game, random_profile
from ambigame.satisfaction import comparator_from_attitude, satisfaction
from oracles import brute_value


def coin(kind="alarmist"):
    game = fx.ambiguous_coin(kind)
    return game, StrategyProfile.uniform(game)


def test_single_action_grid():
    game = fx.ambiguous_coin().with_attitudes([[AmbiguityAttitude.traditional((0.5, 0.5))]])
    game = GameSpec((1,), ((SupportGrid.indices(1),),), ((np.array([[0.2, 0.7]]),),), game.attitudes,
                    tilde_grid=SupportGrid.indices(2))
    prof = StrategyProfile.uniform(game)
    assert action_best_set(game, 0, 0, prof) == [0]
    assert dist_best_response(game, 0, 0, prof).optimal_dist.weights.tolist() == [1.0]


def test_traditional_picks_higher_action():
    game = GameSpec((1,), ((SupportGrid.indices(2),),), ((np.array([[1.0], [0.0]]),),),
                    ((AmbiguityAttitude.traditional((1.0,)),),), tilde_grid=SupportGrid.line([0.0]))
    assert action_best_set(game, 0, 0, StrategyProfile.uniform(game)) == [0]


def test_coin_action_values_tie():
    game, prof = coin()
    assert np.allclose(action_values(game, 0, 0, prof), [0.4, 0.4], atol=1e-15)
    assert action_best_set(game, 0, 0, prof) == [0, 1]
    ok, off = is_action_best_response(DiscreteDistribution.uniform(game.action_grids[0][0]), game, 0, 0, prof)
    assert ok and off == 0.0


def test_action_best_response_support_examples():
    game = fx.prisoners_dilemma()
    prof = StrategyProfile.from_agent_indices(game, (0, 1))
    acts = game.action_grids[0][0]
    assert is_action_best_response(dirac(acts, 1), game, 0, 0, prof) == (True, 0.0)
    ok, off = is_action_best_response(DiscreteDistribution.uniform(acts), game, 0, 0, prof)
    assert not ok and off == 0.5


def test_distribution_best_response_examples():
    game = fx.prisoners_dilemma()
    prof = StrategyProfile.from_agent_indices(game, (0, 0))
    br = dist_best_response(game, 0, 0, prof)
    assert br.optimal_dist.weights.tolist() == [0.0, 1.0] and br.value == 5.0

    game, prof = coin("alarmist")
    br = dist_best_response(game, 0, 0, prof)
    assert br.value == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(br.optimal_dist.weights, [0.5, 0.5], atol=1e-12)
    assert br.value > action_best_response(game, 0, 0, prof).value

    game, prof = coin("enterprising")
    br = dist_best_response(game, 0, 0, prof)
    assert br.value == pytest.approx(0.6) and br.optimal_dist.weights.max() == 1.0


def test_coin_brute_force_over_mixtures():
    game, prof = coin()
    best = max(brute_value(game, 0, 0, np.array([x, 1 - x]), prof) for x in np.linspace(0, 1, 101))
    assert best == pytest.approx(0.5, abs=1e-12)


def test_grid_examples():
    game, prof = coin()
    g = dist_best_response_grid(game, 0, 0, prof, h=0.01)
    assert np.allclose(g.maximal_points(), [[0.5, 0.5]])
    assert g.best_value == pytest.approx(0.5)


def test_simplex_grid():
    pts = simplex_grid(3, 0.5)
    assert sorted(map(tuple, pts)) == sorted(
        [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0.5, 0.5, 0), (0.5, 0, 0.5), (0, 0.5, 0.5)]
    )
    assert len(simplex_grid(4, 0.01)) == 176851
    with pytest.raises(GridTooLargeError):
        simplex_grid(8, 0.01)


def test_custom_wrapping_traditional_matches():
    rng = np.random.default_rng(2)
    for _ in range(10):
        game = random_game(rng, kind="traditional", players=(2, 2))
        prof = random_profile(rng, game)
        att = game.attitude(0, 0)
        wrapped = game.with_attitudes(
            [[AmbiguityAttitude.custom(comparator_from_attitude(att), "wrapped")] + list(game.attitudes[0][1:])]
            + [list(r) for r in game.attitudes[1:]]
        )
        assert action_best_set(wrapped, 0, 0, prof) == action_best_set(game, 0, 0, prof, eps=0.0)


def test_traditional_grid_within_lipschitz_bound():
    rng = np.random.default_rng(5)
    for _ in range(20):
        game = random_game(rng, kind="traditional")
        prof = random_profile(rng, game)
        n, tn = game.agents[0]
        h = 0.05
        g = dist_best_response_grid(game, n, tn, prof, h)
        pure = action_values(game, n, tn, prof).max()
        assert pure - game.utility_range * h <= g.best_value <= dist_best_response(game, n, tn, prof).value + 1e-12


# -- invariants ----------------------------------------------------------------------------


@given(st.integers(0, 10**6))
def test_value_sandwich(seed):
    rng = np.random.default_rng(seed)
    game = random_game(rng)
    prof = random_profile(rng, game)
    for n, tn in game.agents:
        pure = action_values(game, n, tn, prof).max()
        dv = dist_best_response(game, n, tn, prof).value
        assert pure <= dv + 1e-12
        if game.attitude(n, tn).kind != "alarmist":
            assert dv == pytest.approx(pure, abs=1e-10)


@given(st.integers(0, 10**6))
def test_pure_action_equals_dirac_distribution(seed):
    rng = np.random.default_rng(seed)
    game = random_game(rng)
    prof = random_profile(rng, game)
    for n, tn in game.agents:
        grid = game.action_grids[n][tn]
        att = game.attitude(n, tn)
        for a in range(grid.size):
            s_a = satisfaction(action_payoff_vector(game, n, tn, a, prof), att)
            s_d = satisfaction(strategy_payoff_vector(game, n, tn, dirac(grid, grid.point(a)), prof), att)
            assert s_a == s_d


def test_lp_matches_grid_search():
    rng = np.random.default_rng(9)
    for _ in range(30):
        game = random_game(rng, kind="alarmist", actions=(3, 3), prior_size=(2, 3))
        prof = random_profile(rng, game)
        n, tn = game.agents[0]
        h = 0.01
        lp = dist_best_response(game, n, tn, prof)
        grid = dist_best_response_grid(game, n, tn, prof, h)
        assert grid.best_value <= lp.value + 1e-12
        assert lp.value - grid.best_value <= game.utility_range * h
        assert distribution_value(game, n, tn, lp.optimal_dist, prof) == pytest.approx(lp.value, abs=1e-12)


def test_mixed_value_matches_brute_force():
    rng = np.random.default_rng(21)
    for _ in range(20):
        game = random_game(rng, players=(2, 2))
        prof = random_profile(rng, game, sparsity=0.3)
        for n, tn in game.agents:
            if game.attitude(n, tn).kind == "traditional":
                continue
            d = prof[n, tn]
            assert distribution_value(game, n, tn, d, prof) == pytest.approx(
                brute_value(game, n, tn, d.weights, prof), abs=1e-12
            )


# -- agent form ------------------------------------------------------------------------------


def test_agent_form_single_prior_is_expected_utility():
    game = fx.prisoners_dilemma()
    form = agent_form(game)
    assert form.value(0, (1, 0)) == 5.0 and form.value(1, (1, 0)) == 0.0


def test_agent_form_paths_agree():
    rng = np.random.default_rng(6)
    for _ in range(20):
        game = random_game(rng, factored=True)
        s = agent_form(game, "structured")
        g = agent_form(game, "general")
        gen = agent_form(game.to_general())
        for a, b, c in zip(s.values, g.values, gen.values):
            assert np.allclose(np.broadcast_to(a, np.broadcast_shapes(a.shape, b.shape)), b, atol=1e-12)
            assert np.allclose(b, c, atol=1e-12)


def test_agent_form_matches_pipeline():
    rng = np.random.default_rng(7)
    for _ in range(10):
        game = random_game(rng)
        form = agent_form(game)
        for _ in range(10):
            flat = tuple(int(rng.integers(k)) for k in form.sizes)
            prof = StrategyProfile.from_agent_indices(game, flat)
            for i, (n, tn) in enumerate(game.agents):
                vec = action_payoff_vector(game, n, tn, flat[i], prof)
                assert form.value(i, flat) == pytest.approx(satisfaction(vec, game.attitude(n, tn)), abs=1e-12)
