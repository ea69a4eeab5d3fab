import numpy as np
import pytest

from ambigame import fixtures as fx
from ambigame.bestresponse import agent_form
from ambigame.equilibrium import pure_equilibrium_indices
from ambigame.game import ValidationError, reduce_traditional
from ambigame.models import (
    AuctionSpec,
    PricingSpec,
    build_auction,
    build_from_params,
    build_lo_auction,
    build_pricing_game,
    closed_form_best_response,
    pricing_utility,
    win_shares,
)
from ambigame.monotone import check_monotone_assumptions


def test_single_bidder_always_wins():
    spec = AuctionSpec(1, 1, [0.0, 0.3, 0.6], [[0.5, 1.0]], "first", [[[([1.0], [[0.5, 0.5]])]]], "traditional")
    game = build_auction(spec)
    table = game.payoffs[0][0]
    for b, bid in enumerate([0.0, 0.3, 0.6]):
        assert np.allclose(table[b], [0.5 - bid, 1.0 - bid])


def test_tied_bidders_split():
    game = fx.two_bidder_auction()
    bids = fx.AUCTION_BIDS
    for i, bid in enumerate(bids):
        assert game.payoffs[0][0][i, i, 0] == pytest.approx((1.0 - bid) / 2)
        assert game.payoffs[1][0][i, i, 0] == pytest.approx((0.4 - bid) / 2)


def test_second_price_charges_rival_bid():
    game = fx.two_bidder_auction("second")
    assert game.payoffs[0][0][3, 1, 0] == pytest.approx(1.0 - 0.2)


def test_two_bidder_equilibria_include_winning_low_bid():
    game = fx.two_bidder_auction()
    eq = pure_equilibrium_indices(game, "action")
    levels = [(fx.AUCTION_BIDS[a], fx.AUCTION_BIDS[b]) for a, b in eq]
    assert (0.4, 0.2) in levels
    for a, b in levels:
        assert a > b  # the high-worth bidder wins outright


def test_win_shares_feasible():
    rng = np.random.default_rng(0)
    bids = rng.integers(0, 4, size=(500, 3)).astype(float)
    s = win_shares(bids)
    assert np.all(s.sum(axis=1) <= 1.0 + 1e-15) and np.all(s >= 0)
    assert np.all((s > 0) == (bids == bids.max(axis=1, keepdims=True)))


def test_losing_bidder_gets_zero():
    game = fx.lo_auction()
    levels = np.asarray(fx.LO_BIDS)
    for n in range(2):
        for table in game.payoffs[n]:
            own = levels[:, None] if n == 0 else levels[None, :]
            rival = levels[None, :] if n == 0 else levels[:, None]
            losing = np.broadcast_to(own < rival, table.shape[:2])
            assert np.all(table[..., 0][losing] == 0.0)


def lo_hand_value(tn, own_bid, rival_bids, priors):
    """min over priors of sum_q q(w) * share * (worth - bid), by explicit cases."""
    worth = fx.LO_WORTHS[tn]
    vals = []
    for q in priors:
        total = 0.0
        for w, rb in enumerate(rival_bids):
            share = 1.0 if own_bid > rb else (0.5 if own_bid == rb else 0.0)
            total += q[w] * share * (worth - own_bid)
        vals.append(total)
    return min(vals)


def test_lo_agent_values_by_hand():
    game = fx.lo_auction()
    form = agent_form(game)
    rng = np.random.default_rng(3)
    for _ in range(5):
        flat = tuple(int(rng.integers(len(fx.LO_BIDS))) for _ in range(6))
        tn = int(rng.integers(3))
        rival = [fx.LO_BIDS[a] for a in flat[3:]]
        expected = lo_hand_value(tn, fx.LO_BIDS[flat[tn]], rival, fx.LO_PRIORS)
        assert form.value(tn, flat) == pytest.approx(expected, abs=1e-12)


def test_lo_overbidding_never_pays():
    game = fx.lo_auction()
    form = agent_form(game)
    for i, (n, tn) in enumerate(game.agents):
        over = np.asarray(fx.LO_BIDS) > fx.LO_WORTHS[tn]
        V = np.moveaxis(form.values[i], i, 0)
        assert np.all(V[over] <= 1e-15)


def test_lo_singleton_reduces_to_traditional():
    prior = [(0.2, 0.5, 0.3)]
    a = build_lo_auction(fx.LO_WORTHS, 2, fx.LO_BIDS, [prior, prior], kind="alarmist")
    t = build_lo_auction(fx.LO_WORTHS, 2, fx.LO_BIDS, [prior, prior], kind="traditional")
    for x, y in zip(agent_form(a).values, agent_form(t).values):
        assert np.array_equal(x, y)
    red = reduce_traditional(t)
    form = agent_form(t)
    for i, (n, tn) in enumerate(t.agents):
        for flat in [(0, 1, 2, 3, 4, 5), (8, 7, 6, 5, 4, 3), (4, 4, 4, 4, 4, 4)]:
            total = 0.0
            for j, (t_minus, ti, _) in enumerate(t.blocks(n, tn)):
                full = t.full_profile(n, tn, t_minus)
                a_prof = tuple(flat[t.agent_index(m, full[m])] for m in range(2))
                total += red.p[(n, tn)][j] * red.v[(n, tn)][j][a_prof]
            assert form.value(i, flat) == pytest.approx(total, abs=1e-12)


def test_price_at_cost_earns_nothing():
    spec = fx.pricing_spec(5)
    prices = np.array([[1.0, 2.0], [1.0, 3.0]])
    for w in fx.PRICING_STATES:
        assert np.all(pricing_utility(spec, 0, 2.0, prices, w) == 0.0)


def test_pricing_rejects_nonpositive_constants():
    with pytest.raises(ValidationError):
        spec = fx.pricing_spec(5)
        PricingSpec(**{**spec.__dict__, "c": [1.0, 0.0]})


def test_pricing_passes_checks():
    assert check_monotone_assumptions(fx.pricing_game(9)).passed


def single_type_pricing(rng, points=201):
    cost = float(rng.uniform(0.5, 1.5))
    b, c = rng.uniform(1.0, 3.0), rng.uniform(0.8, 2.0)
    d = rng.uniform(0.05, 0.5)
    e, f, g = rng.uniform(0.1, 1.0, size=3)
    mu = rng.dirichlet(np.ones(3))
    spec = PricingSpec(
        costs=[cost, cost], price_levels=[np.linspace(cost, cost + 6.0, points).tolist()] * 2,
        b=[b, b], c=[c, c], d=[[0, d], [d, 0]], e=[e, e], f=[f, f], g=[g, g],
        type_counts=[1, 1], state_levels=[0.0, 0.5, 1.0], tilde_sets=[[[[mu]]], [[[mu]]]],
    )
    return spec, float(mu @ [0.0, 0.5, 1.0])


def test_grid_best_response_matches_closed_form():
    rng = np.random.default_rng(17)
    for _ in range(5):
        spec, mean = single_type_pricing(rng)
        game = build_pricing_game(spec)
        form = agent_form(game)
        levels = game.action_grids[0][0].levels
        step = levels[1] - levels[0]
        for rival in rng.integers(0, len(levels) // 3, size=3):
            col = form.values[0][:, rival]
            grid_best = levels[int(np.argmax(col))]
            exact = closed_form_best_response(spec, 0, 1.0, [levels[rival]], mean)
            assert abs(grid_best - exact) <= step


def test_build_from_params_models():
    g = build_from_params("lo_auction", {"worths": [0.2, 0.5], "bidders": 2, "bids": {"low": 0, "high": 0.5, "count": 6},
                                         "priors": [[[0.5, 0.5]], [[0.5, 0.5]]], "kind": "traditional"})
    assert g.type_counts == (2, 2)
    with pytest.raises(ValidationError):
        build_from_params("lottery", {})
