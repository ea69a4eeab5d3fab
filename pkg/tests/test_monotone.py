import numpy as np
import pytest

from ambigame import fixtures as fx
from ambigame.bestresponse import agent_form
from ambigame.dist import SupportGrid
from ambigame.equilibrium import verify_profile
from ambigame.game import AmbiguityAttitude, GameSpec
from ambigame.models import build_pricing_game
from ambigame.monotone import (
    CHECK_NAMES,
    AssumptionError,
    ParametricFamily,
    check_increasing_differences,
    check_monotone_assumptions,
    comparative_statics_sweep,
    monotone_pure_equilibria,
    tarski_iterate,
)


def test_increasing_differences_examples():
    xs = ys = [0.0, 1.0]
    f = np.outer(xs, ys)
    assert check_increasing_differences(f, xs, ys) == (True, None)
    ok, witness = check_increasing_differences(-f, xs, ys)
    assert not ok and witness == ((0.0, 1.0), (0.0, 1.0))


def test_increasing_differences_brute_force():
    rng = np.random.default_rng(1)
    xs, ys = [0, 1, 2], [(0, 0), (0, 1), (1, 0), (1, 1)]
    for _ in range(200):
        f = rng.integers(-2, 3, size=(3, 4)).astype(float)
        expected = all(
            f[x2, y2] - f[x1, y2] >= f[x2, y1] - f[x1, y1]
            for x1 in range(3) for x2 in range(x1 + 1, 3)
            for y1 in range(4) for y2 in range(4)
            if y1 != y2 and all(a <= b for a, b in zip(ys[y1], ys[y2]))
        )
        assert check_increasing_differences(f, xs, ys)[0] == expected


def test_agent_values_have_increasing_differences_in_pricing():
    game = fx.pricing_game(5)
    form = agent_form(game)
    levels = game.action_grids[0][0].levels
    for n in range(game.n_players):
        opp = [i for i, (m, _) in enumerate(game.agents) if m != n]
        columns, ys = [], []
        for tn in range(game.type_counts[n]):
            i = game.agent_index(n, tn)
            V = form.values[i]
            sq = V.reshape([V.shape[i]] + [V.shape[j] for j in opp])
            columns.append(sq.reshape(len(levels), -1))
            for combo in np.ndindex(*sq.shape[1:]):
                ys.append((tn,) + tuple(levels[c] for c in combo))
        ok, witness = check_increasing_differences(np.hstack(columns), levels, ys)
        assert ok, witness


def test_pricing_fixture_passes_all_checks():
    rep = check_monotone_assumptions(fx.pricing_game())
    assert set(rep.checks) == set(CHECK_NAMES)
    assert rep.passed


def test_negated_state_effect_fails_utility_check():
    spec = fx.pricing_spec(5)
    spec.f = [-0.5, -0.5]
    rep = check_monotone_assumptions(build_pricing_game(spec))
    check = rep.checks["utility_increasing_in_state"]
    assert check.status == "fail" and check.violations


def test_singleton_priors_sublattice_passes():
    rep = check_monotone_assumptions(fx.pricing_game(5, singleton=True))
    assert rep.checks["prior_sets_sublattice"].status == "pass"


def test_alarmist_pricing_needs_force():
    game = fx.pricing_game(5, kind="alarmist")
    with pytest.raises(AssumptionError):
        tarski_iterate(game)


def test_tarski_single_action_game():
    game = GameSpec((1,), ((SupportGrid.indices(1),),), ((np.array([[0.3]]),),),
                    ((AmbiguityAttitude.traditional((1.0,)),),), tilde_grid=SupportGrid.line([0.0]))
    assert tarski_iterate(game).profile.actions == ((0,),)


@pytest.mark.parametrize("singleton", [True, False])
def test_tarski_matches_enumeration_extremes(singleton):
    game = fx.pricing_game(5, singleton=singleton)
    lo, hi = tarski_iterate(game, "bottom"), tarski_iterate(game, "top")
    assert lo.profile <= hi.profile
    for r in (lo, hi):
        assert r.profile.is_monotone()
        assert verify_profile(game, r.profile.to_strategy(game), "action").verdict
    found = monotone_pure_equilibria(game)
    assert lo.profile in found and hi.profile in found
    assert all(lo.profile <= p <= hi.profile for p in found)


def test_tarski_pricing_21_points():
    game = fx.pricing_game(21, singleton=True)
    lo, hi = tarski_iterate(game, "bottom"), tarski_iterate(game, "top")
    assert lo.sweeps <= 50 and hi.sweeps <= 50
    for r in (lo, hi):
        for row in r.profile.levels:
            assert row[0] < row[1]


def test_constant_family_has_constant_outputs():
    fam = ParametricFamily([0.0, 1.0, 2.0], lambda lam: fx.pricing_game(5))
    rep = comparative_statics_sweep(fam)
    assert rep.increasing
    assert len({p.actions for p in rep.bottom}) == 1 and len({p.actions for p in rep.top}) == 1


def test_pricing_family_increases_and_matches_enumeration():
    fam = fx.pricing_family(points=9)
    rep = comparative_statics_sweep(fam, jobs=2)
    assert rep.increasing and all(r.passed for r in rep.pair_reports)
    for g, lo, hi in zip(fam.games(), rep.bottom, rep.top):
        found = monotone_pure_equilibria(g)
        assert lo in found and hi in found
        assert all(lo <= p <= hi for p in found)


def test_violating_family_is_flagged():
    def build(lam):
        spec = fx.pricing_spec(9)
        spec.c = [lam, lam]
        return build_pricing_game(spec)

    rep = comparative_statics_sweep(ParametricFamily([1.0, 1.2, 1.4], build))
    assert not rep.increasing
    assert all(r.checks["utility_shift"].status == "fail" for r in rep.pair_reports)
