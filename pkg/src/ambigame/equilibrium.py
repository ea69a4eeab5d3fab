"""Equilibrium verification, pure enumeration, iteration, and a robustness probe."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bestresponse import (
    action_best_set,
    action_values,
    agent_form,
    dist_best_response,
    dist_best_response_grid,
    value_matrix,
)
from .config import DEFAULT
from .dist import DiscreteDistribution
from .game import GameSpec, StrategyProfile, ValidationError
from .lp import solve_matrix_game
from .payoffvec import integrate_kernel, kernel
from .satisfaction import prefers

MODES = ("action", "distribution")
DEFAULT_CAP = 10**6


class CapExceededError(ValueError):
    """The pure-profile count exceeds the enumeration cap."""


class NoConvergence(RuntimeError):
    """Best-response iteration did not reach a verified fixed point."""

    def __init__(self, message, tail=()):
        super().__init__(message)
        self.tail = list(tail)


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass
class EquilibriumReport:
    """Per-agent regrets and verdict for a candidate profile.

    ``off_support`` is only filled in action mode. ``witnesses`` holds, for
    every failing agent, the deviation that exposes it.
    """

    mode: str
    epsilon: float
    regrets: dict
    off_support: dict
    verdict: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def max_regret(self) -> float:
        return max(self.regrets.values()) if self.regrets else 0.0

    def to_json(self) -> dict:
        key = lambda k: f"{k[0]},{k[1]}"
        return {
            "mode": self.mode,
            "epsilon": self.epsilon,
            "verdict": self.verdict,
            "regrets": {key(k): v for k, v in sorted(self.regrets.items())},
            "off_support": {key(k): v for k, v in sorted(self.off_support.items())},
            "witnesses": {key(k): v for k, v in sorted(self.witnesses.items())},
        }


CUSTOM_GRID_STEP = 0.05


def _verify_agent_action(game, profile, n, tn, eps):
    delta = profile[n, tn]
    if game.attitude(n, tn).kind == "custom":
        best = action_best_set(game, n, tn, profile, eps)
        off = float(np.delete(delta.weights, best).sum())
        # no scalar regret exists; the off-support mass stands in for it
        witness = None if off <= DEFAULT.mass else {"unsupported_mass": off, "maximal_actions": best}
        return off, off, witness
    vals = action_values(game, n, tn, profile)
    best = np.flatnonzero(vals >= vals.max() - eps)
    off = float(np.delete(delta.weights, best).sum())
    supported = np.flatnonzero(delta.weights > DEFAULT.mass)
    worst = int(supported[np.argmin(vals[supported])])
    regret = max(0.0, float(vals.max() - vals[worst]))
    witness = None
    if regret > eps or off > DEFAULT.mass:
        witness = {"worst_supported_action": worst, "best_action": int(np.argmax(vals)), "gap": regret}
    return regret, off, witness


def _verify_agent_distribution(game, profile, n, tn, eps):
    delta = profile[n, tn]
    att = game.attitude(n, tn)
    if att.kind == "custom":
        kern = kernel(game, n, tn, profile)
        mine = integrate_kernel(kern, delta)
        scan = dist_best_response_grid(game, n, tn, profile, CUSTOM_GRID_STEP)
        for p in scan.points:
            if prefers(integrate_kernel(kern, DiscreteDistribution(delta.grid, p)), mine, att):
                return 1.0, {"preferred_distribution": p.tolist()}
        return 0.0, None
    br = dist_best_response(game, n, tn, profile)
    regret = max(0.0, br.regret_of(delta))
    witness = None
    if regret > eps:
        witness = {"best_distribution": br.optimal_dist.weights.tolist(), "best_value": br.value, "gap": regret}
    return regret, witness


def verify_profile(game: GameSpec, profile: StrategyProfile, mode: str = "action", eps: float = DEFAULT.regret) -> EquilibriumReport:
    """Check every player-type's strategy against its best responses.

    Action mode: the strategy must put mass only on actions within ``eps`` of
    the best pure satisfaction; the regret is the gap to the worst supported
    action. Distribution mode: the regret is the optimal mixed satisfaction
    minus the strategy's own.
    """
    _check_mode(mode)
    profile.check_against(game)
    regrets, offs, witnesses = {}, {}, {}
    for n, tn in game.agents:
        if mode == "action":
            r, off, w = _verify_agent_action(game, profile, n, tn, eps)
            offs[(n, tn)] = off
        else:
            r, w = _verify_agent_distribution(game, profile, n, tn, eps)
        regrets[(n, tn)] = r
        if w is not None:
            witnesses[(n, tn)] = w
    verdict = all(r <= eps for r in regrets.values()) and all(o <= DEFAULT.mass for o in offs.values())
    return EquilibriumReport(mode, eps, regrets, offs, verdict, witnesses)


# -- pure enumeration -------------------------------------------------------


def _lp_values(G: np.ndarray, own: int) -> np.ndarray:
    """Matrix-game values over every configuration of the non-own axes.

    ``G`` has agent axes plus a trailing prior axis; the result keeps the
    agent axes with the own axis reduced to size 1.
    """
    moved = np.moveaxis(G, own, -2)  # (..., A_own, P)
    rest = moved.shape[:-2]
    flat = moved.reshape(-1, *moved.shape[-2:])
    cache = {}
    out = np.empty(len(flat))
    for i, mat in enumerate(flat):
        key = mat.tobytes()
        if key not in cache:
            cache[key] = solve_matrix_game(mat).value
        out[i] = cache[key]
    return np.expand_dims(out.reshape(rest), own)


def pure_equilibrium_indices(
    game: GameSpec, mode: str = "action", eps: float = DEFAULT.regret, cap: int = DEFAULT_CAP, form=None
) -> list[tuple[int, ...]]:
    """Agent-ordered action indices of every pure equilibrium, sorted."""
    _check_mode(mode)
    form = form or agent_form(game)
    total = int(np.prod(form.sizes, dtype=np.int64))
    if total > cap:
        raise CapExceededError(f"{total} pure profiles exceeds the cap {cap}")
    ok = np.ones(form.sizes, dtype=bool)
    for i, kind in enumerate(form.kinds):
        V = form.values[i]
        if mode == "distribution" and kind == "alarmist":
            best = _lp_values(form.per_prior[i], i)
        else:
            best = V.max(axis=i, keepdims=True)
        ok &= best - V <= eps
    return [tuple(int(v) for v in idx) for idx in np.argwhere(ok)]


def enumerate_pure_equilibria(
    game: GameSpec, mode: str = "action", eps: float = DEFAULT.regret, cap: int = DEFAULT_CAP
) -> list[StrategyProfile]:
    """Every pure profile that passes verification, in lexicographic order.

    Each profile found by the vectorized scan is re-checked with
    :func:`verify_profile`; a disagreement is a bug and raises.
    """
    out = []
    for idx in pure_equilibrium_indices(game, mode, eps, cap):
        prof = StrategyProfile.from_agent_indices(game, idx)
        if not verify_profile(game, prof, mode, eps).verdict:
            raise RuntimeError(f"enumerated profile {idx} fails verification")
        out.append(prof)
    return out


# -- best-response iteration --------------------------------------------------


@dataclass
class IterationResult:
    profile: StrategyProfile
    iterations: int
    report: EquilibriumReport


def _target(game, profile, n, tn, mode, eps):
    """Best-response target; the current strategy is kept when already optimal."""
    delta = profile[n, tn]
    grid = delta.grid
    att = game.attitude(n, tn)
    if att.kind == "custom":
        raise ValidationError("iteration needs satisfaction attitudes")
    G = value_matrix(game, n, tn, profile)
    vals = att.opt(G, axis=1)
    best = np.flatnonzero(vals >= vals.max() - eps)
    if mode == "action" or att.kind != "alarmist":
        if mode == "action":
            current_ok = np.delete(delta.weights, best).sum() <= DEFAULT.mass
        else:
            current_ok = vals.max() - float(att.opt(delta.weights @ G)) <= eps
        if current_ok:
            return delta.weights
        w = np.zeros(grid.size)
        w[best] = 1.0 / len(best)
        return w
    sol = solve_matrix_game(G)
    if sol.value - float(att.opt(delta.weights @ G)) <= eps:
        return delta.weights
    return sol.row_strategy


def _snap(game, weights, threshold):
    rows = []
    for n, row in enumerate(weights):
        out = []
        for w in row:
            w = np.where(w < threshold, 0.0, w)
            out.append(w / w.sum())
        rows.append(out)
    return StrategyProfile.from_weights(game, rows)


def best_response_iteration(
    game: GameSpec,
    mode: str = "action",
    init: StrategyProfile | None = None,
    damping: float = 0.5,
    max_iter: int = 1000,
    tol: float = 1e-8,
    eps: float = DEFAULT.regret,
) -> IterationResult:
    """Damped simultaneous best-response updates ``d <- (1 - a) d + a b``.

    Action mode targets the uniform mixture over the maximal actions, and
    distribution mode the optimal mixture. A player-type whose current
    strategy is already optimal keeps it. Once the largest weight change drops
    below ``tol`` the profile is cleaned of weights below ``10 tol`` and must
    pass verification at ``10 tol`` before it is returned.
    """
    _check_mode(mode)
    if not 0 < damping <= 1:
        raise ValueError("damping must lie in (0, 1]")
    profile = init or StrategyProfile.uniform(game)
    profile.check_against(game)
    trail = []
    for it in range(1, max_iter + 1):
        new = [
            [
                (1.0 - damping) * profile[n, tn].weights
                + damping * _target(game, profile, n, tn, mode, eps)
                for tn in range(game.type_counts[n])
            ]
            for n in range(game.n_players)
        ]
        nxt = StrategyProfile.from_weights(game, [[w / w.sum() for w in row] for row in new])
        change = nxt.distance(profile)
        trail.append({"iteration": it, "change": change, "profile": nxt.to_json()})
        profile = nxt
        if change < tol:
            candidate = _snap(game, new, 10 * tol)
            report = verify_profile(game, candidate, mode, 10 * tol)
            if report.verdict:
                return IterationResult(candidate, it, report)
    raise NoConvergence(f"no verified fixed point after {max_iter} iterations", trail[-10:])


# -- robustness probe ---------------------------------------------------------


def perturb_priors(game: GameSpec, eta: float) -> GameSpec:
    """Move every prior toward the uniform distribution by ``eta``."""
    rows = []
    for n in range(game.n_players):
        row = []
        for tn in range(game.type_counts[n]):
            att = game.attitude(n, tn)
            if att.kind == "custom":
                raise ValidationError("the probe needs satisfaction attitudes")
            if eta == 0:
                row.append(att)
                continue
            P = att.prior_matrix
            u = np.full(P.shape[1], 1.0 / P.shape[1])
            row.append(att.with_priors([(1.0 - eta) * r + eta * u for r in P]))
        rows.append(row)
    return game.with_attitudes(rows)


def _set_distance(targets, base) -> float:
    """Directed distance from ``targets`` to ``base`` in the sup norm of weights."""
    if not targets:
        return 0.0
    if not base:
        return 1.0
    arr_b = np.array(base)
    return max(float(np.min(np.any(arr_b != np.array(t), axis=1).astype(float))) for t in targets)


@dataclass
class ProbeReport:
    mode: str
    base: list
    etas: list
    equilibria: list
    distances: list
    non_increasing: bool

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "base": [list(p) for p in self.base],
            "etas": self.etas,
            "equilibria": [[list(p) for p in s] for s in self.equilibria],
            "distances": self.distances,
            "non_increasing": self.non_increasing,
        }


def robustness_probe(game: GameSpec, etas: Sequence[float], mode: str = "action", eps: float = DEFAULT.regret) -> ProbeReport:
    """Pure equilibria under prior perturbation and their distance to the base set.

    Distances are directed: the largest distance from a perturbed
    equilibrium to the nearest base equilibrium. Pure profiles are at sup-norm
    distance 0 or 1. The report states whether distances are non-increasing
    as ``eta`` shrinks.
    """
    for eta in etas:
        if not 0 <= eta < 1:
            raise ValueError("eta values must lie in [0, 1)")
    base = pure_equilibrium_indices(game, mode, eps)
    sets, dists = [], []
    for eta in etas:
        eq = pure_equilibrium_indices(perturb_priors(game, eta), mode, eps)
        sets.append(eq)
        dists.append(_set_distance(eq, base))
    order = np.argsort(-np.asarray(etas, dtype=float), kind="stable")
    seq = [dists[i] for i in order]
    non_inc = all(b <= a for a, b in zip(seq, seq[1:]))
    return ProbeReport(mode, base, list(map(float, etas)), sets, dists, non_inc)
