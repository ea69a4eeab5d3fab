"""Monotone pure equilibria of structured games.

Covers the increasing-differences checker, the five structural checks that
make the agent form supermodular, lattice (Tarski) iteration toward the
smallest and largest pure equilibria, and comparative statics over an ordered
parameter list.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bestresponse import agent_form
from .config import DEFAULT
from .dist import (
    DiscreteDistribution,
    LatticeConstructionError,
    SupportGrid,
    lattice_join,
    lattice_meet,
    stochastic_leq,
)
from .equilibrium import pure_equilibrium_indices, verify_profile
from .game import GameSpec, StrategyProfile, ValidationError

MAX_VIOLATIONS = 20


class AssumptionError(ValueError):
    """A game fails a structural check required by lattice iteration."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class OscillationError(RuntimeError):
    """Lattice iteration did not settle within the sweep bound."""


# -- increasing differences -----------------------------------------------------


def _as_points(values) -> list[tuple[float, ...]]:
    return [tuple(np.atleast_1d(np.asarray(v, dtype=float)).tolist()) for v in values]


def _strict_order(points) -> np.ndarray:
    P = np.array(points, dtype=float)
    leq = np.all(P[:, None, :] <= P[None, :, :], axis=2)
    return leq & ~np.eye(len(P), dtype=bool)


def check_increasing_differences(f, xs, ys, tol: float = 1e-10):
    """Brute-force check of ``f(x2,y2) - f(x1,y2) >= f(x2,y1) - f(x1,y1)``.

    ``f`` has shape ``(len(xs), len(ys))``; points may be scalars or tuples,
    ordered componentwise. Returns ``(ok, witness)`` where the witness is
    ``((x1, x2), (y1, y2))`` for the first violation found.
    """
    F = np.asarray(f, dtype=float)
    X, Y = _as_points(xs), _as_points(ys)
    if F.shape != (len(X), len(Y)):
        raise ValueError(f"table shape {F.shape} does not match {len(X)} x {len(Y)} points")
    cy = _strict_order(Y)
    y1s, y2s = np.nonzero(cy)
    if len(y1s) == 0:
        return True, None
    for i, j in zip(*np.nonzero(_strict_order(X))):
        d = F[j] - F[i]
        bad = d[y2s] - d[y1s] < -tol
        if bad.any():
            k = int(np.argmax(bad))
            unwrap = lambda p: p[0] if len(p) == 1 else p
            return False, (
                (unwrap(X[i]), unwrap(X[j])),
                (unwrap(Y[y1s[k]]), unwrap(Y[y2s[k]])),
            )
    return True, None


# -- structural checks --------------------------------------------------------


@dataclass
class CheckResult:
    status: str  # "pass", "fail" or "undecidable"
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, violation):
        self.status = "fail"
        if len(self.violations) < MAX_VIOLATIONS:
            self.violations.append(violation)

    def undecided(self, note):
        if self.status == "pass":
            self.status = "undecidable"
        self.notes.append(note)


@dataclass
class MonotoneReport:
    checks: dict

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks.values())

    def to_json(self) -> dict:
        return {
            name: {"status": c.status, "violations": c.violations, "notes": c.notes}
            for name, c in self.checks.items()
        }


CHECK_NAMES = (
    "utility_increasing_in_state",
    "increasing_differences",
    "type_probs_increasing",
    "prior_sets_sublattice",
    "prior_sets_increasing",
)


def _require_structured(game: GameSpec):
    if not game.structured:
        raise ValidationError("monotone analysis needs a structured game")
    for n, grids in enumerate(game.action_grids):
        if any(g != grids[0] for g in grids):
            raise ValidationError(f"player {n} has type-dependent action grids")


def utility_tensor(game: GameSpec, n: int) -> np.ndarray:
    """Player ``n``'s utility over ``(t_1..t_N, a_1..a_N, tilde dims...)``."""
    N = game.n_players
    A = tuple(game.action_grids[m][0].size for m in range(N))
    out = np.empty(game.type_counts + A + game.tilde_grid.shape)
    for ti, t in enumerate(game.type_profiles):
        out[t] = game.payoffs[n][ti].reshape(A + game.tilde_grid.shape)
    return out


def _axis_names(game: GameSpec) -> list[str]:
    N = game.n_players
    names = [f"t{m}" for m in range(N)] + [f"a{m}" for m in range(N)]
    names += [f"w{k}" for k in range(game.tilde_grid.ndim)]
    return names


def _cross_check(U, i, j, tol, result, label, names):
    D = np.diff(np.diff(U, axis=i), axis=j)
    bad = np.argwhere(D < -tol)
    for idx in bad[: MAX_VIOLATIONS]:
        result.add({"family": label, "axes": (names[i], names[j]), "at": [int(v) for v in idx], "value": float(D[tuple(idx)])})


def factored_view(game: GameSpec, n: int, tn: int):
    """``(type_probs, nu_list)`` for an attitude, or None when it does not factor.

    Factored attitudes are returned as stored. Flat priors factor when every
    prior puts the same positive mass on each opponent type profile; each
    prior then splits into those masses and per-profile conditionals.
    """
    att = game.attitude(n, tn)
    if att.kind == "custom":
        return None
    if att.is_factored:
        return att.type_probs, list(att.nu_set)
    blocks = game.blocks(n, tn)
    P = att.prior_matrix
    masses = np.array([[r[sl].sum() for _, _, sl in blocks] for r in P])
    if np.any(masses <= 0) or not np.allclose(masses, masses[0], rtol=0, atol=DEFAULT.order):
        return None
    nus = [np.stack([r[sl] / r[sl].sum() for _, _, sl in blocks]) for r in P]
    return masses[0], nus


def tilde_sets_of(game: GameSpec, n: int, tn: int) -> list[list[DiscreteDistribution]] | None:
    """Per-opponent-profile prior sets of a factoring attitude.

    Uses the recorded sets when available and otherwise the distinct
    projections of the vector set.
    """
    att = game.attitude(n, tn)
    g = game.tilde_grid
    if att.is_factored and att.tilde_sets is not None:
        return [[DiscreteDistribution(g, mu) for mu in s] for s in att.tilde_sets]
    view = factored_view(game, n, tn)
    if view is None:
        return None
    p, nus = view
    out = []
    for j in range(p.size):
        seen = []
        for nu in nus:
            mu = DiscreteDistribution(g, nu[j])
            if not any(mu.allclose(o, DEFAULT.order) for o in seen):
                seen.append(mu)
        out.append(seen)
    return out


def _member(mu, pset) -> bool:
    return any(mu.allclose(o, DEFAULT.order) for o in pset)


def _induced_leq(P1, P2, result: CheckResult, where):
    """Induced set order ``P1 <= P2``: meets land in ``P1`` and joins in ``P2``."""
    for a, mu1 in enumerate(P1):
        for b, mu2 in enumerate(P2):
            try:
                lo, hi = lattice_meet(mu1, mu2), lattice_join(mu1, mu2)
            except LatticeConstructionError as exc:
                result.undecided({"at": where, "pair": (a, b), "reason": str(exc)})
                continue
            if not _member(lo, P1):
                result.add({"at": where, "pair": (a, b), "missing": "meet"})
            if not _member(hi, P2):
                result.add({"at": where, "pair": (a, b), "missing": "join"})


def _opponent_type_grid(game: GameSpec, n: int) -> SupportGrid:
    return SupportGrid(tuple(tuple(range(k)) for m, k in enumerate(game.type_counts) if m != n))


def check_monotone_assumptions(game: GameSpec, tol: float = DEFAULT.order) -> MonotoneReport:
    """Exhaustively test the five structural conditions on the finite grids.

    1. utilities increase in the state;
    2. increasing differences between the own action and every coordinate of
       (types, opponents' actions, state), and between every coordinate of
       (types, opponents' actions) and every state coordinate;
    3. opponent-type probabilities increase stochastically in the own type;
    4. every per-opponent-profile prior set is a sublattice;
    5. those prior sets increase in the own type in the induced set order.
    """
    _require_structured(game)
    checks = {name: CheckResult("pass") for name in CHECK_NAMES}
    N = game.n_players
    names = _axis_names(game)
    w_axes = list(range(2 * N, 2 * N + game.tilde_grid.ndim))
    for n in range(N):
        U = utility_tensor(game, n)
        for k in w_axes:
            bad = np.argwhere(np.diff(U, axis=k) < -tol)
            for idx in bad[:MAX_VIOLATIONS]:
                checks["utility_increasing_in_state"].add(
                    {"player": n, "axis": names[k], "at": [int(v) for v in idx]}
                )
        own = N + n
        env = [ax for ax in range(2 * N) if ax != own]
        for ax in env + w_axes:
            _cross_check(U, own, ax, tol, checks["increasing_differences"], f"player {n}: own action", names)
        for ax in env:
            for k in w_axes:
                _cross_check(U, ax, k, tol, checks["increasing_differences"], f"player {n}: environment/state", names)

        tgrid = _opponent_type_grid(game, n)
        views = [factored_view(game, n, tn) for tn in range(game.type_counts[n])]
        if any(v is None for v in views):
            checks["type_probs_increasing"].undecided(f"player {n}: priors do not factor into type probabilities")
            checks["prior_sets_sublattice"].undecided(f"player {n}: priors do not factor into per-profile sets")
            checks["prior_sets_increasing"].undecided(f"player {n}: priors do not factor into per-profile sets")
            continue
        for tn in range(game.type_counts[n] - 1):
            p1 = DiscreteDistribution(tgrid, views[tn][0])
            p2 = DiscreteDistribution(tgrid, views[tn + 1][0])
            try:
                if not stochastic_leq(p1, p2, tol):
                    checks["type_probs_increasing"].add({"player": n, "types": (tn, tn + 1)})
            except ValueError as exc:
                checks["type_probs_increasing"].undecided(str(exc))
        sets = [tilde_sets_of(game, n, tn) for tn in range(game.type_counts[n])]
        for tn, per_profile in enumerate(sets):
            for j, pset in enumerate(per_profile):
                _induced_leq(pset, pset, checks["prior_sets_sublattice"], {"player": n, "type": tn, "opponents": j})
        for t1, t2 in itertools.combinations(range(game.type_counts[n]), 2):
            for j in range(len(sets[t1])):
                _induced_leq(
                    sets[t1][j], sets[t2][j], checks["prior_sets_increasing"],
                    {"player": n, "types": (t1, t2), "opponents": j},
                )
    return MonotoneReport(checks)


# -- lattice iteration ----------------------------------------------------------


@dataclass(frozen=True)
class MonotoneProfile:
    """Pure profile given as action indices ``actions[n][t_n]`` plus their levels."""

    actions: tuple[tuple[int, ...], ...]
    levels: tuple[tuple[float, ...], ...]

    @classmethod
    def from_agent_indices(cls, game: GameSpec, flat: Sequence[int]) -> MonotoneProfile:
        it = iter(flat)
        acts = tuple(tuple(int(next(it)) for _ in range(k)) for k in game.type_counts)
        lv = tuple(
            tuple(float(game.action_grids[n][tn].levels[a]) for tn, a in enumerate(row))
            for n, row in enumerate(acts)
        )
        return cls(acts, lv)

    def flat(self) -> tuple[int, ...]:
        return tuple(a for row in self.actions for a in row)

    def is_monotone(self) -> bool:
        return all(all(x <= y for x, y in zip(row, row[1:])) for row in self.levels)

    def __le__(self, other: MonotoneProfile) -> bool:
        return all(
            x <= y for r1, r2 in zip(self.levels, other.levels) for x, y in zip(r1, r2)
        )

    def to_strategy(self, game: GameSpec) -> StrategyProfile:
        return StrategyProfile.pure(game, self.actions)

    def to_json(self) -> dict:
        return {"actions": [list(r) for r in self.actions], "levels": [list(r) for r in self.levels]}


@dataclass
class TarskiResult:
    profile: MonotoneProfile
    sweeps: int
    direction: str
    regret: float


def tarski_iterate(
    game: GameSpec,
    direction: str = "bottom",
    eps: float = DEFAULT.regret,
    force: bool = False,
    form=None,
) -> TarskiResult:
    """Iterate lowest (bottom) or highest (top) best responses from the matching corner.

    All agents update simultaneously from the current profile. The fixed
    point is checked for monotonicity in types and re-verified in action mode.
    """
    if direction not in ("bottom", "top"):
        raise ValueError("direction must be 'bottom' or 'top'")
    _require_structured(game)
    if not force:
        kinds = {game.attitude(n, tn).kind for n, tn in game.agents}
        if not kinds <= {"enterprising", "traditional"}:
            raise AssumptionError(f"lattice iteration needs enterprising attitudes, found {sorted(kinds)}")
        report = check_monotone_assumptions(game)
        if not report.passed:
            failed = [k for k, c in report.checks.items() if c.status != "pass"]
            raise AssumptionError(f"structural checks failed: {failed}", report)
    form = form or agent_form(game)
    sizes = form.sizes
    current = [0 if direction == "bottom" else s - 1 for s in sizes]
    bound = sum(sizes) + 1
    for sweep in range(1, bound + 1):
        nxt = []
        for i in range(len(sizes)):
            idx = [p if s > 1 else 0 for p, s in zip(current, form.values[i].shape)]
            idx[i] = slice(None)
            vals = form.values[i][tuple(idx)]
            best = np.flatnonzero(vals >= vals.max() - eps)
            nxt.append(int(best[0] if direction == "bottom" else best[-1]))
        if nxt == current:
            prof = MonotoneProfile.from_agent_indices(game, current)
            rep = verify_profile(game, prof.to_strategy(game), "action", eps)
            if not rep.verdict:
                raise AssumptionError("fixed point failed verification", rep)
            if not prof.is_monotone():
                raise AssumptionError(f"fixed point {prof.levels} is not monotone in types")
            return TarskiResult(prof, sweep, direction, rep.max_regret)
        current = nxt
    raise OscillationError(f"no fixed point within {bound} sweeps: structural assumptions are violated")


def monotone_pure_equilibria(game: GameSpec, eps: float = DEFAULT.regret, cap: int = 10**6) -> list[MonotoneProfile]:
    """Pure action-mode equilibria whose actions increase in every player's type."""
    out = []
    for idx in pure_equilibrium_indices(game, "action", eps, cap):
        prof = MonotoneProfile.from_agent_indices(game, idx)
        if prof.is_monotone():
            out.append(prof)
    return out


# -- comparative statics ------------------------------------------------------


@dataclass
class ParametricFamily:
    """Games indexed by a strictly increasing parameter list."""

    lambdas: Sequence[float]
    builder: Callable[[float], GameSpec]

    def __post_init__(self):
        lam = list(self.lambdas)
        if not lam:
            raise ValueError("a family needs at least one parameter value")
        if any(b <= a for a, b in zip(lam, lam[1:])):
            raise ValueError("parameter values must be strictly increasing")
        self.lambdas = lam

    def games(self) -> list[GameSpec]:
        return [self.builder(lam) for lam in self.lambdas]


def check_parametric_pair(g1: GameSpec, g2: GameSpec, tol: float = DEFAULT.order) -> MonotoneReport:
    """Conditions linking two consecutive members of a family.

    1'. the utility change from ``g1`` to ``g2`` increases in the own action and
        in the state;
    2'. opponent-type probabilities weakly increase stochastically;
    3'. per-opponent-profile prior sets increase in the induced set order.
    """
    _require_structured(g1)
    _require_structured(g2)
    checks = {name: CheckResult("pass") for name in ("utility_shift", "type_probs_shift", "prior_sets_shift")}
    N = g1.n_players
    names = _axis_names(g1)
    w_axes = list(range(2 * N, 2 * N + g1.tilde_grid.ndim))
    for n in range(N):
        D = utility_tensor(g2, n) - utility_tensor(g1, n)
        for ax in [N + n] + w_axes:
            bad = np.argwhere(np.diff(D, axis=ax) < -tol)
            for idx in bad[:MAX_VIOLATIONS]:
                checks["utility_shift"].add({"player": n, "axis": names[ax], "at": [int(v) for v in idx]})
        tgrid = _opponent_type_grid(g1, n)
        for tn in range(g1.type_counts[n]):
            v1, v2 = factored_view(g1, n, tn), factored_view(g2, n, tn)
            if v1 is None or v2 is None:
                checks["type_probs_shift"].undecided(f"({n},{tn}) priors do not factor")
                checks["prior_sets_shift"].undecided(f"({n},{tn}) priors do not factor")
                continue
            p1 = DiscreteDistribution(tgrid, v1[0])
            p2 = DiscreteDistribution(tgrid, v2[0])
            if not stochastic_leq(p1, p2, tol):
                checks["type_probs_shift"].add({"player": n, "type": tn})
            s1, s2 = tilde_sets_of(g1, n, tn), tilde_sets_of(g2, n, tn)
            for j in range(len(s1)):
                _induced_leq(s1[j], s2[j], checks["prior_sets_shift"], {"player": n, "type": tn, "opponents": j})
    return MonotoneReport(checks)


@dataclass
class SweepReport:
    lambdas: list
    bottom: list
    top: list
    assumption_reports: list
    pair_reports: list
    increasing: bool
    errors: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "lambdas": self.lambdas,
            "bottom": [p.to_json() if p else None for p in self.bottom],
            "top": [p.to_json() if p else None for p in self.top],
            "assumptions": [r.to_json() for r in self.assumption_reports],
            "parametric": [r.to_json() for r in self.pair_reports],
            "increasing": self.increasing,
            "errors": {str(k): v for k, v in sorted(self.errors.items())},
        }


def comparative_statics_sweep(family: ParametricFamily, eps: float = DEFAULT.regret, jobs: int = 1, force: bool = False) -> SweepReport:
    """Extremal monotone equilibria per parameter value and whether they increase."""
    games = family.games()

    def solve(g):
        rep = check_monotone_assumptions(g)
        form = agent_form(g)
        out = {"report": rep}
        for d in ("bottom", "top"):
            try:
                out[d] = tarski_iterate(g, d, eps, force=force, form=form).profile
            except (AssumptionError, OscillationError) as exc:
                out[d] = None
                out.setdefault("errors", []).append(f"{d}: {exc}")
        return out

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(solve, games))
    else:
        results = [solve(g) for g in games]
    pairs = [check_parametric_pair(a, b) for a, b in zip(games, games[1:])]
    bottom = [r["bottom"] for r in results]
    top = [r["top"] for r in results]
    errors = {lam: r["errors"] for lam, r in zip(family.lambdas, results) if "errors" in r}

    def chain(profiles):
        return all(p is not None for p in profiles) and all(a <= b for a, b in zip(profiles, profiles[1:]))

    return SweepReport(
        lambdas=list(family.lambdas),
        bottom=bottom,
        top=top,
        assumption_reports=[r["report"] for r in results],
        pair_reports=pairs,
        increasing=chain(bottom) and chain(top),
        errors=errors,
    )
