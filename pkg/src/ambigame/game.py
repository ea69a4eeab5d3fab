"""Game primitives: players, types, action grids, states, utilities, attitudes.

Layout conventions used everywhere in the package:

* Type profiles ``t = (t_1, ..., t_N)`` are enumerated lexicographically
  (``itertools.product`` order) and addressed by that flat index.
* ``payoffs[n][t]`` is an array of shape ``(|A_{1,t_1}|, ..., |A_{N,t_N}|, |Omega_t|)``
  holding player ``n``'s utility for every pure action profile and state.
* The states player ``n`` of type ``t_n`` considers possible are the union of
  the blocks ``Omega_{t_n, t_-n}`` taken in lexicographic order of ``t_-n``.
  Priors are flat weight vectors over that concatenation.
* In a structured game every block is a copy of one grid ``tilde_grid``, so a
  factored prior ``p x nu`` flattens to ``(p[:, None] * nu).ravel()``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT
from .dist import DiscreteDistribution, SupportGrid, dirac, stochastic_leq

KINDS = ("traditional", "alarmist", "enterprising", "custom")


class ValidationError(ValueError):
    """A game or attitude violates one of its structural invariants."""


def _prob_vector(x, what: str, tol: float = DEFAULT.mass) -> np.ndarray:
    v = np.array(x, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{what}: non-finite entry")
    if np.any(v < 0):
        raise ValidationError(f"{what}: negative entry {v.min()}")
    s = v.sum(axis=-1)
    if np.any(np.abs(s - 1.0) > tol):
        raise ValidationError(f"{what}: does not sum to 1 (sum {np.ravel(s)[0]!r})")
    v.flags.writeable = False
    return v


@dataclass(frozen=True, eq=False)
class AmbiguityAttitude:
    """How one player-type ranks payoff-distribution vectors.

    ``priors`` are flat distributions over the player-type's states. For the
    factored form used by structured games, ``type_probs`` is the opponent-type
    mass function and ``nu_set`` holds arrays of shape ``(|T_-n|, |tilde|)``;
    ``tilde_sets`` optionally records the per-``t_-n`` prior sets the vectors
    were selected from. ``comparator(pi, pi2)`` is a strict-preference oracle
    used only by the ``custom`` kind.
    """

    kind: str
    priors: tuple[np.ndarray, ...] = ()
    type_probs: np.ndarray | None = None
    nu_set: tuple[np.ndarray, ...] = ()
    tilde_sets: tuple[tuple[np.ndarray, ...], ...] | None = None
    comparator: Callable | None = field(default=None, repr=False)
    comparator_name: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown attitude kind {self.kind!r}")
        if self.kind == "custom":
            if self.comparator is None:
                raise ValidationError("custom attitude needs a comparator")
            return
        if self.type_probs is not None:
            p = _prob_vector(self.type_probs, "type_probs")
            if not self.nu_set:
                raise ValidationError("factored attitude needs a nonempty nu_set")
            nus = tuple(_prob_vector(nu, "nu vector") for nu in self.nu_set)
            for nu in nus:
                if nu.ndim != 2 or nu.shape[0] != p.size:
                    raise ValidationError(
                        f"nu vector of shape {nu.shape} does not match {p.size} opponent type profiles"
                    )
            object.__setattr__(self, "type_probs", p)
            object.__setattr__(self, "nu_set", nus)
            if not self.priors:
                flat = tuple((p[:, None] * nu).ravel() for nu in nus)
                object.__setattr__(self, "priors", flat)
            if self.tilde_sets is not None:
                ts = tuple(tuple(_prob_vector(mu, "tilde prior") for mu in s) for s in self.tilde_sets)
                object.__setattr__(self, "tilde_sets", ts)
        priors = tuple(_prob_vector(r, "prior").ravel() for r in self.priors)
        if not priors:
            raise ValidationError(f"{self.kind} attitude has an empty prior set")
        if self.kind == "traditional" and len(priors) != 1:
            raise ValidationError("traditional attitude takes exactly one prior")
        if len({r.size for r in priors}) != 1:
            raise ValidationError("priors have different lengths")
        object.__setattr__(self, "priors", priors)

    @classmethod
    def traditional(cls, prior) -> AmbiguityAttitude:
        return cls("traditional", (prior,))

    @classmethod
    def alarmist(cls, priors) -> AmbiguityAttitude:
        return cls("alarmist", tuple(priors))

    @classmethod
    def enterprising(cls, priors) -> AmbiguityAttitude:
        return cls("enterprising", tuple(priors))

    @classmethod
    def factored(cls, kind, type_probs, nu_set, tilde_sets=None) -> AmbiguityAttitude:
        return cls(kind, type_probs=type_probs, nu_set=tuple(nu_set), tilde_sets=tilde_sets)

    @classmethod
    def custom(cls, comparator, name: str | None = None) -> AmbiguityAttitude:
        return cls("custom", comparator=comparator, comparator_name=name)

    @property
    def is_factored(self) -> bool:
        return self.type_probs is not None

    @cached_property
    def prior_matrix(self) -> np.ndarray:
        """Priors stacked into shape ``(|P|, |Omega_{n,t_n}|)``."""
        return np.stack(self.priors)

    def opt(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        """Reduce per-prior values: min, max, or the single traditional value."""
        if self.kind == "alarmist":
            return np.min(values, axis=axis)
        if self.kind == "enterprising":
            return np.max(values, axis=axis)
        if self.kind == "traditional":
            return np.take(values, 0, axis=axis)
        raise ValueError("custom preferences have no scalar satisfaction")

    def with_priors(self, priors) -> AmbiguityAttitude:
        """Same kind with a new flat prior list; factored data is dropped."""
        return AmbiguityAttitude(self.kind, tuple(priors))


@dataclass(frozen=True, eq=False)
class GameSpec:
    """A finite incomplete-information game.

    Exactly one of ``tilde_grid`` (structured: ``Omega_t = {t} x tilde``) or
    ``partition`` (general: explicit state subsets per type profile, with
    ``state_labels`` naming the states) is given.
    """

    type_counts: tuple[int, ...]
    action_grids: tuple[tuple[SupportGrid, ...], ...]
    payoffs: tuple[tuple[np.ndarray, ...], ...] = field(repr=False)
    attitudes: tuple[tuple[AmbiguityAttitude, ...], ...] = field(repr=False)
    tilde_grid: SupportGrid | None = None
    state_labels: tuple | None = None
    partition: tuple[tuple[int, ...], ...] | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "type_counts", tuple(int(k) for k in self.type_counts))
        object.__setattr__(self, "action_grids", tuple(tuple(g) for g in self.action_grids))
        object.__setattr__(self, "attitudes", tuple(tuple(a) for a in self.attitudes))
        if self.partition is not None:
            object.__setattr__(self, "partition", tuple(tuple(int(i) for i in b) for b in self.partition))
        if self.state_labels is not None:
            object.__setattr__(self, "state_labels", tuple(self.state_labels))
        payoffs = []
        for n, tables in enumerate(self.payoffs):
            row = []
            for t, tab in enumerate(tables):
                arr = np.array(tab, dtype=float)
                arr.flags.writeable = False
                row.append(arr)
            payoffs.append(tuple(row))
        object.__setattr__(self, "payoffs", tuple(payoffs))
        self.validate()

    # -- structure ---------------------------------------------------------

    @property
    def n_players(self) -> int:
        return len(self.type_counts)

    @property
    def structured(self) -> bool:
        return self.tilde_grid is not None

    @cached_property
    def type_profiles(self) -> tuple[tuple[int, ...], ...]:
        return tuple(itertools.product(*[range(k) for k in self.type_counts]))

    def profile_index(self, t: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(t), self.type_counts))

    @cached_property
    def agents(self) -> tuple[tuple[int, int], ...]:
        """Every (player, type) pair in lexicographic order."""
        return tuple((n, tn) for n, k in enumerate(self.type_counts) for tn in range(k))

    def agent_index(self, n: int, tn: int) -> int:
        return self.agents.index((n, tn))

    def opponent_profiles(self, n: int) -> tuple[tuple[int, ...], ...]:
        """Lexicographic list of opponents' type profiles ``t_-n``."""
        counts = [k for m, k in enumerate(self.type_counts) if m != n]
        return tuple(itertools.product(*[range(k) for k in counts]))

    def full_profile(self, n: int, tn: int, t_minus: Sequence[int]) -> tuple[int, ...]:
        t = list(t_minus)
        t.insert(n, tn)
        return tuple(t)

    def block_size(self, t_index: int) -> int:
        if self.structured:
            return self.tilde_grid.size
        return len(self.partition[t_index])

    def blocks(self, n: int, tn: int) -> list[tuple[tuple[int, ...], int, slice]]:
        """``(t_-n, profile index, slice into the flat state vector)`` per block."""
        out, start = [], 0
        for t_minus in self.opponent_profiles(n):
            ti = self.profile_index(self.full_profile(n, tn, t_minus))
            size = self.block_size(ti)
            out.append((t_minus, ti, slice(start, start + size)))
            start += size
        return out

    def omega_size(self, n: int, tn: int) -> int:
        return sum(self.block_size(ti) for _, ti, _ in self.blocks(n, tn))

    def action_sizes(self, t: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.action_grids[m][tm].size for m, tm in enumerate(t))

    @cached_property
    def _utility_grids(self) -> dict:
        grids = {}
        for n, tn in self.agents:
            vals = np.concatenate(
                [self.payoffs[n][ti].ravel() for _, ti, _ in self.blocks(n, tn)]
            )
            grids[(n, tn)] = SupportGrid.line(np.unique(vals))
        return grids

    def utility_grid(self, n: int, tn: int) -> SupportGrid:
        """Sorted image of player-type ``(n, t_n)``'s utility tables."""
        return self._utility_grids[(n, tn)]

    @property
    def utility_range(self) -> float:
        lo = min(float(p.min()) for row in self.payoffs for p in row)
        hi = max(float(p.max()) for row in self.payoffs for p in row)
        return hi - lo

    def attitude(self, n: int, tn: int) -> AmbiguityAttitude:
        return self.attitudes[n][tn]

    def with_attitudes(self, attitudes) -> GameSpec:
        return replace(self, attitudes=tuple(tuple(a) for a in attitudes))

    # -- validation --------------------------------------------------------

    def validate(self):
        N = self.n_players
        if N < 1:
            raise ValidationError("a game needs at least one player")
        if any(k < 1 for k in self.type_counts):
            raise ValidationError("every player needs at least one type")
        if (self.tilde_grid is None) == (self.partition is None):
            raise ValidationError("give exactly one of a structured state grid or a general partition")
        if len(self.action_grids) != N or len(self.payoffs) != N or len(self.attitudes) != N:
            raise ValidationError("per-player lists must have one entry per player")
        for n in range(N):
            if len(self.action_grids[n]) != self.type_counts[n]:
                raise ValidationError(f"player {n}: need one action grid per type")
            if len(self.attitudes[n]) != self.type_counts[n]:
                raise ValidationError(f"player {n}: need one attitude per type")
            for tn, g in enumerate(self.action_grids[n]):
                if not isinstance(g, SupportGrid) or g.ndim != 1:
                    raise ValidationError(f"action grid ({n},{tn}) must be a 1-D SupportGrid")
            if len(self.payoffs[n]) != len(self.type_profiles):
                raise ValidationError(f"player {n}: need one payoff table per type profile")
        if self.partition is not None:
            self._validate_partition()
        for n in range(N):
            for ti, t in enumerate(self.type_profiles):
                expected = self.action_sizes(t) + (self.block_size(ti),)
                tab = self.payoffs[n][ti]
                if tab.shape != expected:
                    raise ValidationError(
                        f"payoff table for player {n}, type profile {t} has shape {tab.shape}, "
                        f"expected {expected}"
                    )
                if not np.all(np.isfinite(tab)):
                    bad = tuple(int(i) for i in np.argwhere(~np.isfinite(tab))[0])
                    raise ValidationError(
                        f"payoff entry (n={n}, t={t}, a={bad[:-1]}, w={bad[-1]}) is not finite"
                    )
        for n, tn in self.agents:
            self._validate_attitude(n, tn)

    def _validate_partition(self):
        n_states = len(self.state_labels) if self.state_labels is not None else None
        if len(self.partition) != len(self.type_profiles):
            raise ValidationError("partition needs one state subset per type profile")
        seen = {}
        for ti, block in enumerate(self.partition):
            if not block:
                raise ValidationError(f"state subset for type profile {self.type_profiles[ti]} is empty")
            for s in block:
                if n_states is not None and not 0 <= s < n_states:
                    raise ValidationError(f"state index {s} out of range")
                if s in seen:
                    raise ValidationError(
                        f"state {s} belongs to type profiles {self.type_profiles[seen[s]]} "
                        f"and {self.type_profiles[ti]}: partition blocks overlap"
                    )
                seen[s] = ti
        if n_states is not None and len(seen) != n_states:
            missing = sorted(set(range(n_states)) - set(seen))
            raise ValidationError(f"states {missing} are not covered by the partition")

    def _validate_attitude(self, n, tn):
        att = self.attitudes[n][tn]
        if not isinstance(att, AmbiguityAttitude):
            raise ValidationError(f"attitude ({n},{tn}) is not an AmbiguityAttitude")
        if att.kind == "custom":
            from .satisfaction import sample_comparator_axioms

            rep = sample_comparator_axioms(att.comparator, self.omega_size(n, tn), 100, seed=0)
            if not (rep.irreflexive and rep.transitive):
                raise ValidationError(f"comparator of ({n},{tn}) fails {rep.violation[0]} on sampled inputs")
            return
        size = self.omega_size(n, tn)
        for r in att.priors:
            if r.size != size:
                raise ValidationError(
                    f"prior of player {n} type {tn} has {r.size} entries, expected {size}"
                )
        if att.is_factored:
            if not self.structured:
                raise ValidationError("factored priors require a structured game")
            n_opp = len(self.opponent_profiles(n))
            if att.type_probs.size != n_opp:
                raise ValidationError(
                    f"type_probs of ({n},{tn}) has {att.type_probs.size} entries, expected {n_opp}"
                )
            for nu in att.nu_set:
                if nu.shape != (n_opp, self.tilde_grid.size):
                    raise ValidationError(f"nu vector of ({n},{tn}) has shape {nu.shape}")

    # -- conversion --------------------------------------------------------

    def to_general(self) -> GameSpec:
        """Re-encode a structured game with explicit states ``T x tilde``."""
        if not self.structured:
            return self
        K = self.tilde_grid.size
        labels = tuple(
            {"types": list(t), "state": list(np.atleast_1d(self.tilde_grid.point(k)))}
            for t in self.type_profiles
            for k in range(K)
        )
        partition = tuple(tuple(range(ti * K, (ti + 1) * K)) for ti in range(len(self.type_profiles)))
        attitudes = tuple(
            tuple(
                a if a.kind == "custom" else AmbiguityAttitude(a.kind, a.priors)
                for a in row
            )
            for row in self.attitudes
        )
        return GameSpec(
            type_counts=self.type_counts,
            action_grids=self.action_grids,
            payoffs=self.payoffs,
            attitudes=attitudes,
            state_labels=labels,
            partition=partition,
            name=self.name,
        )


@dataclass(frozen=True, eq=False)
class StrategyProfile:
    """One action distribution per (player, type)."""

    strategies: tuple[tuple[DiscreteDistribution, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(tuple(s) for s in self.strategies))

    def __getitem__(self, key: tuple[int, int]) -> DiscreteDistribution:
        n, tn = key
        return self.strategies[n][tn]

    @classmethod
    def pure(cls, game: GameSpec, indices: Sequence[Sequence[int]]) -> StrategyProfile:
        """Dirac profile from action indices ``indices[n][t_n]``."""
        rows = []
        for n, row in enumerate(indices):
            out = []
            for tn, i in enumerate(row):
                g = game.action_grids[n][tn]
                out.append(dirac(g, g.point(int(i))))
            rows.append(tuple(out))
        return cls(tuple(rows))

    @classmethod
    def from_agent_indices(cls, game: GameSpec, flat: Sequence[int]) -> StrategyProfile:
        it = iter(flat)
        return cls.pure(game, [[next(it) for _ in range(k)] for k in game.type_counts])

    @classmethod
    def from_weights(cls, game: GameSpec, weights) -> StrategyProfile:
        rows = []
        for n, row in enumerate(weights):
            rows.append(
                tuple(DiscreteDistribution(game.action_grids[n][tn], w) for tn, w in enumerate(row))
            )
        return cls(tuple(rows))

    @classmethod
    def uniform(cls, game: GameSpec) -> StrategyProfile:
        return cls(
            tuple(
                tuple(DiscreteDistribution.uniform(g) for g in grids) for grids in game.action_grids
            )
        )

    def replace(self, n: int, tn: int, dist: DiscreteDistribution) -> StrategyProfile:
        rows = [list(r) for r in self.strategies]
        rows[n][tn] = dist
        return StrategyProfile(tuple(tuple(r) for r in rows))

    def agent_list(self) -> list[DiscreteDistribution]:
        return [d for row in self.strategies for d in row]

    def pure_indices(self) -> tuple[int, ...] | None:
        """Flat agent-ordered action indices if every strategy is a dirac."""
        out = []
        for d in self.agent_list():
            supp = d.support
            if len(supp) != 1:
                return None
            out.append(int(supp[0]))
        return tuple(out)

    def distance(self, other: StrategyProfile) -> float:
        """Sup-norm distance between weight vectors over all agents."""
        return max(
            float(np.max(np.abs(a.weights - b.weights)))
            for a, b in zip(self.agent_list(), other.agent_list())
        )

    def check_against(self, game: GameSpec):
        if len(self.strategies) != game.n_players:
            raise ValidationError("profile has the wrong number of players")
        for n, row in enumerate(self.strategies):
            if len(row) != game.type_counts[n]:
                raise ValidationError(f"profile has the wrong number of types for player {n}")
            for tn, d in enumerate(row):
                if d.grid != game.action_grids[n][tn]:
                    raise ValidationError(f"strategy ({n},{tn}) is not on the game's action grid")

    def to_json(self) -> list:
        return [[d.weights.tolist() for d in row] for row in self.strategies]


# -- prior-set constructors -----------------------------------------------


def _same(mu1: DiscreteDistribution, mu2: DiscreteDistribution) -> bool:
    return mu1.allclose(mu2, atol=DEFAULT.order)


def scenario_a_priors(tilde_sets: Sequence[Sequence[DiscreteDistribution]], opponent_counts: Sequence[int]) -> list[list[DiscreteDistribution]]:
    """Monotone selections from per-opponent-profile prior sets.

    ``tilde_sets[j]`` is the prior set for the ``j``-th opponent type profile
    (lexicographic over ``opponent_counts``). A selection
    ``(nu_j)_j`` is kept when ``nu_j <= nu_k`` in the usual stochastic order for
    every pair of comparable opponent profiles ``j <= k``.
    """
    profiles = list(itertools.product(*[range(k) for k in opponent_counts]))
    if len(tilde_sets) != len(profiles):
        raise ValidationError(f"need {len(profiles)} prior sets, got {len(tilde_sets)}")
    if any(len(s) == 0 for s in tilde_sets):
        raise ValidationError("every per-profile prior set must be nonempty")
    # comparable pairs of opponent profiles
    pairs = [
        (j, k)
        for j, tj in enumerate(profiles)
        for k, tk in enumerate(profiles)
        if j != k and all(a <= b for a, b in zip(tj, tk))
    ]
    leq = {}

    def ordered(j, x, k, y):
        key = (j, x, k, y)
        if key not in leq:
            leq[key] = stochastic_leq(tilde_sets[j][x], tilde_sets[k][y])
        return leq[key]

    selections = []
    for choice in itertools.product(*[range(len(s)) for s in tilde_sets]):
        if all(ordered(j, choice[j], k, choice[k]) for j, k in pairs):
            selections.append([tilde_sets[j][c] for j, c in enumerate(choice)])
    if not selections:
        raise ValidationError("no monotone selection exists: the scenario-A prior set is empty")
    return selections


def scenario_b_priors(tilde_set: Sequence[DiscreteDistribution], n_opponent_profiles: int) -> list[list[DiscreteDistribution]]:
    """Constant vectors ``(nu, ..., nu)``, one per member of the prior set."""
    if not tilde_set:
        raise ValidationError("prior set must be nonempty")
    return [[nu] * n_opponent_profiles for nu in tilde_set]


def selections_to_arrays(selections) -> list[np.ndarray]:
    """Stack each selection into an array of shape ``(|T_-n|, |tilde|)``."""
    return [np.stack([mu.weights for mu in sel]) for sel in selections]


# -- traditional reduction ------------------------------------------------


@dataclass(frozen=True, eq=False)
class TraditionalReduction:
    """Opponent-type probabilities and conditional expected utilities.

    ``p[(n, t_n)]`` has one entry per opponent type profile; ``v[(n, t_n)][j]``
    is an array over the pure action profile of the type profile built from the
    ``j``-th opponent profile.
    """

    p: dict
    v: dict


def reduce_traditional(game: GameSpec) -> TraditionalReduction:
    ps, vs = {}, {}
    for n, tn in game.agents:
        att = game.attitude(n, tn)
        if att.kind != "traditional":
            raise ValidationError(f"attitude ({n},{tn}) is {att.kind}, not traditional")
        rho = att.priors[0]
        p, v = [], []
        for t_minus, ti, sl in game.blocks(n, tn):
            mass = float(rho[sl].sum())
            if mass <= 0.0:
                raise ValidationError(
                    f"player {n} type {tn} gives zero probability to opponent types {t_minus}"
                )
            p.append(mass)
            v.append(np.tensordot(game.payoffs[n][ti], rho[sl] / mass, axes=([-1], [0])))
        ps[(n, tn)] = np.array(p)
        vs[(n, tn)] = v
    return TraditionalReduction(ps, vs)
