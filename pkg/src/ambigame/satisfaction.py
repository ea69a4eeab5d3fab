"""Satisfaction values, strict preference, and sampled shape checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dist import DiscreteDistribution, SupportGrid
from .game import AmbiguityAttitude
from .payoffvec import FiniteKernel, PayoffDistVector, integrate_kernel, mix_vectors


def _prior_weights(rho) -> np.ndarray:
    if isinstance(rho, DiscreteDistribution):
        return rho.weights
    return np.asarray(rho, dtype=float)


def s0(pi: PayoffDistVector, rho) -> float:
    """Expected utility of ``pi`` under the single prior ``rho``."""
    r = _prior_weights(rho)
    if r.shape != (pi.n_states,):
        raise ValueError(f"prior has {r.size} entries but the vector has {pi.n_states} states")
    return float(r @ pi.means())


def prior_values(pi: PayoffDistVector, attitude: AmbiguityAttitude) -> np.ndarray:
    """``s0`` under every prior of the attitude's set."""
    if attitude.kind == "custom":
        raise ValueError("custom preferences have no scalar satisfaction")
    P = attitude.prior_matrix
    if P.shape[1] != pi.n_states:
        raise ValueError(f"priors have {P.shape[1]} entries but the vector has {pi.n_states} states")
    m = pi.means()
    # row by row so each value is bit-identical to ``s0`` under that prior
    return np.array([r @ m for r in P])


def satisfaction(pi: PayoffDistVector, attitude: AmbiguityAttitude) -> float:
    """Worst (alarmist), best (enterprising) or single (traditional) expected utility."""
    return float(attitude.opt(prior_values(pi, attitude)))


def prefers(pi: PayoffDistVector, pi2: PayoffDistVector, attitude: AmbiguityAttitude) -> bool:
    """Strict preference of ``pi`` over ``pi2``; exact comparison, no tolerance."""
    if pi.owner != pi2.owner:
        raise ValueError("vectors belong to different player-types")
    if attitude.kind == "custom":
        return bool(attitude.comparator(pi, pi2))
    return satisfaction(pi, attitude) > satisfaction(pi2, attitude)


# -- named comparators for custom preferences --------------------------------


def _uniform_mean(pi):
    return float(pi.means().mean())


def _worst_state(pi):
    return float(pi.means().min())


def _best_state(pi):
    return float(pi.means().max())


COMPARATORS = {
    "uniform_mean": lambda x, y: _uniform_mean(x) > _uniform_mean(y),
    "worst_state": lambda x, y: _worst_state(x) > _worst_state(y),
    "best_state": lambda x, y: _best_state(x) > _best_state(y),
}


def comparator_from_attitude(attitude: AmbiguityAttitude):
    """Strict-preference oracle equivalent to a satisfaction attitude."""
    return lambda x, y: satisfaction(x, attitude) > satisfaction(y, attitude)


def random_vector(rng: np.random.Generator, owner, grid: SupportGrid, n_states: int, sparse: bool = True) -> PayoffDistVector:
    w = rng.dirichlet(np.full(grid.size, 0.5 if sparse else 1.0), size=n_states)
    return PayoffDistVector(owner, grid, w)


@dataclass
class AxiomReport:
    irreflexive: bool
    transitive: bool
    samples: int
    violation: tuple | None = None


def sample_comparator_axioms(comparator, n_states: int, samples: int = 100, seed: int = 0, grid: SupportGrid | None = None) -> AxiomReport:
    """Spot-check irreflexivity and transitivity of a strict-preference oracle."""
    rng = np.random.default_rng(seed)
    grid = grid or SupportGrid.line(np.linspace(0.0, 1.0, 4))
    irreflexive = transitive = True
    violation = None
    for _ in range(samples):
        x, y, z = (random_vector(rng, (0, 0), grid, n_states) for _ in range(3))
        if comparator(x, x):
            irreflexive, violation = False, ("irreflexivity", x)
            break
        if comparator(x, y) and comparator(y, z) and not comparator(x, z):
            transitive, violation = False, ("transitivity", x, y, z)
            break
    return AxiomReport(irreflexive, transitive, samples, violation)


# -- shape checks -------------------------------------------------------------


@dataclass
class ShapeReport:
    """Sampled verdicts: True means no counterexample in ``samples`` draws."""

    concave: bool
    convex: bool
    quasi_concave: bool
    strongly_concave: bool
    strongly_convex: bool
    samples: int
    seed: int
    counterexamples: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "concave": self.concave,
            "convex": self.convex,
            "quasi_concave": self.quasi_concave,
            "strongly_concave": self.strongly_concave,
            "strongly_convex": self.strongly_convex,
            "samples": self.samples,
            "seed": self.seed,
        }


def check_shape(
    attitude: AmbiguityAttitude,
    samples: int = 1000,
    seed: int = 0,
    grid: SupportGrid | None = None,
    n_actions: int = 3,
    tol: float = 1e-10,
) -> ShapeReport:
    """Search for violations of concavity-type inequalities by random sampling.

    Plain properties compare two random vectors and a random mixing weight.
    Strong properties draw a random finite kernel and action distribution and
    compare the value of the integrated vector with the integrated values.
    """
    if attitude.kind == "custom":
        raise ValueError("shape checks need a satisfaction attitude")
    rng = np.random.default_rng(seed)
    grid = grid or SupportGrid.line(np.linspace(0.0, 1.0, 5))
    n_states = attitude.prior_matrix.shape[1]
    owner = (0, 0)
    s = lambda pi: satisfaction(pi, attitude)
    flags = dict(concave=True, convex=True, quasi_concave=True, strongly_concave=True, strongly_convex=True)
    found = {}

    def fail(name, witness):
        if flags[name]:
            flags[name] = False
            found[name] = witness

    for _ in range(samples):
        p0 = random_vector(rng, owner, grid, n_states)
        p1 = random_vector(rng, owner, grid, n_states)
        alpha = float(rng.uniform())
        mixed = mix_vectors([(1.0 - alpha, p0), (alpha, p1)])
        v0, v1, vm = s(p0), s(p1), s(mixed)
        chord = (1.0 - alpha) * v0 + alpha * v1
        if vm < chord - tol:
            fail("concave", (p0, p1, alpha))
        if vm > chord + tol:
            fail("convex", (p0, p1, alpha))
        if vm < min(v0, v1) - tol:
            fail("quasi_concave", (p0, p1, alpha))

        w = rng.dirichlet(np.ones(grid.size), size=(n_actions, n_states))
        kern = FiniteKernel(owner, grid, w)
        delta = DiscreteDistribution(SupportGrid.indices(n_actions), rng.dirichlet(np.ones(n_actions)))
        lhs = s(integrate_kernel(kern, delta))
        rhs = float(sum(delta.weights[a] * s(kern.row(a)) for a in range(n_actions)))
        if lhs < rhs - tol:
            fail("strongly_concave", (kern, delta))
        if lhs > rhs + tol:
            fail("strongly_convex", (kern, delta))
    return ShapeReport(samples=samples, seed=seed, counterexamples=found, **flags)
