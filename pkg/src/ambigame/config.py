"""Numerical tolerances shared by every module."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Central tolerance record.

    ``mass`` bounds normalization error and the off-support mass allowed in
    action-mode verification; ``order`` is used by stochastic-order and
    lattice comparisons; ``regret`` is the default epsilon for best-response
    sets and equilibrium verdicts; ``snap`` is the distance within which a
    pushed-forward value is identified with a grid level.
    """

    mass: float = 1e-12
    order: float = 1e-10
    regret: float = 1e-9
    snap: float = 1e-9
    lattice_negative: float = 1e-9


DEFAULT = Tolerances()
