"""Binary-state signal model shared by the voting and market layers.

A group of agents must decide which of two states of the world, A or B,
actually holds.  Each agent privately receives a noisy signal about the
state and is correct with her own probability ("competence") strictly
between 0.5 and 1.  With a fair prior over the two states, Bayesian
updating collapses to a one-liner: the posterior probability of A equals
the competence if the signal said A, and one minus the competence if it
said B.  Everything downstream (elections, markets, accuracy) consumes
the resulting belief profiles.

The model is deliberately rigid about two constants: the prior is exactly
one half and every agent's endowment is exactly one.  The election/market
correspondences proved elsewhere in this package lean on both, so any
other value is rejected instead of silently producing garbage.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

STATE_A = "A"
STATE_B = "B"
STATES = (STATE_A, STATE_B)

# 2**n signal profiles are materialised by enumerate_signal_space; past this
# size the list stops being a sensible in-memory object.
ENUMERATION_CAP = 20


class Decision(Enum):
    """Collective verdict: a single alternative or an exact tie."""

    A = "A"
    B = "B"
    TIE = "tie"

    @property
    def members(self) -> frozenset[str]:
        """The nonempty subset of {A, B} this verdict stands for."""
        if self is Decision.TIE:
            return frozenset(STATES)
        return frozenset((self.value,))

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CompetenceProfile:
    """Per-agent probabilities of receiving the signal matching the true state."""

    q: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))
        if not self.q:
            raise ValueError("competence profile must contain at least one agent")
        for i, v in enumerate(self.q):
            if not 0.5 < v < 1.0:
                raise ValueError(
                    f"competence q[{i}]={v!r} must lie strictly between 0.5 and 1"
                )

    @property
    def n(self) -> int:
        return len(self.q)


@dataclass(frozen=True)
class SignalProfile:
    """One realisation of everybody's private signal."""

    y: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "y", tuple(self.y))
        if not self.y:
            raise ValueError("signal profile must contain at least one agent")
        for i, v in enumerate(self.y):
            if v not in STATES:
                raise ValueError(f"signal y[{i}]={v!r} must be 'A' or 'B'")

    @property
    def n(self) -> int:
        return len(self.y)


@dataclass(frozen=True)
class BeliefProfile:
    """Per-agent posterior probabilities of state A."""

    b: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if not self.b:
            raise ValueError("belief profile must contain at least one agent")
        for i, v in enumerate(self.b):
            if not 0.0 < v < 1.0:
                raise ValueError(f"belief b[{i}]={v!r} must lie strictly inside (0, 1)")

    @property
    def n(self) -> int:
        return len(self.b)


@dataclass(frozen=True)
class ModelConfig:
    """Global constants of the decision problem.

    Only the canonical values are accepted: a fair prior and unit wealth.
    """

    prior: float = 0.5
    endowment: float = 1.0

    def __post_init__(self) -> None:
        if self.prior != 0.5:
            raise ValueError(f"prior must be exactly 0.5, got {self.prior!r}")
        if self.endowment != 1.0:
            raise ValueError(f"endowment must be exactly 1, got {self.endowment!r}")


def posterior_belief(q_i: float, y_i: str) -> float:
    """Posterior probability of state A after one signal under a fair prior."""
    if not 0.5 < q_i < 1.0:
        raise ValueError(f"competence {q_i!r} must lie strictly between 0.5 and 1")
    if y_i not in STATES:
        raise ValueError(f"signal {y_i!r} must be 'A' or 'B'")
    return q_i if y_i == STATE_A else 1.0 - q_i


def binarize(value: float) -> Decision:
    """Collapse a probability-like value onto {A}, {B}, or a tie at exactly 0.5.

    Comparison against 0.5 is exact: individual beliefs never sit on the
    fence, but market prices legitimately can, and a price of exactly one
    half must come out as a tie rather than being nudged to a side.
    """
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"value {value!r} outside [0, 1]")
    if value > 0.5:
        return Decision.A
    if value < 0.5:
        return Decision.B
    return Decision.TIE


def beliefs_from_signals(q: CompetenceProfile, y: SignalProfile) -> BeliefProfile:
    """Posterior belief of every agent given her competence and signal."""
    if q.n != y.n:
        raise ValueError(
            f"competence profile has {q.n} agents but signal profile has {y.n}"
        )
    return BeliefProfile(tuple(posterior_belief(qi, yi) for qi, yi in zip(q.q, y.y)))


def enumerate_signal_space(
    q: CompetenceProfile, state: str, cap: int = ENUMERATION_CAP
) -> list[tuple[SignalProfile, float]]:
    """All 2**n signal profiles with their probabilities under the given state.

    Profiles are emitted in lexicographic order with A before B, so the
    output order is deterministic and identical for both states.  The
    probabilities for a fixed state sum to one (up to rounding).
    """
    if state not in STATES:
        raise ValueError(f"state {state!r} must be 'A' or 'B'")
    if q.n > cap:
        raise ValueError(f"enumeration over {q.n} agents exceeds the cap of {cap}")
    out: list[tuple[SignalProfile, float]] = []
    for combo in itertools.product(STATES, repeat=q.n):
        prob = 1.0
        for qi, yi in zip(q.q, combo):
            prob *= qi if yi == state else 1.0 - qi
        out.append((SignalProfile(combo), prob))
    return out
