"""Truth-tracking accuracy of elections and markets, exact and sampled.

Group accuracy is the probability that an aggregator's decision matches
the true state, conditioned on that state; ties score one half (a uniform
tie-break in expectation) and their probability mass is also reported
separately.  Signals are conditionally independent given the state, each
agent matching it with her competence, and the two states are equally
likely a priori.

Exact values enumerate the full signal space (2^n profiles per state,
capped at n = 12); larger juries are estimated by seeded Monte Carlo with
counter-based substreams, so results are reproducible and independent of
batching.  verify_optimal_weights confronts the log-odds weighting with
rival weight vectors on exact accuracies.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum, sqrt
from typing import Callable

import numpy as np

from .equivalence import TIE_TOLERANCE, decision_from_offset
from .markets import (
    MarketKind,
    kelly_equilibrium,
    naive_equilibrium,
    taxed_equilibrium_asymptotic,
    taxed_equilibrium_finite,
)
from .model import (
    STATE_A,
    STATE_B,
    BeliefProfile,
    CompetenceProfile,
    Decision,
    enumerate_signal_space,
)
from .voting import (
    WeightProfile,
    votes_from_beliefs,
    weighted_margin,
    weights_egalitarian,
    weights_linear,
    weights_log_odds,
)

EXACT_MAX_AGENTS = 12
VERIFY_MAX_AGENTS = 10

MONTE_CARLO_BATCH = 65_536
# Rows whose dot-product margin lands this close to zero are recomputed
# with exact summation before the tie band is applied.
MARGIN_RESCUE_BOUND = 1e-9

WEIGHT_SCHEMES: dict[str, Callable[[CompetenceProfile], WeightProfile]] = {
    "egalitarian": lambda q: weights_egalitarian(q.n),
    "linear": weights_linear,
    "log_odds": weights_log_odds,
}


@dataclass(frozen=True)
class Aggregator:
    """A named decision procedure mapping (competences, signals) to a Decision.

    ``weights_fn`` is set for weighted-majority rules; it unlocks the
    vectorised Monte Carlo path, while ``decide`` remains the single source
    of truth for exact enumeration.
    """

    name: str
    decide: Callable[[CompetenceProfile, tuple[str, ...]], Decision]
    weights_fn: Callable[[CompetenceProfile], WeightProfile] | None = None


@dataclass(frozen=True)
class AccuracyEstimate:
    """A group-accuracy estimate with its method and tie diagnostics."""

    aggregator: str
    method: str  # "exact" or "monte_carlo"
    value: float
    tie_mass: float
    trials: int | None = None
    std_error: float | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"accuracy {self.value!r} outside [0, 1]")
        if not 0.0 <= self.tie_mass <= 1.0:
            raise ValueError(f"tie_mass {self.tie_mass!r} outside [0, 1]")


def _beliefs_for(q: CompetenceProfile, y: tuple[str, ...]) -> BeliefProfile:
    return BeliefProfile(tuple(qi if yi == STATE_A else 1.0 - qi for qi, yi in zip(q.q, y)))


def majority_aggregator(scheme: str) -> Aggregator:
    """Weighted-majority rule under a named weight scheme.

    Margins within the shared tie tolerance of zero are read as ties, the
    same convention the equivalence checks use.
    """
    if scheme not in WEIGHT_SCHEMES:
        raise ValueError(
            f"unknown weight scheme {scheme!r}; expected one of {sorted(WEIGHT_SCHEMES)}"
        )
    weights_fn = WEIGHT_SCHEMES[scheme]

    def decide(q: CompetenceProfile, y: tuple[str, ...]) -> Decision:
        votes = votes_from_beliefs(_beliefs_for(q, y))
        return decision_from_offset(weighted_margin(votes, weights_fn(q)))

    return Aggregator(name=f"majority_{scheme}", decide=decide, weights_fn=weights_fn)


def fixed_weights_aggregator(name: str, weights: WeightProfile) -> Aggregator:
    """Weighted-majority rule under an explicit weight vector."""

    def decide(q: CompetenceProfile, y: tuple[str, ...]) -> Decision:
        votes = votes_from_beliefs(_beliefs_for(q, y))
        return decision_from_offset(weighted_margin(votes, weights))

    return Aggregator(name=name, decide=decide, weights_fn=lambda q: weights)


def market_aggregator(kind: MarketKind, k: float | None = None) -> Aggregator:
    """Market-as-aggregator: solve for the clearing price and binarise it.

    The asymptotic taxed market is binarised on the price's log-odds (its
    natural scale); the others on price - 1/2, all with the shared tie
    tolerance.
    """
    if kind is MarketKind.TAXED_FINITE and (k is None or k <= 0.0):
        raise ValueError(f"finite taxed market needs a positive k, got {k!r}")

    def decide(q: CompetenceProfile, y: tuple[str, ...]) -> Decision:
        beliefs = _beliefs_for(q, y)
        if kind is MarketKind.NAIVE:
            offset = naive_equilibrium(beliefs).price - 0.5
        elif kind is MarketKind.KELLY:
            offset = kelly_equilibrium(beliefs).price - 0.5
        elif kind is MarketKind.TAXED_ASYMPTOTIC:
            price = taxed_equilibrium_asymptotic(beliefs)
            offset = float(np.log(price / (1.0 - price)))
        else:
            offset = taxed_equilibrium_finite(beliefs, k).price - 0.5
        return decision_from_offset(offset)

    name = f"market_{kind.value}" + (f"_k={k:g}" if kind is MarketKind.TAXED_FINITE else "")
    return Aggregator(name=name, decide=decide)


def _scored_mass(
    agg: Aggregator, q: CompetenceProfile, state: str
) -> tuple[float, float]:
    """(accuracy, tie mass) conditioned on one state, by full enumeration."""
    hits: list[float] = []
    ties: list[float] = []
    for signals, prob in enumerate_signal_space(q, state):
        decision = agg.decide(q, signals.y)
        if decision is Decision.TIE:
            ties.append(prob)
            hits.append(0.5 * prob)
        elif decision.value == state:
            hits.append(prob)
    return fsum(hits), fsum(ties)


def exact_accuracy(agg: Aggregator, q: CompetenceProfile) -> AccuracyEstimate:
    """Group accuracy by exhaustive enumeration of the signal space.

    The two state-conditional accuracies are equal by the model's
    flip-symmetry; this is asserted to 1e-12 as an internal consistency
    check before they are averaged.
    """
    if q.n > EXACT_MAX_AGENTS:
        raise ValueError(
            f"exact accuracy supports up to {EXACT_MAX_AGENTS} agents, got {q.n}"
        )
    q_a, ties_a = _scored_mass(agg, q, STATE_A)
    q_b, ties_b = _scored_mass(agg, q, STATE_B)
    if abs(q_a - q_b) > 1e-12:
        raise AssertionError(
            f"state-conditional accuracies diverge: A-side {q_a!r}, B-side {q_b!r}"
        )
    return AccuracyEstimate(
        aggregator=agg.name,
        method="exact",
        value=0.5 * (q_a + q_b),
        tie_mass=0.5 * (ties_a + ties_b),
    )


def _batch_generator(seed: int, batch_index: int) -> np.random.Generator:
    """Counter-based substream: one independent Philox stream per batch."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, batch_index], dtype=np.uint64)))


def _sample_votes(
    rng: np.random.Generator, q_vec: np.ndarray, size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Sample (states, A-votes) for one batch.

    states is a boolean vector (True = state A); votes is a boolean matrix
    (True = the agent's belief favours A, i.e. her signal was A).
    """
    states = rng.random(size) < 0.5
    matches = rng.random((size, q_vec.size)) < q_vec
    votes_a = np.where(states[:, None], matches, ~matches)
    return states, votes_a


def _count_scores_weights(
    votes_a: np.ndarray, states: np.ndarray, w: np.ndarray, half_total: float
) -> tuple[int, int]:
    """(correct count, tie count) for one batch of a weighted-majority rule."""
    margins = votes_a.astype(float) @ w - half_total
    suspect = np.flatnonzero(np.abs(margins) < MARGIN_RESCUE_BOUND)
    for row in suspect:
        picked = [wi for wi, v in zip(w, votes_a[row]) if v]
        margins[row] = fsum(picked) - half_total
    ties = np.abs(margins) <= TIE_TOLERANCE
    decide_a = margins > TIE_TOLERANCE
    correct = ~ties & (decide_a == states)
    return int(np.count_nonzero(correct)), int(np.count_nonzero(ties))


def monte_carlo_accuracy(
    agg: Aggregator, q: CompetenceProfile, trials: int, seed: int
) -> AccuracyEstimate:
    """Group accuracy by seeded simulation.

    The state is drawn fair, signals per competence, and the aggregator is
    scored as in exact_accuracy.  Batches use counter-based substreams
    keyed by (seed, batch index), so the estimate is byte-identical however
    the batches are scheduled.  Weighted-majority aggregators run fully
    vectorised; others fall back to calling decide per trial.
    """
    if trials < 1:
        raise ValueError(f"trials {trials!r} must be at least 1")
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed {seed!r} must fit in an unsigned 64-bit integer")
    q_vec = np.array(q.q, dtype=float)
    weights = agg.weights_fn(q) if agg.weights_fn is not None else None
    if weights is not None:
        w = np.array(weights.w, dtype=float)
        half_total = 0.5 * fsum(weights.w)

    n_correct = 0
    n_tie = 0
    done = 0
    for batch_index in range(-(-trials // MONTE_CARLO_BATCH)):
        size = min(MONTE_CARLO_BATCH, trials - done)
        rng = _batch_generator(seed, batch_index)
        states, votes_a = _sample_votes(rng, q_vec, size)
        if weights is not None:
            c, t = _count_scores_weights(votes_a, states, w, half_total)
            n_correct += c
            n_tie += t
        else:
            for row in range(size):
                y = tuple(STATE_A if v else STATE_B for v in votes_a[row])
                decision = agg.decide(q, y)
                if decision is Decision.TIE:
                    n_tie += 1
                elif (decision is Decision.A) == bool(states[row]):
                    n_correct += 1
        done += size

    value = (n_correct + 0.5 * n_tie) / trials
    second_moment = (n_correct + 0.25 * n_tie) / trials
    variance = max(second_moment - value * value, 0.0)
    return AccuracyEstimate(
        aggregator=agg.name,
        method="monte_carlo",
        value=value,
        tie_mass=n_tie / trials,
        trials=trials,
        std_error=sqrt(variance / trials),
        seed=seed,
    )


@dataclass(frozen=True)
class OptimalWeightsReport:
    """Exact accuracies of the log-odds rule and every challenger."""

    log_odds: float
    egalitarian: float
    linear: float
    random: tuple[float, ...]

    @property
    def margin_over_best_rival(self) -> float:
        return self.log_odds - max(self.egalitarian, self.linear, *self.random)


def _random_positive_weights(n: int, count: int, seed: int) -> list[WeightProfile]:
    """Directions drawn from the positive orthant of the unit sphere.

    Weighted majority is scale-invariant, so direction is the only degree
    of freedom worth sampling.
    """
    rng = _batch_generator(seed, 0)
    raw = np.abs(rng.standard_normal((count, n)))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return [WeightProfile(tuple(float(x) for x in row)) for row in raw]


def verify_optimal_weights(
    q: CompetenceProfile, perturbations: int = 20, seed: int = 0
) -> OptimalWeightsReport:
    """Confirm no rival weighting beats log-odds weights on exact accuracy.

    Exact accuracy under log-odds weights is compared with the egalitarian
    and linear schemes and with `perturbations` random positive weight
    vectors; any rival exceeding it by more than 1e-12 raises
    AssertionError, since the optimality is unconditional and a violation
    can only mean an implementation bug.
    """
    if q.n > VERIFY_MAX_AGENTS:
        raise ValueError(
            f"weight verification supports up to {VERIFY_MAX_AGENTS} agents, got {q.n}"
        )
    reference = exact_accuracy(majority_aggregator("log_odds"), q).value
    rivals: dict[str, float] = {
        "egalitarian": exact_accuracy(majority_aggregator("egalitarian"), q).value,
        "linear": exact_accuracy(majority_aggregator("linear"), q).value,
    }
    random_values: list[float] = []
    for j, weights in enumerate(_random_positive_weights(q.n, perturbations, seed)):
        agg = fixed_weights_aggregator(f"random_{j}", weights)
        random_values.append(exact_accuracy(agg, q).value)
        rivals[agg.name] = random_values[-1]
    for name, value in rivals.items():
        if value > reference + 1e-12:
            raise AssertionError(
                f"{name} weights reach accuracy {value!r}, beating log-odds "
                f"weights at {reference!r}"
            )
    return OptimalWeightsReport(
        log_odds=reference,
        egalitarian=rivals["egalitarian"],
        linear=rivals["linear"],
        random=tuple(random_values),
    )
