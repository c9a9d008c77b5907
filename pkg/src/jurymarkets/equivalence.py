"""Cross-checks between weighted elections and market equilibria.

Three weight schemes pair off with three trader models so that binarising
the market's clearing price reproduces the weighted-majority outcome:

* simple majority (equal weights)      <->  expected-wealth (naive) market
* linear weights 2q - 1                <->  log-utility (Kelly) market
* log-odds weights ln(q / (1 - q))     <->  heavily taxed market (k -> inf)

Each checker runs both sides on the same competence/signal inputs and
reports the two decisions, the clearing price, and the raw weighted margin
so a disagreement is diagnosable.  The first two pairings and the
asymptotic third are exact equivalences; at finite tax intensity the third
is only a convergence statement, so those reports carry guaranteed=False
and a disagreement is data, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import log

from .markets import (
    kelly_equilibrium,
    naive_equilibrium,
    taxed_equilibrium_asymptotic,
    taxed_equilibrium_finite,
)
from .model import BeliefProfile, CompetenceProfile, Decision, SignalProfile, beliefs_from_signals
from .voting import (
    votes_from_beliefs,
    weighted_margin,
    weights_egalitarian,
    weights_linear,
    weights_log_odds,
)

# Weighted margins and price offsets within this bound of zero are read as
# ties: weights and prices computed from float competences carry relative
# error ~1e-16, so algebraically tied cases land within a few ulps of zero
# rather than exactly on it.
TIE_TOLERANCE = 1e-12


class EquivalenceScheme(Enum):
    SIMPLE_NAIVE = "simple_naive"
    LINEAR_KELLY = "linear_kelly"
    LOG_ODDS_TAXED = "log_odds_taxed"


ALL_SCHEMES = (
    EquivalenceScheme.SIMPLE_NAIVE,
    EquivalenceScheme.LINEAR_KELLY,
    EquivalenceScheme.LOG_ODDS_TAXED,
)


@dataclass(frozen=True)
class EquivalenceReport:
    """Both sides of one commuting-diagram check, with raw diagnostics."""

    scheme: EquivalenceScheme
    election: Decision
    market: Decision
    agree: bool
    price: float
    weighted_margin: float
    guaranteed: bool
    k: float | None = None


def decision_from_offset(offset: float, tolerance: float = TIE_TOLERANCE) -> Decision:
    """Ternary sign of a margin-like quantity, with a tie band around zero."""
    if offset > tolerance:
        return Decision.A
    if offset < -tolerance:
        return Decision.B
    return Decision.TIE


def _election_side(beliefs: BeliefProfile, weights) -> tuple[Decision, float]:
    votes = votes_from_beliefs(beliefs)
    margin = weighted_margin(votes, weights)
    return decision_from_offset(margin), margin


def _report(
    scheme: EquivalenceScheme,
    election: Decision,
    margin: float,
    market: Decision,
    price: float,
    guaranteed: bool,
    k: float | None = None,
) -> EquivalenceReport:
    return EquivalenceReport(
        scheme=scheme,
        election=election,
        market=market,
        agree=election.members == market.members,
        price=price,
        weighted_margin=margin,
        guaranteed=guaranteed,
        k=k,
    )


def check_simple_naive(q: CompetenceProfile, y: SignalProfile) -> EquivalenceReport:
    """Simple majority vs the binarised expected-wealth clearing price."""
    beliefs = beliefs_from_signals(q, y)
    election, margin = _election_side(beliefs, weights_egalitarian(q.n))
    price = naive_equilibrium(beliefs).price
    market = decision_from_offset(price - 0.5)
    return _report(EquivalenceScheme.SIMPLE_NAIVE, election, margin, market, price, True)


def check_linear_kelly(q: CompetenceProfile, y: SignalProfile) -> EquivalenceReport:
    """Linear-weight majority vs the binarised log-utility clearing price."""
    beliefs = beliefs_from_signals(q, y)
    election, margin = _election_side(beliefs, weights_linear(q))
    price = kelly_equilibrium(beliefs).price
    market = decision_from_offset(price - 0.5)
    return _report(EquivalenceScheme.LINEAR_KELLY, election, margin, market, price, True)


def check_log_odds_taxed(
    q: CompetenceProfile, y: SignalProfile, k: float | None = None
) -> EquivalenceReport:
    """Log-odds majority vs the binarised taxed-market clearing price.

    Without k the heavy-damping closed form is used and agreement is exact:
    the price's log-odds is the mean belief log-odds, which is a positive
    multiple of the weighted margin, so the comparison runs on that shared
    quantity.  With a finite k the solved price is binarised instead;
    agreement then only tends to hold as k grows, so guaranteed is False.
    """
    beliefs = beliefs_from_signals(q, y)
    election, margin = _election_side(beliefs, weights_log_odds(q))
    if k is None:
        price = taxed_equilibrium_asymptotic(beliefs)
        market = decision_from_offset(log(price / (1.0 - price)))
        return _report(
            EquivalenceScheme.LOG_ODDS_TAXED, election, margin, market, price, True
        )
    price = taxed_equilibrium_finite(beliefs, k).price
    market = decision_from_offset(price - 0.5)
    return _report(
        EquivalenceScheme.LOG_ODDS_TAXED, election, margin, market, price, False, k
    )


def check_scheme(
    scheme: EquivalenceScheme,
    q: CompetenceProfile,
    y: SignalProfile,
    k: float | None = None,
) -> EquivalenceReport:
    """Dispatch one commuting-diagram check by scheme."""
    if scheme is EquivalenceScheme.SIMPLE_NAIVE:
        return check_simple_naive(q, y)
    if scheme is EquivalenceScheme.LINEAR_KELLY:
        return check_linear_kelly(q, y)
    return check_log_odds_taxed(q, y, k)


def check_all_schemes(
    q: CompetenceProfile, y: SignalProfile, k: float | None = None
) -> list[EquivalenceReport]:
    """All three checks on one input; k only affects the taxed scheme."""
    return [check_scheme(scheme, q, y, k) for scheme in ALL_SCHEMES]
