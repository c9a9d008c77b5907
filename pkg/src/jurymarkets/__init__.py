"""Weighted-majority elections and information-market equilibria.

A toolkit for the jury model with binary states: agents receive
conditionally independent private signals, vote under a weight scheme or
trade Arrow securities, and both aggregation routes are solved, compared,
and scored for truth-tracking accuracy.
"""

from .accuracy import (
    AccuracyEstimate,
    Aggregator,
    OptimalWeightsReport,
    exact_accuracy,
    fixed_weights_aggregator,
    majority_aggregator,
    market_aggregator,
    monte_carlo_accuracy,
    verify_optimal_weights,
)
from .equivalence import (
    ALL_SCHEMES,
    TIE_TOLERANCE,
    EquivalenceReport,
    EquivalenceScheme,
    check_all_schemes,
    check_linear_kelly,
    check_log_odds_taxed,
    check_scheme,
    check_simple_naive,
    decision_from_offset,
)
from .markets import (
    INDIFFERENT,
    BracketingError,
    Diagnostics,
    EquilibriumResult,
    InvestmentProfile,
    MarketKind,
    SideInvestment,
    UndefinedPriceError,
    clearing_price,
    full_investment_equivalence,
    kelly_best_response,
    kelly_equilibrium,
    kelly_utility,
    naive_best_response,
    naive_equilibrium,
    naive_utility,
    payout,
    tax_function,
    taxed_best_response,
    taxed_best_response_asymptotic,
    taxed_equilibrium_asymptotic,
    taxed_equilibrium_finite,
    taxed_foc_residual,
    taxed_utility,
)
from .model import (
    ENUMERATION_CAP,
    STATE_A,
    STATE_B,
    STATES,
    BeliefProfile,
    CompetenceProfile,
    Decision,
    ModelConfig,
    SignalProfile,
    beliefs_from_signals,
    binarize,
    enumerate_signal_space,
    posterior_belief,
)
from .oracle import (
    GridSpec,
    exhaustive_accuracy_oracle,
    exhaustive_state_conditional_accuracies,
    grid_equilibrium_search,
)
from .voting import (
    VotingProfile,
    WeightProfile,
    votes_from_beliefs,
    weighted_majority,
    weighted_margin,
    weights_egalitarian,
    weights_linear,
    weights_log_odds,
)

__version__ = "0.1.0"

__all__ = [
    "ENUMERATION_CAP",
    "STATE_A",
    "STATE_B",
    "STATES",
    "ALL_SCHEMES",
    "TIE_TOLERANCE",
    "INDIFFERENT",
    "AccuracyEstimate",
    "Aggregator",
    "BeliefProfile",
    "BracketingError",
    "CompetenceProfile",
    "Decision",
    "Diagnostics",
    "EquilibriumResult",
    "EquivalenceReport",
    "EquivalenceScheme",
    "GridSpec",
    "InvestmentProfile",
    "MarketKind",
    "ModelConfig",
    "OptimalWeightsReport",
    "SideInvestment",
    "SignalProfile",
    "UndefinedPriceError",
    "VotingProfile",
    "WeightProfile",
    "beliefs_from_signals",
    "binarize",
    "check_all_schemes",
    "check_linear_kelly",
    "check_log_odds_taxed",
    "check_scheme",
    "check_simple_naive",
    "clearing_price",
    "decision_from_offset",
    "enumerate_signal_space",
    "exact_accuracy",
    "exhaustive_accuracy_oracle",
    "exhaustive_state_conditional_accuracies",
    "fixed_weights_aggregator",
    "full_investment_equivalence",
    "grid_equilibrium_search",
    "kelly_best_response",
    "kelly_equilibrium",
    "kelly_utility",
    "majority_aggregator",
    "market_aggregator",
    "monte_carlo_accuracy",
    "naive_best_response",
    "naive_equilibrium",
    "naive_utility",
    "payout",
    "posterior_belief",
    "tax_function",
    "taxed_best_response",
    "taxed_best_response_asymptotic",
    "taxed_equilibrium_asymptotic",
    "taxed_equilibrium_finite",
    "taxed_foc_residual",
    "taxed_utility",
    "verify_optimal_weights",
    "votes_from_beliefs",
    "weighted_majority",
    "weighted_margin",
    "weights_egalitarian",
    "weights_linear",
    "weights_log_odds",
]
