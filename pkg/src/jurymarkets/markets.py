"""Arrow-security information markets and their competitive equilibria.

Two securities are traded, one per state of the world; a security pays one
unit of wealth if its state obtains and nothing otherwise.  With prices
p and 1 - p summing to one, an agent who stakes a fraction s of her unit
endowment on the winning side ends up with s / p redeemed securities plus
her unspent cash 1 - s, and with just 1 - s if she backed the loser.

Three trader models are solved for the price at which the books balance,
i.e. the quantity of A-securities sold equals the quantity of
B-securities sold:

* naive traders maximise expected wealth, which is linear in the stake and
  therefore all-or-nothing;
* Kelly traders maximise expected log wealth and stake the classic
  proportional gap between belief and price;
* taxed Kelly traders face a concave damping T applied to their winnings,
  with an intensity parameter k that interpolates from plain Kelly (k -> 0)
  to vanishing stakes proportional to log-odds (k -> infinity).

Each solver returns the full investment profile, the clearing price, and
diagnostics (iterations, clearing residual, degeneracy).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import exp, expm1, fsum, log, log1p

import numpy as np

from .model import BeliefProfile

# Root-finding controls for the taxed model.  The outer loop bisections the
# price of the excess demand for securities; the inner loop bisections each
# agent's first-order condition.
PRICE_BRACKET_EPS = 1e-9
PRICE_TOLERANCE = 1e-9
RESPONSE_TOLERANCE = 1e-12
MAX_BISECTION_ITERATIONS = 200

# Upper end of the stake bracket: staking the whole endowment has log-utility
# minus infinity, so the optimum always sits strictly inside.
STAKE_BRACKET_HIGH = 1.0 - 1e-9


class MarketKind(Enum):
    NAIVE = "naive"
    KELLY = "kelly"
    TAXED_FINITE = "taxed_finite"
    TAXED_ASYMPTOTIC = "taxed_asymptotic"


class UndefinedPriceError(ValueError):
    """One side of the market attracted no stake, so no price clears it."""


class BracketingError(RuntimeError):
    """A root-finding bracket failed to straddle a sign change."""


class _IndifferentType:
    """Marker: every stake in [0, 1] is optimal."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "Indifferent"


INDIFFERENT = _IndifferentType()


@dataclass(frozen=True)
class InvestmentProfile:
    """Per-agent stakes on each security.  Nobody plays both sides."""

    sA: tuple[float, ...]
    sB: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sA", tuple(float(x) for x in self.sA))
        object.__setattr__(self, "sB", tuple(float(x) for x in self.sB))
        if not self.sA:
            raise ValueError("investment profile must contain at least one agent")
        if len(self.sA) != len(self.sB):
            raise ValueError(
                f"sA has {len(self.sA)} agents but sB has {len(self.sB)}"
            )
        for name, side in (("sA", self.sA), ("sB", self.sB)):
            for i, x in enumerate(side):
                if not 0.0 <= x <= 1.0:
                    raise ValueError(f"{name}[{i}]={x!r} outside [0, 1]")
        for i, (a, b) in enumerate(zip(self.sA, self.sB)):
            if a != 0.0 and b != 0.0:
                raise ValueError(f"agent {i} invests on both sides (sA={a!r}, sB={b!r})")

    @property
    def n(self) -> int:
        return len(self.sA)


@dataclass(frozen=True)
class Diagnostics:
    """Solver bookkeeping attached to every equilibrium result.

    ``residual`` is the imbalance in security quantities,
    (1/p) * sum(sA) - (1/(1-p)) * sum(sB); ``degenerate`` marks markets with
    no trade on some side, where that ratio is not defined.
    """

    iterations: int = 0
    residual: float = 0.0
    degenerate: bool = False


@dataclass(frozen=True)
class EquilibriumResult:
    profile: InvestmentProfile
    price: float
    kind: MarketKind
    diagnostics: Diagnostics
    k: float | None = None


@dataclass(frozen=True)
class SideInvestment:
    """A single agent's optimal stake: which security, and how much."""

    side: str | None  # "A", "B", or None when not investing
    fraction: float

    def as_legs(self) -> tuple[float, float]:
        if self.side == "A":
            return self.fraction, 0.0
        if self.side == "B":
            return 0.0, self.fraction
        return 0.0, 0.0


def _check_price(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"price {p!r} must lie strictly inside (0, 1)")


def _check_belief(b: float) -> None:
    if not 0.0 < b < 1.0:
        raise ValueError(f"belief {b!r} must lie strictly inside (0, 1)")


def clearing_price(profile: InvestmentProfile) -> float:
    """The unique price equating security quantities on the two sides.

    Balancing (1/p) * sum(sA) = (1/(1-p)) * sum(sB) gives
    p = sum(sA) / (sum(sA) + sum(sB)).
    """
    a = fsum(profile.sA)
    b = fsum(profile.sB)
    if a == 0.0 or b == 0.0:
        raise UndefinedPriceError(
            f"no stake on {'A' if a == 0.0 else 'B'}-side: clearing ratio undefined"
        )
    return a / (a + b)


def payout(p: float, s: float, won: bool) -> float:
    """Total wealth after the market resolves for a stake s at price p.

    Winners redeem s / p of securities and keep their unspent endowment
    1 - s on top; losers are left with the unspent endowment alone.
    """
    _check_price(p)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"stake {s!r} outside [0, 1]")
    if won:
        return s / p + (1.0 - s)
    return 1.0 - s


def naive_utility(p: float, b: float, s: float) -> float:
    """Expected wealth of staking s on the security priced p under belief b.

    Linear in s.  The mirrored-side value is naive_utility(1-p, 1-b, s).
    """
    _check_price(p)
    _check_belief(b)
    return b * (s / p - s + 1.0) + (1.0 - b) * (1.0 - s)


def kelly_utility(p: float, b: float, s: float) -> float:
    """Expected log wealth of staking s on the security priced p.

    Staking everything risks log(0); that branch is the -inf sentinel.
    The mirrored-side value is kelly_utility(1-p, 1-b, s).
    """
    _check_price(p)
    _check_belief(b)
    if s == 1.0:
        return float("-inf")
    return b * log1p(s * (1.0 - p) / p) + (1.0 - b) * log1p(-s)


def naive_best_response(b: float, p: float):
    """Optimal stake sets for an expected-wealth maximiser, per side.

    Returns (a_side, b_side).  Expected wealth is linear in the stake, so
    each side's optimum is all ({1.0}) or nothing ({0.0}); at b == p both
    securities are fair bets and every stake is optimal, flagged by the
    INDIFFERENT marker.
    """
    _check_price(p)
    _check_belief(b)
    if b > p:
        return frozenset((1.0,)), frozenset((0.0,))
    if b < p:
        return frozenset((0.0,)), frozenset((1.0,))
    return INDIFFERENT, INDIFFERENT


def kelly_best_response(b: float, p: float) -> SideInvestment:
    """The log-utility optimum: stake the belief-price gap over the odds.

    (b - p) / (1 - p) on A when the price looks cheap, (p - b) / p on B when
    it looks dear, nothing at b == p.
    """
    _check_price(p)
    _check_belief(b)
    if b > p:
        return SideInvestment("A", (b - p) / (1.0 - p))
    if b < p:
        return SideInvestment("B", (p - b) / p)
    return SideInvestment(None, 0.0)


def tax_function(x: float, p: float, k: float) -> float:
    """Concave damping applied to market winnings.

    T(x) = (1 - exp(-k * x * p / (1-p))) / (k * p / (1-p)); monotone
    increasing, concave, T(0) = 0, and T(x) -> x as k -> 0.
    """
    _check_price(p)
    if k <= 0.0:
        raise ValueError(f"tax intensity k={k!r} must be positive")
    a = k * p / (1.0 - p)
    return -expm1(-a * x) / a


def taxed_utility(p: float, b: float, s: float, k: float) -> float:
    """Expected log wealth when winnings pass through the tax.

    The winning branch keeps the stake and collects the damped profit,
    1 + T(s * (1-p) / p), so the k -> 0 limit recovers kelly_utility.
    The mirrored-side value is taxed_utility(1-p, 1-b, s, k).
    """
    _check_price(p)
    _check_belief(b)
    if k <= 0.0:
        raise ValueError(f"tax intensity k={k!r} must be positive")
    if s == 1.0:
        return float("-inf")
    return b * log1p(tax_function(s * (1.0 - p) / p, p, k)) + (1.0 - b) * log1p(-s)


def taxed_foc_residual(s: float, b: float, p: float, k: float) -> float:
    """Derivative of taxed_utility in the stake, in reduced form.

    k * b * exp(-k s) / (k p/(1-p) + 1 - exp(-k s)) - (1-b) / (1-s).
    Positive below the optimum, negative above it.
    """
    a = k * p / (1.0 - p)
    return k * b * exp(-k * s) / (a - expm1(-k * s)) - (1.0 - b) / (1.0 - s)


def _taxed_stakes_signed(
    beliefs: np.ndarray, p: float, k: float, tol: float = RESPONSE_TOLERANCE
) -> np.ndarray:
    """Vectorised taxed best responses at price p: +stake on A, -stake on B.

    Agents below the price are mapped through the mirror (1-b, 1-p) so a
    single bisection of the first-order condition covers everyone at once.
    """
    active = beliefs != p
    bb = np.where(beliefs > p, beliefs, 1.0 - beliefs)
    pp = np.where(beliefs > p, p, 1.0 - p)
    a = k * pp / (1.0 - pp)
    one_minus_b = 1.0 - bb

    def foc(s: np.ndarray) -> np.ndarray:
        return k * bb * np.exp(-k * s) / (a - np.expm1(-k * s)) - one_minus_b / (1.0 - s)

    lo = np.zeros_like(bb)
    hi = np.full_like(bb, STAKE_BRACKET_HIGH)
    f_hi = foc(hi)
    if np.any(f_hi[active] >= 0.0):
        worst = float(np.max(f_hi[active]))
        raise BracketingError(
            "taxed first-order condition does not change sign on "
            f"[0, {STAKE_BRACKET_HIGH}]: residual at the top is {worst!r}"
        )
    # f(0) = b(1-p)/p - (1-b) > 0 exactly when b > p, which holds for every
    # active agent after mirroring, so only the top end needed checking.
    for _ in range(MAX_BISECTION_ITERATIONS):
        mid = 0.5 * (lo + hi)
        go_up = foc(mid) > 0.0
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
        if float(np.max(hi - lo)) <= tol:
            break
    stakes = 0.5 * (lo + hi)
    stakes = np.where(active, stakes, 0.0)
    return np.where(beliefs > p, stakes, -stakes)


def taxed_best_response(
    b: float, p: float, k: float, tol: float = RESPONSE_TOLERANCE
) -> SideInvestment:
    """Bisection root of the taxed first-order condition at price p."""
    _check_price(p)
    _check_belief(b)
    if k <= 0.0:
        raise ValueError(f"tax intensity k={k!r} must be positive")
    signed = float(_taxed_stakes_signed(np.array([b]), p, k, tol)[0])
    if signed > 0.0:
        return SideInvestment("A", signed)
    if signed < 0.0:
        return SideInvestment("B", -signed)
    return SideInvestment(None, 0.0)


def taxed_best_response_asymptotic(b: float, p: float, k: float) -> SideInvestment:
    """Closed-form limit of the taxed stake for heavy damping.

    The optimum collapses like (1/k) * ln((1-p)/p * b/(1-b)); useful as the
    reference curve the finite-k stakes approach as k grows.  Unclamped: at
    small k the expression may exceed 1 and is then purely nominal.
    """
    _check_price(p)
    _check_belief(b)
    if k <= 0.0:
        raise ValueError(f"tax intensity k={k!r} must be positive")
    if b > p:
        return SideInvestment("A", log((1.0 - p) / p * b / (1.0 - b)) / k)
    if b < p:
        return SideInvestment("B", log(p / (1.0 - p) * (1.0 - b) / b) / k)
    return SideInvestment(None, 0.0)


def _security_residual(profile: InvestmentProfile, p: float) -> float:
    """Quantity imbalance (1/p) * sum(sA) - (1/(1-p)) * sum(sB)."""
    return fsum(profile.sA) / p - fsum(profile.sB) / (1.0 - p)


def _result(
    sA: list[float],
    sB: list[float],
    price: float,
    kind: MarketKind,
    iterations: int = 0,
    k: float | None = None,
) -> EquilibriumResult:
    profile = InvestmentProfile(tuple(sA), tuple(sB))
    degenerate = fsum(sA) == 0.0 or fsum(sB) == 0.0
    residual = 0.0 if degenerate else _security_residual(profile, price)
    return EquilibriumResult(
        profile=profile,
        price=price,
        kind=kind,
        diagnostics=Diagnostics(iterations=iterations, residual=residual, degenerate=degenerate),
        k=k,
    )


def naive_equilibrium(b: BeliefProfile) -> EquilibriumResult:
    """Competitive equilibrium of the all-or-nothing market.

    Beliefs are ranked in descending order (ties broken by agent index) and
    two scans are tried in turn:

    1. a full-investment split: the top i agents stake everything on A and
       the rest everything on B, which clears at price i/n whenever
       b_(i) >= i/n >= b_(i+1);
    2. otherwise a marginal agent whose belief b_(i) falls strictly between
       (i-1)/n and i/n sits exactly at the price, and her partial stake is
       solved from the quantity balance; the price is her belief.

    The equilibrium is unique.  A single-agent market is degenerate: there
    is nobody to trade against, the algorithm yields zero stakes all round,
    and the price defaults to that agent's belief with the degenerate flag
    set.
    """
    n = b.n
    order = sorted(range(n), key=lambda i: (-b.b[i], i))
    ranked = [b.b[i] for i in order]
    sA = [0.0] * n
    sB = [0.0] * n
    price: float | None = None

    for i in range(1, n):
        p = i / n
        if ranked[i - 1] >= p >= ranked[i]:
            for j in range(i):
                sA[j] = 1.0
            for j in range(i, n):
                sB[j] = 1.0
            price = p
            break

    if price is None:
        for i in range(1, n + 1):
            bi = ranked[i - 1]
            if (i - 1) / n < bi < i / n:
                for j in range(i - 1):
                    sA[j] = 1.0
                for j in range(i, n):
                    sB[j] = 1.0
                # Quantity balance at price bi with the marginal agent on A:
                # (1/bi) * ((i-1) + x) = (1/(1-bi)) * (n-i).
                x = bi * (n - i) / (1.0 - bi) - (i - 1)
                if x >= 0.0:
                    sA[i - 1] = x
                else:
                    # She balances the books from the B side instead:
                    # (1/bi) * (i-1) = (1/(1-bi)) * ((n-i) + x).
                    sB[i - 1] = (i - 1) * (1.0 - bi) / bi - (n - i)
                price = bi
                break

    if price is None:  # pragma: no cover - the two scans exhaust all profiles
        raise RuntimeError("no clearing configuration found")

    out_A = [0.0] * n
    out_B = [0.0] * n
    for rank, agent in enumerate(order):
        out_A[agent] = sA[rank]
        out_B[agent] = sB[rank]
    return _result(out_A, out_B, price, MarketKind.NAIVE)


def kelly_equilibrium(b: BeliefProfile) -> EquilibriumResult:
    """Competitive equilibrium of the log-utility market.

    The books balance exactly at the arithmetic mean of beliefs; stakes are
    the per-agent Kelly gaps at that price.
    """
    price = fsum(b.b) / b.n
    sA = [0.0] * b.n
    sB = [0.0] * b.n
    for i, bi in enumerate(b.b):
        sA[i], sB[i] = kelly_best_response(bi, price).as_legs()
    return _result(sA, sB, price, MarketKind.KELLY)


def taxed_equilibrium_finite(
    b: BeliefProfile,
    k: float,
    price_tol: float = PRICE_TOLERANCE,
    response_tol: float = RESPONSE_TOLERANCE,
) -> EquilibriumResult:
    """Competitive equilibrium of the taxed market at a finite intensity k.

    Nested bisection: the outer loop solves the excess demand for
    securities, D(p) = (1/p) * sum of A-stakes - (1/(1-p)) * sum of
    B-stakes, over p in (eps, 1-eps); the inner loop (vectorised over
    agents) solves each taxed first-order condition at the probed price.
    D is verified to change sign across the bracket before bisecting.
    """
    if k <= 0.0:
        raise ValueError(f"tax intensity k={k!r} must be positive")
    beliefs = np.array(b.b, dtype=float)

    def demand(p: float) -> np.ndarray:
        return _taxed_stakes_signed(beliefs, p, k, response_tol)

    def excess(signed: np.ndarray, p: float) -> float:
        quantities = np.where(signed > 0.0, signed / p, signed / (1.0 - p))
        return float(fsum(quantities.tolist()))

    lo, hi = PRICE_BRACKET_EPS, 1.0 - PRICE_BRACKET_EPS
    d_lo = excess(demand(lo), lo)
    d_hi = excess(demand(hi), hi)
    if not (d_lo > 0.0 > d_hi):
        raise BracketingError(
            "excess security demand does not change sign on "
            f"[{lo}, {hi}]: D(lo)={d_lo!r}, D(hi)={d_hi!r}"
        )

    iterations = 0
    for iterations in range(1, MAX_BISECTION_ITERATIONS + 1):
        price = 0.5 * (lo + hi)
        signed = demand(price)
        residual = excess(signed, price)
        if abs(residual) <= price_tol or price == lo or price == hi:
            break
        if residual > 0.0:
            lo = price
        else:
            hi = price

    sA = [float(x) if x > 0.0 else 0.0 for x in signed]
    sB = [float(-x) if x < 0.0 else 0.0 for x in signed]
    return _result(sA, sB, price, MarketKind.TAXED_FINITE, iterations, k)


def taxed_equilibrium_asymptotic(b: BeliefProfile) -> float:
    """Closed-form price of the heavily damped market: logistic mean log-odds.

    ln(p / (1-p)) = (1/n) * sum of ln(b_i / (1-b_i)).  The closed form
    balances the aggregate stakes on the two sides (the per-agent stakes all
    shrink like 1/k, proportionally to belief-vs-price log-odds).  Note that
    the finite-k solver balances security *quantities*, whose k -> infinity
    fixed point is a nearby but distinct price whenever the market is
    lopsided; the two coincide at 0.5 and always fall on the same side of
    0.5, so binarised decisions agree.
    """
    mean_log_odds = fsum(log(bi / (1.0 - bi)) for bi in b.b) / b.n
    return 1.0 / (1.0 + exp(-mean_log_odds))


def full_investment_equivalence(b: float, p: float) -> tuple[float, float]:
    """Two bookings of the same log-utility optimum; returns both utilities.

    First: the whole endowment is split across both securities, s on A and
    1-s on B, with optimum s = b, giving b*ln(b/p) + (1-b)*ln((1-b)/(1-p)).
    Second: the classic single-sided Kelly stake with the rest held as
    cash.  The winning-branch wealths coincide alternative by alternative
    (the cash plus one-sided payout re-derives b/p and (1-b)/(1-p)), so the
    two expected utilities are equal.
    """
    _check_price(p)
    _check_belief(b)
    u_full = b * log(b / p) + (1.0 - b) * log((1.0 - b) / (1.0 - p))
    if b > p:
        s = (b - p) / (1.0 - p)
        u_single = b * log(s / p + (1.0 - s)) + (1.0 - b) * log(1.0 - s)
    elif b < p:
        s = (p - b) / p
        u_single = b * log(1.0 - s) + (1.0 - b) * log(s / (1.0 - p) + (1.0 - s))
    else:
        u_single = 0.0
    return u_full, u_single
