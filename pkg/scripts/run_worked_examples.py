"""Walk the bundled worked examples through every election and market.

For each config this prints the belief profile, the three weighted-majority
elections, the clearing prices and investment profiles of the naive and Kelly
markets, the asymptotic and finite-k taxed prices, the election/market
agreement table, and the exact accuracy of each weight scheme.

    python scripts/run_worked_examples.py
    python scripts/run_worked_examples.py --config my_panel.json --k 50
"""

from __future__ import annotations

import argparse
from pathlib import Path

from jurymarkets import (
    BeliefProfile,
    CompetenceProfile,
    SignalProfile,
    beliefs_from_signals,
    check_all_schemes,
    exact_accuracy,
    kelly_equilibrium,
    majority_aggregator,
    naive_equilibrium,
    taxed_equilibrium_asymptotic,
    taxed_equilibrium_finite,
    votes_from_beliefs,
    weighted_margin,
    weights_egalitarian,
    weights_linear,
    weights_log_odds,
)
from jurymarkets.cli import ExperimentConfig, load_config

REPO = Path(__file__).resolve().parents[1]
DEFAULT_CONFIGS = (
    REPO / "configs" / "example1.json",
    REPO / "configs" / "example2.json",
)


def _stakes(label: str, result) -> str:
    legs = ", ".join(
        f"agent {i}: sA={sa:.6g} sB={sb:.6g}"
        for i, (sa, sb) in enumerate(zip(result.profile.sA, result.profile.sB))
        if sa or sb
    )
    return f"  {label}: price={result.price!r}  [{legs or 'no trade'}]"


def report(cfg: ExperimentConfig, k: float) -> None:
    q = CompetenceProfile(cfg.competences)
    y = SignalProfile(cfg.signals)
    b = beliefs_from_signals(q, y)
    votes = votes_from_beliefs(b)
    print(f"competences {q.q}  signals {''.join(y.y)}")
    print(f"beliefs     {tuple(round(x, 12) for x in b.b)}")

    print("elections:")
    for name, weights in (
        ("simple", weights_egalitarian(q.n)),
        ("linear", weights_linear(q)),
        ("log-odds", weights_log_odds(q)),
    ):
        margin = weighted_margin(votes, weights)
        print(f"  {name:<8} margin={margin:+.6g}")

    print("markets:")
    print(_stakes("naive", naive_equilibrium(b)))
    print(_stakes("kelly", kelly_equilibrium(b)))
    finite = taxed_equilibrium_finite(b, k)
    print(
        f"  taxed k={k:g}: price={finite.price!r} "
        f"(iterations={finite.diagnostics.iterations}, "
        f"residual={finite.diagnostics.residual:.2e})"
    )
    print(f"  taxed k->inf: price={taxed_equilibrium_asymptotic(b)!r}")

    print("election vs market decisions:")
    for rep in check_all_schemes(q, y, None):
        print(
            f"  {rep.scheme.value:<15} election={rep.election} "
            f"market={rep.market} agree={rep.agree}"
        )

    print("exact accuracy by weight scheme:")
    for scheme in ("egalitarian", "linear", "log_odds"):
        estimate = exact_accuracy(majority_aggregator(scheme), q)
        print(
            f"  {scheme:<11} Q={estimate.value:.6f} "
            f"(tie mass {estimate.tie_mass:.4f})"
        )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--config",
        action="append",
        type=Path,
        help="experiment config (repeatable; defaults to the bundled examples)",
    )
    parser.add_argument(
        "--k", type=float, default=10.0, help="tax rate for the finite solve"
    )
    args = parser.parse_args(argv)

    for path in args.config or DEFAULT_CONFIGS:
        print(f"=== {path.name} ===")
        report(load_config(str(path)), args.k)
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
