"""Confidence intervals for acceptance rates and for differences of rates."""

from __future__ import annotations

from statsmodels.stats.proportion import confint_proportions_2indep, proportion_confint


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    lo, hi = proportion_confint(successes, trials, alpha=1 - level, method="wilson")
    return float(lo), float(hi)


def newcombe_interval(s1: int, n1: int, s2: int, n2: int, level: float = 0.95) -> tuple[float, float]:
    """Interval for p1 - p2 from two Wilson intervals (Newcombe's hybrid score method)."""
    lo, hi = confint_proportions_2indep(s1, n1, s2, n2, method="newcomb", compare="diff",
                                        alpha=1 - level)
    return float(lo), float(hi)
