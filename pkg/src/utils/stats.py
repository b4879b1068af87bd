"""Binomial confidence intervals and threshold comparisons with uncertainty."""

import math
from typing import Optional, Tuple

from scipy.stats import binomtest, norm


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Returns (0.0, 1.0) when there are no trials.
    """
    if trials <= 0:
        return (0.0, 1.0)
    ci = binomtest(int(successes), int(trials)).proportion_ci(
        confidence_level=confidence, method="wilson"
    )
    return (max(0.0, float(ci.low)), min(1.0, float(ci.high)))


def z_value(confidence: float) -> float:
    """Two-sided standard normal quantile for a confidence level."""
    return float(norm.ppf(0.5 + confidence / 2.0))


def compare_to_threshold(
    successes: int,
    trials: int,
    threshold: float,
    confidence: float
) -> Optional[bool]:
    """Decide "true proportion > threshold" from a sample.

    Returns True/False when the Wilson interval lies strictly on one side of
    the threshold and None when the threshold falls inside it.
    """
    low, high = wilson_interval(successes, trials, confidence)
    if low > threshold:
        return True
    if high < threshold:
        return False
    return None


def required_samples(alpha: float, confidence: float) -> int:
    """Samples needed so the worst-case normal radius is below alpha/8."""
    z = z_value(confidence)
    return int(math.ceil((z * 0.5 * 8.0 / alpha) ** 2))
