"""Test of H0: Cov(A, C) = Cov(B, C) through the difference statistic
sum (a_j - b_j) c_j, whose null law depends on Cov(A, B) only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .distributions import diff_density
from .errors import EmptyInput, SigmaOutOfRange
from .quadrature import QuadratureConfig, integrate_1d

Alternative = Literal["two_sided", "greater", "less"]
ALTERNATIVES = ("two_sided", "greater", "less")

# tails are needed to relative accuracy, down to very small p-values
TAIL_CONFIG = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-10, max_subdivisions=2000)


@dataclass(frozen=True)
class TestInput:
    observations: np.ndarray
    sigma: float | None = None
    alternative: Alternative = "two_sided"

    __test__ = False  # not a pytest class

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        if obs.ndim != 2 or obs.shape[1] != 3:
            raise ValueError("observations must be an (n, 3) array of (a, b, c)")
        if obs.shape[0] == 0:
            raise EmptyInput("at least one observation is required")
        if not np.all(np.isfinite(obs)):
            raise ValueError("observations must be finite")
        if self.alternative not in ALTERNATIVES:
            raise ValueError(f"alternative must be one of {ALTERNATIVES}")
        object.__setattr__(self, "observations", obs)


@dataclass(frozen=True)
class TestResult:
    statistic: float
    n: int
    sigma_used: float
    p_value: float
    sigma_source: Literal["supplied", "estimated"]
    alternative: str = field(default="two_sided")

    __test__ = False


def diff_tail(sigma: float, n: int, threshold: float, cfg: QuadratureConfig = TAIL_CONFIG) -> float:
    """P(sum (A_j - B_j) C_j >= threshold) under H0.

    The null density is even, so threshold 0 gives exactly 1/2 without
    touching the singular point at 0 for n = 1.
    """
    if not 1.0 - sigma * sigma > 0.0:
        raise SigmaOutOfRange(f"need 1 - sigma^2 > 0, got sigma={sigma!r}")
    if threshold == 0.0:
        return 0.5
    if threshold < 0.0:
        return 1.0 - diff_tail(sigma, n, -threshold, cfg)
    res = integrate_1d(lambda x: diff_density(sigma, n, x), threshold, math.inf, cfg)
    return min(max(res.value, 0.0), 0.5)


def statistic(observations) -> float:
    obs = np.asarray(observations, dtype=float)
    return float(np.dot(obs[:, 0] - obs[:, 1], obs[:, 2]))


def estimate_sigma(observations) -> float:
    """Plug-in Cov(A, B) = mean(a * b) under the known zero means and unit variances."""
    obs = np.asarray(observations, dtype=float)
    return float(np.mean(obs[:, 0] * obs[:, 1]))


def equality_test(
    data: TestInput | Sequence,
    sigma: float | None = None,
    alternative: Alternative = "two_sided",
) -> TestResult:
    """p-value for H0 from the exact null density of the difference statistic.

    Without a supplied sigma the plug-in estimate is used and flagged as
    ``sigma_source="estimated"``; an estimate outside (-1, 1) is an error,
    not clamped.
    """
    inp = data if isinstance(data, TestInput) else TestInput(np.asarray(data), sigma, alternative)
    obs = inp.observations
    if inp.sigma is None:
        sig, source = estimate_sigma(obs), "estimated"
    else:
        sig, source = float(inp.sigma), "supplied"
    if not 1.0 - sig * sig > 0.0:
        raise SigmaOutOfRange(f"{source} sigma={sig!r} violates 1 - sigma^2 > 0")
    n = obs.shape[0]
    stat = statistic(obs)
    if inp.alternative == "two_sided":
        p = min(1.0, 2.0 * diff_tail(sig, n, abs(stat)))
    elif inp.alternative == "greater":
        p = diff_tail(sig, n, stat)
    else:
        p = diff_tail(sig, n, -stat)
    return TestResult(stat, n, sig, p, source, inp.alternative)
