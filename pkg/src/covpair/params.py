"""Covariance structure of (A, B, C) and the constants derived from it.

Sigma has unit diagonal, Cov(A, B) = sigma and Cov(A, C) = Cov(B, C) = rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConstraintViolation

SIGMA_BOUND = "SigmaBound"
XI_BOUND = "XiBound"


@dataclass(frozen=True)
class DerivedConstants:
    xi: float
    eta: float
    lam: float
    kappa: float
    delta: float
    alpha: float
    a: float
    b: float


@dataclass(frozen=True)
class CovarianceStructure:
    rho: float
    sigma: float

    def __post_init__(self):
        rho, sigma = self.rho, self.sigma
        if not (math.isfinite(rho) and math.isfinite(sigma)):
            raise ValueError(f"rho and sigma must be finite, got ({rho}, {sigma})")
        if not 1.0 - sigma * sigma > 0.0:
            raise ConstraintViolation(
                SIGMA_BOUND,
                f"constraint 1 - sigma^2 > 0 violated: sigma={sigma!r}",
            )
        if not 1.0 - 2.0 * rho * rho + sigma > 0.0:
            raise ConstraintViolation(
                XI_BOUND,
                f"constraint 1 - 2 rho^2 + sigma > 0 violated: rho={rho!r}, sigma={sigma!r}",
            )

    @property
    def matrix(self) -> np.ndarray:
        r, s = self.rho, self.sigma
        return np.array([[1.0, s, r], [s, 1.0, r], [r, r, 1.0]])

    @cached_property
    def constants(self) -> DerivedConstants:
        return derive_constants(self)


def make_structure(rho: float, sigma: float) -> CovarianceStructure:
    """Validate (rho, sigma) and return the structure.

    Raises ConstraintViolation naming the first inequality that fails. The
    checks are strict with no safety margin.
    """
    return CovarianceStructure(float(rho), float(sigma))


def derive_constants(s: CovarianceStructure) -> DerivedConstants:
    rho, sigma = s.rho, s.sigma
    xi = 1.0 - 2.0 * rho * rho + sigma
    eta = (1.0 + sigma) / (1.0 - sigma)
    return DerivedConstants(
        xi=xi,
        eta=eta,
        lam=1.0 / math.sqrt(1.0 - sigma),
        kappa=1.0 / math.sqrt(xi),
        delta=2.0 * rho / xi,
        alpha=math.sqrt(2.0 * eta) / xi,
        a=1.0 - rho * rho,
        b=sigma - rho * rho,
    )
