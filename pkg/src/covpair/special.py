"""Modified Bessel function of the second kind and log-gamma.

K_nu is supported for integer and half-integer orders. Half-integer orders
come from the elementary closed form plus upward recurrence; integer orders
from K_0, K_1 (ascending series for x <= 2, Steed's continued fraction up to
x = 30, asymptotic expansion beyond) plus upward recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _backend
from .errors import DomainError

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class BesselOrder:
    """Order nu stored as the integer 2*nu, so half-integers stay exact."""

    twice_nu: int

    def __post_init__(self):
        if not isinstance(self.twice_nu, (int, np.integer)):
            raise TypeError("twice_nu must be an integer")

    @classmethod
    def of(cls, nu) -> "BesselOrder":
        if isinstance(nu, BesselOrder):
            return nu
        twice = Fraction(nu).limit_denominator(4) * 2
        if twice.denominator != 1 or abs(float(twice) - 2 * float(nu)) > 1e-12:
            raise DomainError(f"order {nu!r} is not an integer or half-integer")
        return cls(int(twice))

    @property
    def nu(self) -> float:
        return self.twice_nu / 2


def bessel_k(order, x):
    """K_nu(x) for x > 0; ``order`` is a BesselOrder or a number nu.

    K_{-nu} = K_nu. Results below the smallest normal double are returned
    as exactly 0.
    """
    order = BesselOrder.of(order)
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError("bessel_k requires x > 0")
    out = _backend.bessel_k(abs(order.twice_nu), xa)
    out = np.where(out < _TINY, 0.0, out)
    if np.ndim(x) == 0:
        return float(out)
    return out


def log_bessel_k(order, x):
    """log K_nu(x), finite even where K_nu underflows."""
    order = BesselOrder.of(order)
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError("log_bessel_k requires x > 0")
    out = _backend.log_kv_scaled(abs(order.twice_nu), xa) - xa
    return float(out) if np.ndim(x) == 0 else out


def log_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)
