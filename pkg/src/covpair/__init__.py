"""Exact distribution of two sample covariances that share a common variable.

For (A, B, C) jointly Gaussian with unit variances, Cov(A, B) = sigma and
Cov(A, C) = Cov(B, C) = rho, the package evaluates the joint law of
(g_ac, g_bc) = (sum a_j c_j, sum b_j c_j) over n observations, simulates it,
and tests Cov(A, C) = Cov(B, C).
"""

from ._backend import BACKEND
from .distributions import (
    cf_closed,
    cf_determinant,
    cf_reduced,
    cf_triple,
    clt_limit_covariance,
    clt_limit_density,
    density,
    density_general,
    diff_density,
    marginal_density,
)
from .errors import (
    ConstraintViolation,
    ConvergenceWarning,
    CovpairError,
    DomainError,
    EmptyInput,
    NonFiniteSample,
    SigmaOutOfRange,
)
from .inference import TestInput, TestResult, diff_tail, equality_test
from .numerics import (
    ProbabilityResult,
    integrate_density,
    invert_cf,
    marginalize,
    quadrant_probability,
    truncation_radius,
)
from .params import CovarianceStructure, DerivedConstants, derive_constants, make_structure
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, Rectangle
from .simulation import SimulationPlan, clt_check, empirical_quadrant, sample_cov_pairs
from .special import BesselOrder, bessel_k, log_bessel_k, log_gamma

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
