"""Seeded Monte Carlo from the generative model.

Replications are grouped in fixed blocks of ``BLOCK`` reps. Block b draws
from its own Philox stream keyed by (seed, b), so the output depends only on
the plan, never on how many workers ran the blocks or in what order. Normal
deviates come from numpy's ``Generator.standard_normal`` (ziggurat).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .distributions import clt_limit_covariance
from .params import CovarianceStructure

BLOCK = 1 << 14


def worker_count() -> int:
    """Workers for block-parallel runs; COVPAIR_THREADS caps it (0 = auto)."""
    raw = os.environ.get("COVPAIR_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


@dataclass(frozen=True)
class SimulationPlan:
    structure: CovarianceStructure
    n: int
    reps: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def blocks(self) -> int:
        return -(-self.reps // BLOCK)


@dataclass(frozen=True)
class CholeskyFactor:
    lower: np.ndarray

    def __post_init__(self):
        if not np.all(np.diag(self.lower) > 0):
            raise ArithmeticError("Cholesky factor has a non-positive diagonal")


def cholesky(s: CovarianceStructure) -> CholeskyFactor:
    # validation guarantees positive definiteness, so failure here is a bug
    return CholeskyFactor(np.linalg.cholesky(s.matrix))


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, block]))


def normal_triples(s: CovarianceStructure, count: int, seed: int, block: int = 0) -> np.ndarray:
    """count draws of (A, B, C) ~ N(0, Sigma), shape (count, 3)."""
    z = block_generator(seed, block).standard_normal((count, 3))
    return z @ cholesky(s).lower.T


def _block_pairs(plan: SimulationPlan, b: int) -> np.ndarray:
    size = min(BLOCK, plan.reps - b * BLOCK)
    z = block_generator(plan.seed, b).standard_normal((size, plan.n, 3))
    abc = z @ cholesky(plan.structure).lower.T
    c = abc[..., 2]
    g = np.empty((size, 2))
    g[:, 0] = np.einsum("ij,ij->i", abc[..., 0], c)
    g[:, 1] = np.einsum("ij,ij->i", abc[..., 1], c)
    return g


def iter_cov_pairs(plan: SimulationPlan, workers: int | None = None) -> Iterator[np.ndarray]:
    """Yield (rows, 2) arrays of (g_ac, g_bc), block by block in order."""
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1:
        for b in range(plan.blocks):
            yield _block_pairs(plan, b)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map preserves block order regardless of completion order
        yield from pool.map(lambda b: _block_pairs(plan, b), range(plan.blocks))


def sample_cov_pairs(plan: SimulationPlan, workers: int | None = None) -> np.ndarray:
    """All reps as a (reps, 2) array."""
    return np.concatenate(list(iter_cov_pairs(plan, workers)), axis=0)


def empirical_quadrant(
    plan: SimulationPlan, x0: float = 0.0, y0: float = 0.0, workers: int | None = None
) -> tuple[float, float]:
    """Fraction of reps with g_ac > x0 and g_bc > y0, and its binomial SE."""
    hits = 0
    for g in iter_cov_pairs(plan, workers):
        hits += int(np.count_nonzero((g[:, 0] > x0) & (g[:, 1] > y0)))
    p = hits / plan.reps
    return p, math.sqrt(p * (1.0 - p) / plan.reps)


@dataclass(frozen=True)
class CltRow:
    n: int
    empirical: np.ndarray
    limit: np.ndarray
    std_error: np.ndarray
    max_deviation: float

    @property
    def max_z(self) -> float:
        """Largest entrywise |empirical - limit| in units of its SE."""
        return float(np.max(np.abs(self.empirical - self.limit) / self.std_error))


def clt_check(
    s: CovarianceStructure, n_list, reps: int, seed: int = 0, workers: int | None = None
) -> list[CltRow]:
    """Empirical covariance of ((g - n rho) / sqrt(n)) against the CLT limit."""
    limit = clt_limit_covariance(s)
    rows = []
    for n in n_list:
        plan = SimulationPlan(s, int(n), reps, seed)
        z = (sample_cov_pairs(plan, workers) - n * s.rho) / math.sqrt(n)
        zc = z - z.mean(axis=0)
        emp = zc.T @ zc / (reps - 1)
        prods = zc[:, :, None] * zc[:, None, :]
        se = prods.reshape(reps, 4).std(axis=0).reshape(2, 2) / math.sqrt(reps)
        rows.append(CltRow(int(n), emp, limit, se, float(np.max(np.abs(emp - limit)))))
    return rows
