"""Littlewood-Offord ball probabilities for +-1 signed sums of complex weights.

For weights x_1, ..., x_m with |x_i| >= 1 and a radius t >= 1, the quantity
of interest is

    sup_a P( |sum_i xi_i x_i - a| < t ),   xi_i independent +-1 signs,

bounded by C*t/sqrt(m).  The exact mode enumerates all 2^m signed sums and
takes the true sup over centers: the disc is OPEN, so the optimum is the
largest atom mass whose minimal enclosing circle has radius strictly below
t (centers: atoms, pair midpoints, triple circumcenters; collinear atom sets
reduce to an interval scan).  The Monte Carlo mode samples sign vectors and
maximizes over a center grid, which lower-bounds the true sup.

Sign convention: 0/1 support indicators map to signs via xi = 2*indicator - 1
before querying this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .disccover import max_coverage_open

ENUM_CAP = 24           # 2^m sign vectors are materialized
GRID_CENTER_CAP = 4_000_000


@dataclass(frozen=True)
class LOQuery:
    """One ball-probability query: weights x (all |x_i| >= 1), radius t >= 1.

    grid_step is the center-grid spacing for the Monte Carlo sup (default
    t/10; the grid sup is a lower bound on the true sup).
    """

    x: tuple
    t: float
    grid_step: Optional[float] = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.complex128)
        if len(x) < 1:
            raise ValueError("need at least one weight")
        if (np.abs(x) < 1.0 - 1e-12).any():
            raise ValueError("all |x_i| must be >= 1")
        if self.t < 1.0:
            raise ValueError("need t >= 1")
        if self.grid_step is not None and self.grid_step <= 0:
            raise ValueError("grid_step must be positive")
        object.__setattr__(self, "x", tuple(complex(c) for c in x))

    @property
    def m(self) -> int:
        return len(self.x)

    def weights(self) -> np.ndarray:
        return np.asarray(self.x, dtype=np.complex128)

    def step(self) -> float:
        return self.grid_step if self.grid_step is not None else self.t / 10.0


def signed_sums(q: LOQuery) -> np.ndarray:
    """All 2^m achievable sums sum_i xi_i x_i (with multiplicity)."""
    if q.m > ENUM_CAP:
        raise ValueError(f"exact enumeration capped at m <= {ENUM_CAP}")
    sums = np.zeros(1, dtype=np.complex128)
    for xi in q.weights():
        sums = np.concatenate([sums + xi, sums - xi])
    return sums


def lo_ball_exact(q: LOQuery) -> float:
    """Exact sup_a P(|S - a| < t) over the 2^m sign atoms (open disc)."""
    sums = signed_sums(q)
    vals, counts = np.unique(sums, return_counts=True)
    best, _ = max_coverage_open(vals, counts, q.t)
    return float(best) / 2 ** q.m


def lo_ball_mc(q: LOQuery, samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of the ball probability, sup over a center grid.

    Returns (estimate, stderr) with stderr the binomial standard error at the
    maximizing center.  Deterministic in the seed.
    """
    if samples < 1:
        raise ValueError("need samples >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    signs = rng.integers(0, 2, size=(samples, q.m)) * 2 - 1
    sums = signs.astype(np.float64) @ q.weights()
    h = q.step()
    re_lo, re_hi = sums.real.min() - q.t, sums.real.max() + q.t
    im_lo, im_hi = sums.imag.min() - q.t, sums.imag.max() + q.t
    re_ax = np.arange(re_lo, re_hi + h, h)
    im_ax = np.arange(im_lo, im_hi + h, h)
    if len(re_ax) * len(im_ax) > GRID_CENTER_CAP:
        raise ValueError("center grid too large; increase grid_step")
    tree = cKDTree(np.column_stack([sums.real, sums.imag]))
    # open disc: shrink the closed KD-tree radius by a hair to exclude the boundary
    r_eff = q.t * (1.0 - 1e-9)
    best = 0
    for re0 in re_ax:
        centers = np.column_stack([np.full(len(im_ax), re0), im_ax])
        counts = tree.query_ball_point(centers, r=r_eff, return_length=True)
        c = int(counts.max())
        if c > best:
            best = c
    p = best / samples
    stderr = math.sqrt(max(p * (1.0 - p), 1.0 / samples) / samples)
    return p, stderr


def lo_bound_ratio(q: LOQuery, probability: Optional[float] = None) -> float:
    """The empirical constant P * sqrt(m) / t (P exact unless supplied)."""
    if probability is None:
        probability = lo_ball_exact(q)
    return probability * math.sqrt(q.m) / q.t
