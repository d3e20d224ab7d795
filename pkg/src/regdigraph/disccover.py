"""Maximum weight covered by a disc of fixed radius, exact and approximate.

Three primitives over weighted points in the complex plane:

* closed discs (|p - c| <= r): exact via the classical angular sweep -- an
  optimal disc can be translated so that one covered point lies on its
  boundary, so sweeping centers on the radius-r circle around each point is
  exhaustive;
* open discs (|p - c| < r): exact via minimal-enclosing-circle center
  candidates (points, pair midpoints, triple circumcenters), with a fast
  1-D reduction for collinear sets and a shrink cross-check that settles
  generic inputs without the cubic candidate pass;
* a 2-approximation tri-state for large raw point sets: centers restricted
  to the points themselves at radius r (a "yes" is certified) and 2r (a "no"
  at 2r certifies no radius-r disc anywhere can succeed).
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree

SWEEP_CAP = 4096       # closed-sweep point cap (O(N^2 log N))
CANDIDATE_CAP = 128    # MEC-candidate cap for open discs (O(N^3))
_SHRINK = 1.0 - 1e-12


class DiscCoverError(ValueError):
    """Raised when an exact coverage computation is out of the feasible range."""


def dedupe_points(points, weights=None):
    """Merge exactly equal complex points, summing weights."""
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if weights is None:
        w = np.ones(len(pts), dtype=np.int64)
    else:
        w = np.asarray(weights).ravel()
        if len(w) != len(pts):
            raise ValueError("weights length mismatch")
    uniq, inv = np.unique(pts, return_inverse=True)
    wu = np.zeros(len(uniq), dtype=w.dtype)
    np.add.at(wu, inv, w)
    return uniq, wu


def max_coverage_closed(points, weights=None, radius: float = 1.0):
    """Exact max over centers c of sum of weights with |p - c| <= radius.

    Returns (best_weight, center).  Cap SWEEP_CAP on distinct points.
    """
    pts, w = dedupe_points(points, weights)
    n = len(pts)
    if n == 0:
        return 0, 0j
    if n > SWEEP_CAP:
        raise DiscCoverError(f"closed sweep capped at {SWEEP_CAP} distinct points, got {n}")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    k = int(np.argmax(w))
    best_w, best_c = w[k], complex(pts[k])
    if radius == 0 or n == 1:
        return best_w, best_c
    two_r = 2.0 * radius
    for i in range(n):
        v = pts - pts[i]
        dist = np.abs(v)
        near = dist <= two_r
        near[i] = False
        if not near.any():
            if w[i] > best_w:
                best_w, best_c = w[i], complex(pts[i])
            continue
        ang = np.angle(v[near])
        beta = np.arccos(np.clip(dist[near] / two_r, -1.0, 1.0))
        wj = w[near]
        start = np.mod(ang - beta, 2.0 * np.pi)
        end = np.mod(ang + beta, 2.0 * np.pi)
        wrapped = start > end
        base = w[i] + wj[wrapped].sum()     # arcs active at theta = 0
        if base > best_w:
            best_w, best_c = base, complex(pts[i] + radius)
        angles = np.concatenate([start, end])
        deltas = np.concatenate([wj, -wj])
        is_end = np.concatenate([np.zeros(len(wj), dtype=np.int8),
                                 np.ones(len(wj), dtype=np.int8)])
        order = np.lexsort((is_end, angles))
        running = base + np.cumsum(deltas[order])
        starts_sorted = is_end[order] == 0
        if starts_sorted.any():
            vals = running[starts_sorted]
            j = int(np.argmax(vals))
            if vals[j] > best_w:
                theta = angles[order][starts_sorted][j]
                best_w = vals[j]
                best_c = complex(pts[i] + radius * np.exp(1j * theta))
    return best_w, best_c


def _collinear_axis(pts):
    """Return (origin, unit) if points are (numerically) collinear, else None."""
    n = len(pts)
    if n <= 2:
        u = pts[1] - pts[0] if n == 2 and pts[1] != pts[0] else 1.0 + 0j
        return pts[0], u / abs(u)
    p0 = pts[0]
    rel = pts - p0
    k = int(np.argmax(np.abs(rel)))
    scale = abs(rel[k])
    if scale == 0:
        return p0, 1.0 + 0j
    u = rel[k] / scale
    cross = np.abs((np.conj(u) * rel).imag)
    if cross.max() <= 1e-9 * scale:
        return p0, u
    return None


def _open_interval_max(values, weights, radius):
    """Max weight in an open interval of length 2*radius on the line (exact)."""
    order = np.argsort(values)
    v = values[order]
    w = weights[order]
    csum = np.concatenate([[0], np.cumsum(w)])
    best, best_iv = -1, (0, 0)
    k = 0
    n = len(v)
    for j in range(n):
        if k < j:
            k = j
        while k + 1 < n and v[k + 1] - v[j] < 2.0 * radius:
            k += 1
        tot = csum[k + 1] - csum[j]
        if tot > best:
            best, best_iv = tot, (j, k)
    j, k = best_iv
    return best, 0.5 * (v[j] + v[k])


def max_coverage_open(points, weights=None, radius: float = 1.0,
                      candidate_cap: int = CANDIDATE_CAP):
    """Exact sup over centers c of sum of weights with |p - c| < radius (strict).

    Equals the max weight over subsets whose minimal enclosing circle has
    radius < r; the optimizing center is a MEC center, i.e. a point, a pair
    midpoint, or a triple circumcenter.  Returns (best_weight, center).
    """
    pts, w = dedupe_points(points, weights)
    n = len(pts)
    if n == 0 or radius <= 0:
        return 0, None
    axis = _collinear_axis(pts)
    if axis is not None:
        origin, u = axis
        tv = (np.conj(u) * (pts - origin)).real
        best, t_center = _open_interval_max(tv, w, radius)
        return best, complex(origin + u * t_center)
    if n <= SWEEP_CAP:
        lo, c_lo = max_coverage_closed(pts, w, radius * _SHRINK)
        hi, _ = max_coverage_closed(pts, w, radius)
        if lo == hi:
            return lo, c_lo
    if n > candidate_cap:
        raise DiscCoverError(
            f"open-disc exact coverage needs <= {candidate_cap} distinct points "
            f"off a common line (got {n}); boundary-critical configuration")
    cands = [pts]
    idx_i, idx_j = np.triu_indices(n, k=1)
    pair_d = np.abs(pts[idx_i] - pts[idx_j])
    close = pair_d < 2.0 * radius
    cands.append(0.5 * (pts[idx_i[close]] + pts[idx_j[close]]))
    if n >= 3:
        trip = np.array(list(combinations(range(n), 3)), dtype=np.int64)
        a, b, c = pts[trip[:, 0]], pts[trip[:, 1]], pts[trip[:, 2]]
        ub, vb = b - a, c - a
        den = 2.0 * (ub.real * vb.imag - ub.imag * vb.real)
        ok = np.abs(den) > 1e-14 * np.maximum(np.abs(ub), np.abs(vb)) ** 2
        ub, vb, aa, den = ub[ok], vb[ok], a[ok], den[ok]
        nu = np.abs(ub) ** 2
        nv = np.abs(vb) ** 2
        cx = (vb.imag * nu - ub.imag * nv) / den
        cy = (ub.real * nv - vb.real * nu) / den
        centers = aa + cx + 1j * cy
        rad = np.abs(centers - aa)
        cands.append(centers[rad < 2.0 * radius])
    centers = np.concatenate(cands)
    best, best_c = -1, None
    for s in range(0, len(centers), 4096):
        blk = centers[s:s + 4096]
        counts = (np.abs(pts[None, :] - blk[:, None]) < radius) @ w
        k = int(np.argmax(counts))
        if counts[k] > best:
            best, best_c = counts[k], complex(blk[k])
    return best, best_c


def coverage_tristate(points, radius: float, threshold: float):
    """2-approximate decision: is there a closed radius-r disc with coverage > threshold?

    Centers are restricted to the points themselves.  Returns one of
    ("yes", center)   -- some point-centered radius-r disc exceeds threshold
                         (a genuine certificate);
    ("no", None)      -- no point-centered radius-2r disc exceeds threshold,
                         which certifies no radius-r disc anywhere does;
    ("boundary", center) -- only the doubled radius succeeded; undecided.
    """
    pts = np.asarray(points, dtype=np.complex128).ravel()
    xy = np.column_stack([pts.real, pts.imag])
    tree = cKDTree(xy)
    counts_r = tree.query_ball_point(xy, r=radius, return_length=True)
    k = int(np.argmax(counts_r))
    if counts_r[k] > threshold:
        return "yes", complex(pts[k])
    counts_2r = tree.query_ball_point(xy, r=2.0 * radius, return_length=True)
    k2 = int(np.argmax(counts_2r))
    if counts_2r[k2] <= threshold:
        return "no", None
    return "boundary", complex(pts[k2])


def max_pointcentered_weighted(points, weights, radius: float, chunk: int = 512):
    """Max weighted closed-ball count over centers restricted to the points.

    Chunked brute force; used by the tri-state path when weights matter.
    """
    pts = np.asarray(points, dtype=np.complex128).ravel()
    w = np.asarray(weights, dtype=np.float64).ravel()
    best, best_c = -np.inf, None
    for s in range(0, len(pts), chunk):
        blk = pts[s:s + chunk]
        counts = (np.abs(pts[None, :] - blk[:, None]) <= radius) @ w
        k = int(np.argmax(counts))
        if counts[k] > best:
            best, best_c = counts[k], complex(blk[k])
    return best, best_c
