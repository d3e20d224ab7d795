"""Parameter system and steep/sloping/almost-constant vector classification.

The derived parameters (all logs natural):

    eps0 = sqrt(log d / d)          p  = floor(1/(5*eps0))
    n0 = ceil(a1*n*log d / d^2)     n2 = floor(a2*n/d)      n3 = floor(a3*n/log d)
    n1 = 1 if n0 = 1; n0 if n0 <= p; p^(r+1) otherwise, where p^r < n0 <= p^(r+1)
    alpha_d = log(4d)/log(p) - 2    (so p^(2+alpha_d) = 4d)

with free constants a3 <= a2/28 <= a1/28^2.  The h-scale and the sloping
norm constant:

    h_0 = sqrt(n)
    h_i = sqrt(n) + sqrt(2p) * p^(i*(2+alpha_d))            for 1 <= i <= r
    h_top = sqrt(3p) * n1^(2+alpha_d)   if n0 > p
            2 d^(3/2) / sqrt(log d)     if 1 < n0 <= p
            sqrt(n)                     if n0 = 1
    b_st  = 4 d^(3/2) h_top  if n0 > 1, else d*sqrt(n)
    rho   = 1/(d^(3/2) b_st)          delta = (n - n3)/n

A nonzero vector is classified by the first jump of its nonincreasing
modulus rearrangement x*:

    T0(0): x*_1 > 4d x*_m, m = min(n0, p)       (only when n0 > 1)
    T0(i): x*_{p^i} > 4d x*_{p^(i+1)}, 1 <= i <= r, no earlier T0 jump
    T1:    x*_{n1} > d^(3/2) x*_{n2}, not in T0
    T2:    x*_{n2} > 4 x*_{n3}, not in T0 or T1

Non-steep vectors split on whether some closed disc of radius rho*||x||_2
captures more than delta*n coordinates (almost constant sloping) or not
(essentially non-constant).  With the default delta = (n-n3)/n the almost
constant side is exactly the "more than n - n3 coordinates near one value"
class, and the other side is the essentially-non-constant set of the
distance analysis.

Degenerate desk-scale regimes (n2 < 1, n3 < 1, or an undefined p-ladder)
are hard errors: the classification thresholds would be meaningless there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .disccover import (
    dedupe_points,
    max_coverage_closed,
    max_coverage_open,
    _open_interval_max,
)

EXACT_DISC_CAP = 2000  # distinct values; above this the 2-approx tri-state applies

T0 = "T0"
T1 = "T1"
T2 = "T2"
ALMOST_CONSTANT_SLOPING = "almost_constant_sloping"
ESSENTIALLY_NON_CONSTANT = "essentially_non_constant"

STEEP_LABELS = (T0, T1, T2)
ALL_LABELS = STEEP_LABELS + (ALMOST_CONSTANT_SLOPING, ESSENTIALLY_NON_CONSTANT)


class DegenerateRegimeError(ValueError):
    """The (n, d, a1, a2, a3) combination leaves the parameter system undefined."""


class ShiftRangeError(ValueError):
    """|z| exceeds the range in which the requested certificate is guaranteed."""


@dataclass(frozen=True)
class TaxonomyParams:
    n: int
    d: int
    a1: float
    a2: float
    a3: float
    eps0: float
    p: int
    n0: int
    n1: int
    n2: int
    n3: int
    r: Optional[int]            # None iff n0 = 1
    alpha_d: Optional[float]    # None iff p < 2
    h_ladder: tuple             # (h_0, ..., h_r); just (h_0,) unless n0 > p
    h_top: float                # the bound used for x not in T0
    b_st: float
    rho: float
    delta: float
    regime: str                 # "n0_eq_1" | "small_n0" | "ladder"

    def h(self, i: int) -> float:
        """h_i for 0 <= i <= r, and the top value for i = r+1 (regime-tagged)."""
        if i < len(self.h_ladder):
            return self.h_ladder[i]
        if self.r is not None and i == self.r + 1:
            return self.h_top
        if self.r is None and i <= 1:
            return self.h_top if i == 1 else self.h_ladder[0]
        raise IndexError(f"h index {i} out of range for regime {self.regime}")

    def to_json_dict(self) -> dict:
        return {
            "n": self.n, "d": self.d, "a1": self.a1, "a2": self.a2, "a3": self.a3,
            "eps0": self.eps0, "p": self.p, "n0": self.n0, "n1": self.n1,
            "n2": self.n2, "n3": self.n3, "r": self.r, "alpha_d": self.alpha_d,
            "h_ladder": list(self.h_ladder), "h_top": self.h_top, "b_st": self.b_st,
            "rho": self.rho, "delta": self.delta, "regime": self.regime,
        }


def compute_params(n: int, d: int, a1: float = 0.1, a2: Optional[float] = None,
                   a3: Optional[float] = None) -> TaxonomyParams:
    """Derive the full parameter bundle; natural log throughout.

    Defaults make the constraint chain tight: a2 = a1/28, a3 = a2/28.
    """
    if d < 3:
        raise DegenerateRegimeError(f"need d >= 3 (log d > 1), got d={d}")
    if n < d:
        raise DegenerateRegimeError(f"need n >= d, got n={n}, d={d}")
    if a2 is None:
        a2 = a1 / 28.0
    if a3 is None:
        a3 = a2 / 28.0
    if min(a1, a2, a3) <= 0:
        raise ValueError("a1, a2, a3 must be positive")
    slack = 1.0 + 1e-12
    if not (a3 <= a2 / 28.0 * slack and a2 <= a1 / 28.0 * slack):
        raise ValueError(
            f"constraint a3 <= a2/28 <= a1/28^2 violated: a=({a1}, {a2}, {a3})")

    logd = math.log(d)
    eps0 = math.sqrt(logd / d)
    p = int(math.floor(1.0 / (5.0 * eps0)))
    n0 = int(math.ceil(a1 * n * logd / d ** 2))
    n2 = int(math.floor(a2 * n / d))
    n3 = int(math.floor(a3 * n / logd))
    if n2 < 1 or n3 < 1:
        raise DegenerateRegimeError(
            f"degenerate regime: n2={n2}, n3={n3} (need both >= 1) at n={n}, d={d}")
    if n2 > n3:
        raise DegenerateRegimeError(
            f"degenerate regime: n2={n2} > n3={n3} at n={n}, d={d}")
    if n3 > n:
        raise DegenerateRegimeError(f"n3={n3} exceeds n={n}")

    sqrt_n = math.sqrt(n)
    alpha_d = math.log(4 * d) / math.log(p) - 2.0 if p >= 2 else None

    if n0 == 1:
        n1, r, regime = 1, None, "n0_eq_1"
        h_ladder = (sqrt_n,)
        h_top = sqrt_n
        b_st = d * sqrt_n
    else:
        if n0 > p and p < 2:
            raise DegenerateRegimeError(
                f"p={p} < 2 while n0={n0} > p: the p-power ladder is undefined")
        r = 0
        while p ** (r + 1) < n0:
            r += 1
        if n0 <= p:
            n1, regime = n0, "small_n0"
            h_ladder = (sqrt_n,)
            h_top = 2.0 * d ** 1.5 / math.sqrt(logd)
        else:
            n1, regime = p ** (r + 1), "ladder"
            h_ladder = (sqrt_n,) + tuple(
                sqrt_n + math.sqrt(2 * p) * p ** (i * (2.0 + alpha_d))
                for i in range(1, r + 1))
            h_top = math.sqrt(3 * p) * n1 ** (2.0 + alpha_d)
        b_st = 4.0 * d ** 1.5 * h_top
    if n1 > n:
        raise DegenerateRegimeError(f"n1={n1} exceeds n={n}")

    return TaxonomyParams(
        n=n, d=d, a1=a1, a2=a2, a3=a3, eps0=eps0, p=p, n0=n0, n1=n1, n2=n2,
        n3=n3, r=r, alpha_d=alpha_d, h_ladder=h_ladder, h_top=h_top, b_st=b_st,
        rho=1.0 / (d ** 1.5 * b_st), delta=(n - n3) / n, regime=regime)


# ---------------------------------------------------------------------------
# Rearrangement and value profiles


def rearrange(x) -> tuple[np.ndarray, np.ndarray]:
    """Nonincreasing rearrangement of |x| and the witnessing permutation.

    Returns (xstar, sigma) with xstar[k] = |x[sigma[k]]| nonincreasing; ties
    broken by original index ascending.  Indices are 0-based.
    """
    x = np.asarray(x, dtype=np.complex128).ravel()
    mod = np.abs(x)
    sigma = np.lexsort((np.arange(len(x)), -mod))
    return mod[sigma], sigma


@dataclass(frozen=True)
class ValueProfile:
    """A complex vector as distinct values with multiplicities (order-free).

    Lets the classifier and the norm-bound checks run at astronomically large
    n when the vector has few distinct values; every check depends only on
    the weighted value multiset.
    """

    values: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_vector(cls, x) -> "ValueProfile":
        v, c = dedupe_points(np.asarray(x, dtype=np.complex128).ravel())
        return cls(values=v, counts=c)

    @classmethod
    def from_pairs(cls, pairs) -> "ValueProfile":
        vals = np.array([complex(v) for v, _ in pairs], dtype=np.complex128)
        cnts = np.array([int(c) for _, c in pairs], dtype=np.int64)
        if (cnts < 1).any():
            raise ValueError("multiplicities must be >= 1")
        v, inv = np.unique(vals, return_inverse=True)
        c = np.zeros(len(v), dtype=np.int64)
        np.add.at(c, inv, cnts)
        return cls(values=v, counts=c)

    @property
    def length(self) -> int:
        return int(self.counts.sum())

    def norm2(self) -> float:
        return float(np.sqrt(np.sum(self.counts * np.abs(self.values) ** 2)))

    def _sorted_moduli(self):
        mod = np.abs(self.values)
        order = np.argsort(-mod, kind="stable")
        return mod[order], np.cumsum(self.counts[order])

    def xstar(self, k: int) -> float:
        """k-th largest modulus, 1-based rank."""
        if not 1 <= k <= self.length:
            raise IndexError(f"rank {k} out of range [1, {self.length}]")
        mod, cum = self._sorted_moduli()
        return float(mod[np.searchsorted(cum, k)])


@dataclass(frozen=True)
class VectorClass:
    """Classification verdict: label, steep jump or disc-center witness.

    ``flagged`` marks verdicts whose almost-constant decision came from the
    2-approximation (large vectors only); ``t0_index`` is i for T0(i).
    """

    label: str
    t0_index: Optional[int] = None
    jump: Optional[tuple] = None          # (k_rank, m_rank, xstar_k, xstar_m), 1-based
    center: Optional[complex] = None      # disc center for almost-constant
    flagged: bool = False

    @property
    def is_steep(self) -> bool:
        return self.label in STEEP_LABELS

    def pretty(self) -> str:
        if self.label == T0:
            return f"T0({self.t0_index})"
        return self.label

    def to_json_dict(self) -> dict:
        return {
            "label": self.label, "t0_index": self.t0_index,
            "jump": list(self.jump) if self.jump else None,
            "center": [self.center.real, self.center.imag] if self.center is not None else None,
            "flagged": self.flagged,
        }


def _steep_class(profile: ValueProfile, params: TaxonomyParams):
    """First jump in the T ladder, in priority order; None when sloping."""
    d = params.d
    xs = profile.xstar
    if params.n0 > 1:
        m = min(params.n0, params.p)
        if xs(1) > 4.0 * d * xs(m):
            return VectorClass(T0, t0_index=0, jump=(1, m, xs(1), xs(m)))
        if params.regime == "ladder":
            for i in range(1, params.r + 1):
                k, mm = params.p ** i, params.p ** (i + 1)
                if xs(k) > 4.0 * d * xs(mm):
                    return VectorClass(T0, t0_index=i, jump=(k, mm, xs(k), xs(mm)))
    if xs(params.n1) > d ** 1.5 * xs(params.n2):
        return VectorClass(T1, jump=(params.n1, params.n2, xs(params.n1), xs(params.n2)))
    if xs(params.n2) > 4.0 * xs(params.n3):
        return VectorClass(T2, jump=(params.n2, params.n3, xs(params.n2), xs(params.n3)))
    return None


def _tristate_weighted(profile: ValueProfile, radius: float, threshold: float):
    """Point-centered 2-approximation; "yes" and "no" are exact certificates."""
    from .disccover import max_pointcentered_weighted
    best, center = max_pointcentered_weighted(profile.values, profile.counts, radius)
    if best > threshold:
        return "yes", center
    best2, center2 = max_pointcentered_weighted(profile.values, profile.counts, 2 * radius)
    if best2 <= threshold:
        return "no", None
    return "boundary", center2


def _window_weight_bound(profile: ValueProfile, width: float) -> float:
    """Max weight whose real parts fit a closed window of ``width``; this
    upper-bounds the coverage of any disc of radius width/2."""
    order = np.argsort(profile.values.real)
    re = profile.values.real[order]
    w = profile.counts[order]
    csum = np.concatenate([[0], np.cumsum(w)])
    hi = np.searchsorted(re, re + width, side="right")
    return float((csum[hi] - csum[:-1]).max())


def _almost_constant_split(profile: ValueProfile, radius: float, threshold: float):
    """(is_almost_constant, center, flagged) for coverage > threshold at ``radius``.

    Certified short-circuits settle most inputs without the quadratic sweep:
    a single value heavy enough is a yes; a 1-D projection window that cannot
    reach the threshold is a no; the point-centered 2-approximation narrows
    the rest.  Only vectors too large for the sweep can come back flagged.
    """
    heavy = int(np.argmax(profile.counts))
    if profile.counts[heavy] > threshold:
        return True, complex(profile.values[heavy]), False
    if _window_weight_bound(profile, 2.0 * radius) <= threshold:
        return False, None, False
    k = len(profile.values)
    if k > 256:
        verdict, center = _tristate_weighted(profile, radius, threshold)
        if verdict == "yes":
            return True, center, False
        if verdict == "no":
            return False, None, False
        if k > EXACT_DISC_CAP:
            return False, center, True  # undecided above the sweep cap: flagged
    best, center = max_coverage_closed(profile.values, profile.counts, radius)
    return bool(best > threshold), center, False


def classify_profile(profile: ValueProfile, params: TaxonomyParams,
                     delta: Optional[float] = None) -> VectorClass:
    """Classify a weighted value multiset; see :func:`classify`."""
    if profile.length != params.n:
        raise ValueError(f"vector length {profile.length} != params.n {params.n}")
    norm = profile.norm2()
    if norm == 0:
        raise ValueError("cannot classify the zero vector")
    steep = _steep_class(profile, params)
    if steep is not None:
        return steep
    if delta is None:
        delta = params.delta
    n = profile.length
    ac, center, flagged = _almost_constant_split(profile, params.rho * norm, delta * n)
    if ac:
        return VectorClass(ALMOST_CONSTANT_SLOPING, center=center, flagged=flagged)
    return VectorClass(ESSENTIALLY_NON_CONSTANT, flagged=flagged)


def classify(x, params: TaxonomyParams, delta: Optional[float] = None) -> VectorClass:
    """Classify a nonzero vector.

    Steep classes are checked in the ladder's priority order (T0(0), T0(1),
    ..., T0(r), T1, T2); a non-steep vector is almost-constant-sloping when
    some closed disc of radius rho*||x||_2 captures strictly more than
    delta*n coordinates (default delta = (n-n3)/n, i.e. more than n-n3), and
    essentially non-constant otherwise.  Scale invariant by construction.
    """
    return classify_profile(ValueProfile.from_vector(x), params, delta)


def is_almost_constant(x, rho: float, n3: int, exact_cap: int = EXACT_DISC_CAP):
    """Does some disc of radius rho*||x||_2 capture more than n - n3 coordinates?

    Exact (max-points-in-disc sweep) when the number of distinct coordinate
    values is at most ``exact_cap``; otherwise the point-centered radius /
    doubled-radius 2-approximation.  Returns (status, center) with status in
    {"yes", "no", "boundary"}; center is a witnessing disc center for "yes".
    """
    x = np.asarray(x, dtype=np.complex128).ravel()
    norm = float(np.linalg.norm(x))
    if norm == 0:
        raise ValueError("x must be nonzero")
    profile = ValueProfile.from_vector(x)
    threshold = len(x) - n3
    radius = rho * norm
    if len(profile.values) <= exact_cap:
        best, center = max_coverage_closed(profile.values, profile.counts, radius)
        return ("yes", center) if best > threshold else ("no", None)
    return _tristate_weighted(profile, radius, threshold)


# ---------------------------------------------------------------------------
# Norm bounds per class


def norm_bound_profile(profile: ValueProfile, cls: VectorClass,
                       params: TaxonomyParams) -> tuple[bool, float]:
    """Check the class-appropriate norm bound; returns (holds, slack).

    T0(i): ||x|| <= h_i x*_{p^i}; T1: <= h_top x*_{n1}; T2: <= (b_st/4) x*_{n2};
    sloping: <= b_st x*_{n3}.  Slack = bound - ||x||.
    """
    recheck = _steep_class(profile, params)
    got = (recheck.label, recheck.t0_index) if recheck else (None, None)
    want = (cls.label, cls.t0_index) if cls.is_steep else (None, None)
    if got != want:
        raise ValueError(f"class/vector mismatch: vector is {got}, claimed {want}")
    norm = profile.norm2()
    if cls.label == T0:
        rank = params.p ** cls.t0_index if cls.t0_index >= 1 else 1
        bound = params.h(cls.t0_index) * profile.xstar(rank)
    elif cls.label == T1:
        bound = params.h_top * profile.xstar(params.n1)
    elif cls.label == T2:
        bound = (params.b_st / 4.0) * profile.xstar(params.n2)
    else:
        bound = params.b_st * profile.xstar(params.n3)
    return norm <= bound, bound - norm


def norm_bound_check(x, cls: VectorClass, params: TaxonomyParams) -> tuple[bool, float]:
    return norm_bound_profile(ValueProfile.from_vector(x), cls, params)


# ---------------------------------------------------------------------------
# Constructive separated pairs


class SeparationHypothesisError(ValueError):
    """The every-disc-misses-eps*m-coordinates hypothesis fails for the input."""


def separated_pairs(x, rho: float, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint index sets J, Q with |J|,|Q| >= ceil(eps*m/4) and pairwise
    |x_i - x_j| >= rho/sqrt(2) for i in J, j in Q.

    The hypothesis -- for every complex lambda at least eps*m coordinates are
    at distance >= rho from lambda -- is verified exactly (open-disc cover)
    and a failure raises.  The construction follows the one-dimensional
    reduction: pick the real or imaginary part for which every open interval
    of radius rho/sqrt(2) misses eps*m/2 coordinates, sort it, and take the
    top and bottom ceil(eps*m/4) indices.
    """
    x = np.asarray(x, dtype=np.complex128).ravel()
    m = len(x)
    if m < 2:
        raise SeparationHypothesisError("need m >= 2")
    if not (0 < eps <= 1) or rho <= 0:
        raise ValueError("need rho > 0 and 0 < eps <= 1")
    vals, w = dedupe_points(x)
    near, _ = max_coverage_open(vals, w, rho)
    if near > m - eps * m + 1e-9:
        raise SeparationHypothesisError(
            f"hypothesis fails: some open rho-disc captures {near} > m - eps*m coordinates")

    chosen = None
    for comp in (x.real, x.imag):
        cv, cw = dedupe_points(comp.astype(np.complex128))
        near1, _ = _open_interval_max(cv.real, cw, rho / math.sqrt(2.0))
        if near1 <= m - eps * m / 2.0 + 1e-9:
            chosen = comp
            break
    if chosen is None:
        # impossible when the planar hypothesis holds; defensive
        raise SeparationHypothesisError("no component satisfies the half-mass condition")

    order = np.lexsort((np.arange(m), -chosen))
    cap = math.ceil(eps * m / 4.0)
    J = order[:cap]
    Q = order[m - cap:]
    sep = np.abs(x[J][:, None] - x[Q][None, :]).min()
    assert len(J) >= cap and len(Q) >= cap and not set(J) & set(Q)
    assert sep >= rho / math.sqrt(2.0) - 1e-12, (sep, rho / math.sqrt(2.0))
    return J, Q


# ---------------------------------------------------------------------------
# Per-class lower-bound certificates


def lower_bound_certificate(cls_label: str, params: TaxonomyParams,
                            z: complex) -> Optional[float]:
    """Guaranteed lower bound on ||(M - z Id)x||_2 / ||x||_2 for the class.

    Almost-constant sloping: d*sqrt(3n)/(5 b_st), deterministic for every M,
    |z| <= d/6.  Steep classes: sqrt(n2*d)/(25 b_st) on the high-probability
    event, |z| <= d.  Essentially non-constant vectors carry no per-class
    certificate (they are the subject of the distance analysis) -> None.
    """
    az = abs(z)
    if cls_label in STEEP_LABELS:
        if az > params.d:
            raise ShiftRangeError(f"|z|={az} > d={params.d} for steep certificate")
        return math.sqrt(params.n2 * params.d) / (25.0 * params.b_st)
    if cls_label == ALMOST_CONSTANT_SLOPING:
        if az > params.d / 6.0:
            raise ShiftRangeError(f"|z|={az} > d/6 for the sloping certificate")
        return params.d * math.sqrt(3.0 * params.n) / (5.0 * params.b_st)
    if cls_label == ESSENTIALLY_NON_CONSTANT:
        return None
    raise ValueError(f"unknown class label {cls_label!r}")


def certificate_shape(params: TaxonomyParams) -> tuple[str, Optional[float]]:
    """Piecewise shape h(d,n) under-running the steep/sloping certificates, c = 1.

    Regimes keyed by n1: d^(-3/2) when n1 = 1; sqrt(n) d^-3 (log d)^(-1/2)
    when 1 < n1 <= p; d^(5/4) (log d)^2 n^(-3/2 - alpha_d) when n1 > p (None
    if alpha_d is undefined there).
    """
    d, n = params.d, params.n
    if params.n1 == 1:
        return "n1_eq_1", d ** -1.5
    if params.n1 <= params.p:
        return "n1_le_p", math.sqrt(n) * d ** -3 / math.sqrt(math.log(d))
    if params.alpha_d is None:
        return "n1_gt_p", None
    return "n1_gt_p", d ** 1.25 * math.log(d) ** 2 * n ** (-1.5 - params.alpha_d)
