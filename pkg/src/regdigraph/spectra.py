"""Extreme singular values of M - z*Id and the distance-to-span verifier.

Dense bidiagonalization (LAPACK SVD) up to DENSE_LIMIT; above that, the
smallest singular value comes from shift-invert iteration on the Gram
operator (A^H A) backed by a sparse LU of A -- plain inverse power iteration
stalls at the ~n^-6 scales of interest -- and the largest from Gram power
iteration.  Both iterative paths are deterministic (fixed start vectors) and
never return silently on non-convergence.

The singularity decision is dual: the floating threshold s_min < 1e-10 *
s_max, plus exact integer elimination over the rationals at tiny sizes
(events about singularity are exact-arithmetic statements; floating point
alone cannot certify them).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core import RegularMatrix

DENSE_LIMIT = 512
SINGULAR_REL_THRESHOLD = 1e-10
_UNIT_TOL = 1e-12


class IterativeConvergenceError(RuntimeError):
    """Iterative path failed to converge; carries the best report so far."""

    def __init__(self, message, best_report=None):
        super().__init__(message)
        self.best_report = best_report


@dataclass(frozen=True)
class SpectralReport:
    s_min: float
    s_max: float
    v_min: np.ndarray            # unit minimizer of ||A v||
    residual: float              # | ||A v_min|| - s_min |
    method: str                  # "dense" | "iterative"

    def validate(self, residual_tol: float = 1e-8) -> None:
        if abs(np.linalg.norm(self.v_min) - 1.0) > _UNIT_TOL:
            raise ValueError("v_min is not unit")
        if not (0.0 <= self.s_min <= self.s_max):
            raise ValueError(f"singular values out of order: {self.s_min}, {self.s_max}")
        if self.residual > residual_tol * max(1.0, self.s_max):
            raise ValueError(f"residual {self.residual} exceeds tolerance")

    def to_json_dict(self) -> dict:
        return {
            "s_min": self.s_min, "s_max": self.s_max,
            "v_min": [[float(c.real), float(c.imag)] for c in self.v_min],
            "residual": self.residual, "method": self.method,
        }


def shifted_dense(M: RegularMatrix, z: complex) -> np.ndarray:
    return M.to_dense(np.complex128) - z * np.eye(M.n, dtype=np.complex128)


def shifted_sparse(M: RegularMatrix, z: complex):
    data = np.ones(M.n * M.d)
    ri = np.repeat(np.arange(M.n), M.d)
    A = sp.csr_matrix((data, (ri, M.flat_row_columns())), shape=(M.n, M.n),
                      dtype=np.complex128)
    return (A - z * sp.identity(M.n, dtype=np.complex128, format="csr")).tocsc()


def _dense_extremes(A: np.ndarray) -> SpectralReport:
    _, s, vh = np.linalg.svd(A)
    v_min = np.conj(vh[-1])
    s_min, s_max = float(s[-1]), float(s[0])
    residual = abs(float(np.linalg.norm(A @ v_min)) - s_min)
    return SpectralReport(s_min=s_min, s_max=s_max, v_min=v_min,
                          residual=residual, method="dense")


def _start_vector(n: int, variant: int = 0) -> np.ndarray:
    k = np.arange(n)
    v = np.exp(1j * (variant + 1) * 0.7 * k) + 0.5 * np.cos(0.3 * k + variant)
    return v / np.linalg.norm(v)


def _gram_power_smax(A, n: int, rel_tol: float, max_iters: int) -> float:
    v = np.ones(n, dtype=np.complex128) / math.sqrt(n)
    sigma = 0.0
    for _ in range(max_iters):
        w = A @ v
        u = A.conj().T @ w
        nu = np.linalg.norm(u)
        if nu == 0:
            return 0.0
        v = u / nu
        new = float(np.linalg.norm(A @ v))
        if abs(new - sigma) <= rel_tol * max(new, 1e-300):
            return new
        sigma = new
    raise IterativeConvergenceError(f"s_max power iteration: no convergence "
                                    f"in {max_iters} iterations (best {sigma})")


def _iterative_extremes(M: RegularMatrix, z: complex, rel_tol: float = 1e-8,
                        abs_floor: float = 1e-14, max_iters: int = 1000) -> SpectralReport:
    n = M.n
    A = shifted_sparse(M, z)
    try:
        lu = spla.splu(A)
    except RuntimeError:
        # numerically singular factorization; the dense path is the safeguard
        return _dense_extremes(shifted_dense(M, z))
    s_max = _gram_power_smax(A, n, rel_tol, max_iters)
    best_sigma, best_v = math.inf, None
    for variant in range(3):
        v = _start_vector(n, variant)
        sigma = math.inf
        for _ in range(max_iters):
            w = lu.solve(v, trans="H")
            u = lu.solve(w)
            nu = np.linalg.norm(u)
            if not np.isfinite(nu) or nu == 0:
                break
            v = u / nu
            new = float(np.linalg.norm(A @ v))
            if abs(new - sigma) <= rel_tol * new + abs_floor:
                sigma = new
                break
            sigma = new
        if sigma < best_sigma:
            best_sigma, best_v = sigma, v
        # deflation safeguard: accept only if the Gram residual is small
        g = A.conj().T @ (A @ best_v) - best_sigma ** 2 * best_v
        if np.linalg.norm(g) <= max(rel_tol * s_max ** 2, abs_floor):
            residual = abs(float(np.linalg.norm(A @ best_v)) - best_sigma)
            return SpectralReport(s_min=best_sigma, s_max=s_max, v_min=best_v,
                                  residual=residual, method="iterative")
    report = SpectralReport(s_min=best_sigma, s_max=s_max, v_min=best_v,
                            residual=abs(float(np.linalg.norm(A @ best_v)) - best_sigma),
                            method="iterative")
    raise IterativeConvergenceError(
        f"s_min shift-invert: no convergence in {max_iters} iterations "
        f"(best sigma {best_sigma})", best_report=report)


def singular_extremes(M: RegularMatrix, z: complex = 0.0,
                      method: Optional[str] = None) -> SpectralReport:
    """s_min and s_max of M - z*Id with a unit minimizer.

    method None picks dense for n <= DENSE_LIMIT, iterative above; pass
    "dense" or "iterative" to force a path (both are cross-validated on the
    dense range).
    """
    if method is None:
        method = "dense" if M.n <= DENSE_LIMIT else "iterative"
    if method == "dense":
        return _dense_extremes(shifted_dense(M, z))
    if method == "iterative":
        return _iterative_extremes(M, z)
    raise ValueError(f"unknown method {method!r}")


def numerically_singular(report: SpectralReport,
                         rel: float = SINGULAR_REL_THRESHOLD) -> bool:
    return report.s_min < rel * max(report.s_max, 1e-300)


# ---------------------------------------------------------------------------
# Distance to the span of the other rows (rows i, j merged as R_i + R_j)


def distance_to_span(A, i: int, j: int) -> float:
    """Euclidean distance from R_i to span({R_k}_{k != i,j} plus R_i + R_j).

    Least squares on the spanning set; rank deficiency is handled by the
    minimum-norm solution, and the exact residual norm is returned.
    """
    A = np.asarray(A, dtype=np.complex128)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("A must be square")
    if i == j:
        raise ValueError("need i != j")
    others = [k for k in range(n) if k != i and k != j]
    S = np.vstack([A[others], (A[i] + A[j])[None, :]])
    coef, *_ = np.linalg.lstsq(S.T, A[i], rcond=None)
    return float(np.linalg.norm(A[i] - S.T @ coef))


@dataclass(frozen=True)
class DistanceCertificate:
    dist: float
    s_n: float
    inner_r1: float              # |<R_1^dagger, v>|
    inner_r1_plus_r2: float      # |<R_1^dagger + R_2^dagger, v>|
    tail_norm: float             # ||A^{1,2} v||_2
    bound: float                 # general lower bound on dist
    holds: bool
    corollary_applies: bool      # tail <= s_n and inner_r1_plus_r2 <= 2 s_n
    corollary_bound: Optional[float]
    corollary_holds: Optional[bool]

    def to_json_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "dist", "s_n", "inner_r1", "inner_r1_plus_r2", "tail_norm",
            "bound", "holds", "corollary_applies", "corollary_bound",
            "corollary_holds")}


def verify_distance_lower_bound(A, v, tol: float = 1e-9) -> tuple[bool, DistanceCertificate]:
    """Check dist(R_1, span{R_1+R_2, R_3, ...}) >= s_n|<R_1^dag,v>| / (s_n +
    ||A^{1,2}v|| + |<R_1^dag+R_2^dag,v>|) for a unit v, plus the /4 corollary
    whenever its hypotheses hold.

    This is a theorem about every matrix and every unit vector; a False
    return is a bug detector, not an expected outcome.
    """
    A = np.asarray(A, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128).ravel()
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("v must be a unit vector")
    w = A @ v
    inner1 = abs(complex(w[0]))
    inner12 = abs(complex(w[0] + w[1]))
    tail = float(np.linalg.norm(w[2:]))
    s_n = float(np.linalg.svd(A, compute_uv=False)[-1])
    dist = distance_to_span(A, 0, 1)
    denom = s_n + tail + inner12
    bound = 0.0 if denom == 0.0 else s_n * inner1 / denom
    holds = dist >= bound - tol
    applies = tail <= s_n * (1 + 1e-12) + 1e-300 and inner12 <= 2 * s_n * (1 + 1e-12) + 1e-300
    cor_bound = inner1 / 4.0 if applies else None
    cor_holds = (dist >= cor_bound - tol) if applies else None
    cert = DistanceCertificate(
        dist=dist, s_n=s_n, inner_r1=inner1, inner_r1_plus_r2=inner12,
        tail_norm=tail, bound=bound, holds=holds, corollary_applies=applies,
        corollary_bound=cor_bound, corollary_holds=cor_holds)
    return holds and (cor_holds is not False), cert


# ---------------------------------------------------------------------------
# Exact-arithmetic singularity oracles


def det_exact_int(M: RegularMatrix) -> int:
    """Exact determinant of the 0/1 matrix over the integers (Bareiss)."""
    n = M.n
    a = [[Fraction(0)] * n for _ in range(n)]
    for i, sup in enumerate(M.rows):
        for j in sup:
            a[i][j] = Fraction(1)
    sign = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for r in range(k + 1, n):
            factor = a[r][k] / a[k][k]
            if factor:
                row_r, row_k = a[r], a[k]
                for c in range(k, n):
                    row_r[c] -= factor * row_k[c]
    det = Fraction(sign)
    for k in range(n):
        det *= a[k][k]
    assert det.denominator == 1
    return int(det)


def is_singular_exact(M: RegularMatrix) -> bool:
    """Exact singularity of M (shift z = 0) via rational elimination."""
    return det_exact_int(M) == 0


def smin_below_threshold_highprec(M: RegularMatrix, z: complex, threshold: float,
                                  dps: int = 50, size_cap: int = 256) -> tuple[bool, float]:
    """Arbitrary-precision re-check of s_min(M - z Id) < threshold (mpmath SVD).

    Used to confirm or dismiss red events flagged by floating point; costly,
    so capped at ``size_cap``.
    """
    import mpmath

    if M.n > size_cap:
        raise ValueError(f"high-precision recheck capped at n <= {size_cap}")
    with mpmath.workdps(dps):
        A = mpmath.zeros(M.n, M.n)
        for i, sup in enumerate(M.rows):
            for j in sup:
                A[i, j] = mpmath.mpf(1)
        zz = mpmath.mpc(z.real, z.imag) if isinstance(z, complex) else mpmath.mpmathify(z)
        for i in range(M.n):
            A[i, i] -= zz
        svals = mpmath.svd_c(A, compute_uv=False)
        smin = min(float(s) for s in svals)
    return smin < threshold, smin
