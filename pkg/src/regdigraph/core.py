"""d-regular 0/1 matrices: construction, validation, exact enumeration, shifted maps.

A d-regular matrix is an n x n 0/1 matrix whose every row and every column
sums to d (the adjacency matrix of a d-regular digraph, loops allowed).
Storage is the list of row supports (sorted column indices); column supports
are derived once at construction.  Matrices are immutable and hashable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

# Hard cap for exact enumeration; |M_{n,d}| grows super-exponentially and the
# oracle exists only to supply ground truth at desk scale.
ENUMERATION_CAP = 7


class RegularityError(ValueError):
    """Raised when row/column supports do not describe a d-regular matrix."""


@dataclass(frozen=True)
class RegularMatrix:
    """n x n 0/1 matrix with all row and column sums equal to d.

    ``rows[i]`` is the strictly increasing tuple of column indices j with
    entry (i, j) = 1.  ``cols`` is derived.  Instances are immutable; use
    :func:`from_row_supports` to construct with full validation.
    """

    n: int
    d: int
    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...] = field(repr=False)

    def entry(self, i: int, j: int) -> int:
        return 1 if j in self.rows[i] else 0

    def row_masks(self) -> list[int]:
        """Row supports as integer bitmasks (bit j set iff entry (i,j)=1)."""
        out = []
        for sup in self.rows:
            m = 0
            for j in sup:
                m |= 1 << j
            out.append(m)
        return out

    def col_masks(self) -> list[int]:
        out = []
        for sup in self.cols:
            m = 0
            for i in sup:
                m |= 1 << i
            out.append(m)
        return out

    def to_dense(self, dtype=np.float64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for i, sup in enumerate(self.rows):
            a[i, list(sup)] = 1
        return a

    def flat_row_columns(self) -> np.ndarray:
        """Concatenated row supports, shape (n*d,); row i occupies slice [i*d, (i+1)*d)."""
        return np.fromiter((j for sup in self.rows for j in sup), dtype=np.int64,
                           count=self.n * self.d)

    def flat_col_rows(self) -> np.ndarray:
        return np.fromiter((i for sup in self.cols for i in sup), dtype=np.int64,
                           count=self.n * self.d)

    def canonical_key(self) -> tuple[tuple[int, ...], ...]:
        """Key for the canonical (lexicographic on concatenated row supports) order."""
        return self.rows

    def transpose(self) -> "RegularMatrix":
        return RegularMatrix(n=self.n, d=self.d, rows=self.cols, cols=self.rows)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "d": self.d, "rows": [list(r) for r in self.rows]}

    def __hash__(self):
        return hash((self.n, self.d, self.rows))


def _derive_cols(n: int, d: int, rows) -> tuple[tuple[int, ...], ...]:
    cols: list[list[int]] = [[] for _ in range(n)]
    for i, sup in enumerate(rows):
        for j in sup:
            cols[j].append(i)
    return tuple(tuple(c) for c in cols)


def from_row_supports(n: int, d: int, rows) -> RegularMatrix:
    """Build a RegularMatrix from row supports, validating every invariant.

    Raises RegularityError naming the first violating row or column.
    """
    if n < 1 or d < 1 or d > n:
        raise RegularityError(f"need 1 <= d <= n, got n={n}, d={d}")
    if len(rows) != n:
        raise RegularityError(f"expected {n} rows, got {len(rows)}")
    norm_rows = []
    for i, sup in enumerate(rows):
        sup = tuple(int(j) for j in sup)
        if len(sup) != d:
            raise RegularityError(f"row {i} has sum {len(sup)}, expected {d}")
        if any(j < 0 or j >= n for j in sup):
            raise RegularityError(f"row {i} has an index out of range [0, {n})")
        if any(sup[k] >= sup[k + 1] for k in range(d - 1)):
            if len(set(sup)) != d:
                raise RegularityError(f"row {i} has a repeated index")
            raise RegularityError(f"row {i} is not strictly increasing")
        norm_rows.append(sup)
    counts = [0] * n
    for sup in norm_rows:
        for j in sup:
            counts[j] += 1
    for j, c in enumerate(counts):
        if c != d:
            raise RegularityError(f"column {j} has sum {c}, expected {d}")
    rows_t = tuple(norm_rows)
    return RegularMatrix(n=n, d=d, rows=rows_t, cols=_derive_cols(n, d, rows_t))


def to_json(M: RegularMatrix) -> str:
    return json.dumps(M.to_json_dict(), sort_keys=True)


def from_json_dict(obj: dict) -> RegularMatrix:
    """Parse the on-disk matrix format, re-validating all invariants."""
    try:
        n, d, rows = int(obj["n"]), int(obj["d"]), obj["rows"]
    except (KeyError, TypeError) as e:
        raise RegularityError(f"malformed matrix object: {e}") from e
    return from_row_supports(n, d, rows)


def from_json(text: str) -> RegularMatrix:
    return from_json_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Shifted linear maps


def apply_shifted(M: RegularMatrix, z: complex, x) -> np.ndarray:
    """y = (M - z*Id) x,  y_i = sum_{j in supp R_i} x_j - z*x_i."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (M.n,):
        raise ValueError(f"vector has shape {x.shape}, expected ({M.n},)")
    y = x[M.flat_row_columns()].reshape(M.n, M.d).sum(axis=1)
    return y - z * x


def apply_adjoint_shifted(M: RegularMatrix, z: complex, x) -> np.ndarray:
    """The row vector x^dagger (M - z*Id), returned as a length-n array.

    Entry j is sum_{i in supp X_j} conj(x_i) - z*conj(x_j); the shift z is not
    conjugated because it multiplies the matrix, not the test vector.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (M.n,):
        raise ValueError(f"vector has shape {x.shape}, expected ({M.n},)")
    xc = np.conj(x)
    y = xc[M.flat_col_rows()].reshape(M.n, M.d).sum(axis=1)
    return y - z * xc


# ---------------------------------------------------------------------------
# Exact enumeration (ground-truth oracle, tiny n only)


def _enumerate_backtracking(n: int, d: int) -> list[RegularMatrix]:
    """Row-by-row backtracking over d-subsets in lexicographic order."""
    results: list[tuple[tuple[int, ...], ...]] = []
    col_count = [0] * n
    chosen: list[tuple[int, ...]] = []

    def rec(i: int):
        if i == n:
            results.append(tuple(chosen))
            return
        remaining = n - i  # rows still to fill, including this one
        # Columns that must appear in every remaining row.
        forced = [j for j in range(n) if d - col_count[j] == remaining]
        if len(forced) > d:
            return
        open_cols = [j for j in range(n) if 0 < d - col_count[j] < remaining]
        need = d - len(forced)
        if need < 0 or need > len(open_cols):
            return
        for extra in combinations(open_cols, need):
            sup = tuple(sorted(forced + list(extra)))
            for j in sup:
                col_count[j] += 1
            chosen.append(sup)
            rec(i + 1)
            chosen.pop()
            for j in sup:
                col_count[j] -= 1

    rec(0)
    results.sort()
    return [RegularMatrix(n=n, d=d, rows=r, cols=_derive_cols(n, d, r)) for r in results]


def _enumerate_matchings(n: int, d: int) -> list[RegularMatrix]:
    """Enumerate via unions of d pairwise-disjoint permutation matrices.

    Every d-regular bipartite graph decomposes into d perfect matchings
    (Konig), so taking unions of d pairwise support-disjoint permutations and
    deduplicating yields exactly M_{n,d}.  Independent of the backtracking
    enumerator by construction.
    """
    perms = sorted(permutations(range(n)))
    seen: set[tuple[tuple[int, ...], ...]] = set()

    def rec(start: int, stack: list[tuple[int, ...]]):
        if len(stack) == d:
            rows = tuple(tuple(sorted(p[i] for p in stack)) for i in range(n))
            seen.add(rows)
            return
        for k in range(start, len(perms)):
            q = perms[k]
            if all(all(p[i] != q[i] for i in range(n)) for p in stack):
                stack.append(q)
                rec(k + 1, stack)
                stack.pop()

    rec(0, [])
    rows_sorted = sorted(seen)
    return [RegularMatrix(n=n, d=d, rows=r, cols=_derive_cols(n, d, r)) for r in rows_sorted]


def enumerate_all(n: int, d: int, method: str = "backtracking") -> list[RegularMatrix]:
    """Complete, duplicate-free list of M_{n,d} in canonical order.

    Two independent strategies are exposed so they can cross-check each
    other: ``backtracking`` (row-by-row) and ``matchings`` (perfect-matching
    decomposition).  Hard cap n <= ENUMERATION_CAP.
    """
    if n > ENUMERATION_CAP:
        raise ValueError(f"enumeration capped at n <= {ENUMERATION_CAP}, got n={n}")
    if n < 1 or d < 1 or d > n:
        raise ValueError(f"need 1 <= d <= n, got n={n}, d={d}")
    if method == "backtracking":
        return _enumerate_backtracking(n, d)
    if method == "matchings":
        return _enumerate_matchings(n, d)
    raise ValueError(f"unknown enumeration method {method!r}")
