"""Approximately uniform sampling from M_{n,d} via a switch Markov chain.

The transition draws an ordered row pair i1 != i2 and an ordered column pair
j1 != j2 uniformly; when the 2x2 submatrix has the pattern (1,0 / 0,1) it is
swapped to (0,1 / 1,0), which preserves all line sums.  Invalid proposals are
holding moves, so the kernel is symmetric and the uniform law is stationary
(the chain is lazy rather than rejection-resampled).

Proposal stream layout (part of the determinism contract): proposals are
drawn in blocks of BLOCK steps as four consecutive array draws from the
chain's own PCG64 generator -- i1 in [0,n), i2 offset in [0,n-1), j1 in
[0,n), j2 offset in [0,n-1) -- with i2 = (i1+1+off) % n and likewise for j2.
A chain's trajectory therefore depends only on (n, d, seed), never on how
many steps are taken per call.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .core import RegularMatrix, _derive_cols, enumerate_all

BLOCK = 1024  # steps per proposal block; fixed, part of the stream definition


def derive_seed(master_seed: int, index: int) -> int:
    """Per-trial seed for parallel campaigns: stable SHA-256 of (master, index)."""
    h = hashlib.sha256(f"regdigraph:{master_seed}:{index}".encode()).digest()
    return int.from_bytes(h[:8], "little")


def initial_matrix(n: int, d: int) -> RegularMatrix:
    """Circulant start state: row i supported on {i, i+1, ..., i+d-1} mod n."""
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got n={n}, d={d}")
    rows = tuple(tuple(sorted((i + k) % n for k in range(d))) for i in range(n))
    return RegularMatrix(n=n, d=d, rows=rows, cols=_derive_cols(n, d, rows))


def apply_switch(M: RegularMatrix, i1: int, i2: int, j1: int, j2: int):
    """Apply one switch proposal to M.  Returns (matrix, applied).

    The move fires iff entries (i1,j1) and (i2,j2) are 1 while (i1,j2) and
    (i2,j1) are 0; otherwise the matrix is returned unchanged.  Applying the
    same valid proposal twice returns the original matrix.
    """
    if i1 == i2 or j1 == j2:
        return M, False
    r1, r2 = set(M.rows[i1]), set(M.rows[i2])
    if j1 in r1 and j2 in r2 and j2 not in r1 and j1 not in r2:
        rows = list(M.rows)
        rows[i1] = tuple(sorted((r1 - {j1}) | {j2}))
        rows[i2] = tuple(sorted((r2 - {j2}) | {j1}))
        rows_t = tuple(rows)
        return RegularMatrix(n=M.n, d=M.d, rows=rows_t,
                             cols=_derive_cols(M.n, M.d, rows_t)), True
    return M, False


def _masks_to_rows(n: int, masks) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(j for j in range(n) if (m >> j) & 1) for m in masks)


@dataclass
class ChainState:
    """One switch chain: current matrix (as row bitmasks), its RNG, a step counter."""

    n: int
    d: int
    rng_seed: int
    row_masks: list[int]
    rng: np.random.Generator
    steps_taken: int = 0
    _buf: list = field(default_factory=list, repr=False)
    _pos: int = BLOCK

    @classmethod
    def start(cls, n: int, d: int, seed: int) -> "ChainState":
        M = initial_matrix(n, d)
        return cls(n=n, d=d, rng_seed=seed, row_masks=M.row_masks(),
                   rng=np.random.Generator(np.random.PCG64(seed)))

    @property
    def matrix(self) -> RegularMatrix:
        rows = _masks_to_rows(self.n, self.row_masks)
        return RegularMatrix(n=self.n, d=self.d, rows=rows,
                             cols=_derive_cols(self.n, self.d, rows))

    def _refill(self):
        n, g = self.n, self.rng
        i1 = g.integers(0, n, BLOCK)
        i2 = (i1 + 1 + g.integers(0, n - 1, BLOCK)) % n
        j1 = g.integers(0, n, BLOCK)
        j2 = (j1 + 1 + g.integers(0, n - 1, BLOCK)) % n
        self._buf = [i1.tolist(), i2.tolist(), j1.tolist(), j2.tolist()]
        self._pos = 0


def draw_proposal_blocks(seed: int, n: int, blocks: int) -> np.ndarray:
    """The first ``blocks`` proposal blocks of a chain's stream, shape (4, blocks*BLOCK).

    Rows are (i1, i2, j1, j2).  This is the same stream ChainState consumes;
    exposed so batched kernels can replay per-chain trajectories exactly.
    """
    g = np.random.Generator(np.random.PCG64(seed))
    out = np.empty((4, blocks * BLOCK), dtype=np.int64)
    for b in range(blocks):
        sl = slice(b * BLOCK, (b + 1) * BLOCK)
        i1 = g.integers(0, n, BLOCK)
        out[0, sl] = i1
        out[1, sl] = (i1 + 1 + g.integers(0, n - 1, BLOCK)) % n
        j1 = g.integers(0, n, BLOCK)
        out[2, sl] = j1
        out[3, sl] = (j1 + 1 + g.integers(0, n - 1, BLOCK)) % n
    return out


def _advance(state: ChainState, steps: int) -> None:
    masks = state.row_masks
    pos = state._pos
    buf = state._buf
    for _ in range(steps):
        if pos == BLOCK:
            state._refill()
            buf = state._buf
            pos = 0
        i1 = buf[0][pos]
        i2 = buf[1][pos]
        j1 = buf[2][pos]
        j2 = buf[3][pos]
        pos += 1
        r1 = masks[i1]
        r2 = masks[i2]
        m1 = 1 << j1
        m2 = 1 << j2
        if (r1 & m1) and (r2 & m2) and not (r1 & m2) and not (r2 & m1):
            flip = m1 | m2
            masks[i1] = r1 ^ flip
            masks[i2] = r2 ^ flip
    state._pos = pos
    state.steps_taken += steps


def switch_step(state: ChainState) -> ChainState:
    """One switch attempt (valid swap or holding move); steps_taken increments."""
    _advance(state, 1)
    return state


def sample(n: int, d: int, burn_in: int, seed: int) -> RegularMatrix:
    """Run the switch chain for burn_in steps from the circulant start.

    Deterministic in (n, d, burn_in, seed).
    """
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    state = ChainState.start(n, d, seed)
    _advance(state, burn_in)
    return state.matrix


def default_burn_in(n: int, d: int) -> int:
    """Burn-in heuristic: 20*n*d switch attempts (no mixing bound is claimed)."""
    return 20 * n * d


# ---------------------------------------------------------------------------
# Uniformity diagnostics against the exact enumeration oracle


def _encode_rows(rows, n: int) -> int:
    """Pack a matrix into an integer with bit i*n+j set iff entry (i,j)=1."""
    m = 0
    for i, sup in enumerate(rows):
        for j in sup:
            m |= 1 << (i * n + j)
    return m


def _batch_final_states(n: int, d: int, burn_in: int, seeds,
                        group: int = 8192) -> np.ndarray:
    """Final bitmask states of many independent chains, one per seed.

    Vectorizes the step loop across chains while preserving each chain's own
    proposal stream, so chain k finishes in exactly the state
    sample(n, d, burn_in, seeds[k]) would produce.  Requires n*n <= 63.
    """
    if n * n > 63:
        raise ValueError("batched kernel supports n <= 7")
    blocks = max(1, -(-burn_in // BLOCK))
    init = np.uint64(_encode_rows(initial_matrix(n, d).rows, n))
    seeds = list(seeds)
    out = np.empty(len(seeds), dtype=np.uint64)
    one = np.uint64(1)
    for g0 in range(0, len(seeds), group):
        chunk = seeds[g0:g0 + group]
        B = len(chunk)
        props = np.empty((B, 4, blocks * BLOCK), dtype=np.uint16)
        for k, s in enumerate(chunk):
            props[k] = draw_proposal_blocks(s, n, blocks)
        state = np.full(B, init, dtype=np.uint64)
        for t in range(burn_in):
            i1 = props[:, 0, t].astype(np.uint64)
            i2 = props[:, 1, t].astype(np.uint64)
            j1 = props[:, 2, t].astype(np.uint64)
            j2 = props[:, 3, t].astype(np.uint64)
            nn = np.uint64(n)
            p11 = i1 * nn + j1
            p12 = i1 * nn + j2
            p21 = i2 * nn + j1
            p22 = i2 * nn + j2
            b11 = (state >> p11) & one
            b22 = (state >> p22) & one
            b12 = (state >> p12) & one
            b21 = (state >> p21) & one
            valid = (b11 & b22 & (one - b12) & (one - b21)).astype(bool)
            flip = (one << p11) | (one << p12) | (one << p21) | (one << p22)
            state = np.where(valid, state ^ flip, state)
        out[g0:g0 + B] = state
    return out


def uniformity_chi_square(n: int, d: int, samples: int, burn_in: int,
                          seed: int) -> tuple[float, int]:
    """Chi-square statistic of sampled class counts against the uniform law.

    Classes are the exact enumeration of M_{n,d}; sample k uses the derived
    seed derive_seed(seed, k).  Returns (statistic, dof) with dof = |M_{n,d}|-1.
    """
    universe = enumerate_all(n, d)
    index = {_encode_rows(M.rows, n): k for k, M in enumerate(universe)}
    K = len(universe)
    seeds = [derive_seed(seed, k) for k in range(samples)]
    finals = _batch_final_states(n, d, burn_in, seeds)
    counts = np.zeros(K, dtype=np.int64)
    for s in finals:
        counts[index[int(s)]] += 1
    if K == 1:
        return 0.0, 0
    expected = samples / K
    stat = float(((counts - expected) ** 2 / expected).sum())
    return stat, K - 1


def chi_square_quantile(q: float, dof: int) -> float:
    if dof == 0:
        return 0.0
    return float(stats.chi2.ppf(q, dof))
