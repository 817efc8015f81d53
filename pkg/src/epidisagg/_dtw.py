"""Compiled dynamic-time-warping kernel.

Exact DTW with the L1 local cost and steps (1,0), (0,1), (1,1). The table is
swept by anti-diagonals ``d = i + j``: every cell on diagonal ``d`` depends
only on diagonals ``d-1`` and ``d-2``, so each diagonal is one independent,
SIMD-friendly pass over contiguous buffers. Buffers are indexed by ``i + 1``
with slot 0 permanently ``inf`` as the out-of-table sentinel.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _diag_step(out, up, left, diag, xs, ys):
    # zero-based loop over contiguous views so numba vectorises it
    for t in range(out.shape[0]):
        best = up[t]
        if left[t] < best:
            best = left[t]
        if diag[t] < best:
            best = diag[t]
        out[t] = best + abs(xs[t] - ys[t])


@njit(cache=True)
def dtw_cost(x, y):
    """Minimal cumulative L1 cost of a warping path from (0, 0) to (n-1, m-1)."""
    n = x.shape[0]
    m = y.shape[0]
    inf = np.inf
    d2 = np.full(n + 1, inf)
    d1 = np.full(n + 1, inf)
    cur = np.full(n + 1, inf)
    # y[d - i] is read as yr[m - 1 - d + i], contiguous in i
    yr = y[::-1].copy()
    d1[1] = abs(x[0] - y[0])
    for d in range(1, n + m - 1):
        lo = max(0, d - m + 1)
        hi = min(n - 1, d)
        cnt = hi - lo + 1
        off = m - 1 - d + lo
        # cell (i, d-i): from (i-1, j) at d1[i], from (i, j-1) at d1[i+1], from (i-1, j-1) at d2[i]
        _diag_step(
            cur[lo + 1 : lo + 1 + cnt],
            d1[lo : lo + cnt],
            d1[lo + 1 : lo + 1 + cnt],
            d2[lo : lo + cnt],
            x[lo : lo + cnt],
            yr[off : off + cnt],
        )
        # stale slots adjacent to the live range must read as outside the table
        if lo > 0:
            cur[lo] = inf
        if hi + 2 <= n:
            cur[hi + 2] = inf
        d2, d1, cur = d1, cur, d2
    return d1[n]
