"""Compiled Gaussian kernel sums on a uniform grid.

On a uniform grid consecutive kernel values obey
``e[k+1] = e[k] * r[k]`` with ``r[k+1] = r[k] * exp(-2 h^2)``, where ``h`` is
the grid step in units of ``sqrt(2) * bandwidth``. The grid is processed in
blocks of ``_BLOCK`` points. A sample left of a block is anchored with one
exact ``exp`` at the block's first point and walked rightwards; a sample
right of it is anchored at the last point and walked leftwards. A sample
inside a block is anchored on the grid points either side of it and walked
outwards in both directions. Every walk moves away from its sample, so
kernels only shrink and never overflow; re-anchoring each block keeps the
result within ~1e-11 relative of direct evaluation.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_BLOCK = 128
# exp(-u*u) is exactly zero in double precision beyond this |u|
_UNDERFLOW_U = 27.35


@njit(cache=True, fastmath={"reassoc"})
def _walk(e, r, c, count):
    # sums[t] = sum_s e_s r_s (r_s c) ... (r_s c^(t-1)); e and r are updated in place.
    # Contiguous views with zero-based indices keep this loop SIMD-vectorised.
    sums = np.empty(count)
    n = e.shape[0]
    for t in range(count):
        acc = 0.0
        for s in range(n):
            acc += e[s]
            e[s] *= r[s]
            r[s] *= c
        sums[t] = acc
    return sums


@njit(cache=True)
def gaussian_sums(values, weights, g0, step, n, bandwidth):
    """``out[k] = sum_s weights[s] * exp(-0.5 ((g0 + k step - values[s]) / bandwidth)^2)``.

    ``values`` must be sorted ascending.
    """
    out = np.zeros(n)
    inv = math.sqrt(0.5) / bandwidth
    h = step * inv
    c = math.exp(-2.0 * h * h)
    reach = _UNDERFLOW_U / inv
    S = values.shape[0]
    e = np.empty(S)
    r = np.empty(S)
    for b0 in range(0, n, _BLOCK):
        b1 = min(b0 + _BLOCK, n)
        count = b1 - b0
        gl = g0 + b0 * step
        gr = g0 + (b1 - 1) * step
        i_far = np.searchsorted(values, gl - reach, side="left")
        i_left = np.searchsorted(values, gl, side="right")
        i_right = np.searchsorted(values, gr, side="left")
        i_end = np.searchsorted(values, gr + reach, side="right")

        if i_left > i_far:
            for s in range(i_far, i_left):
                u = (gl - values[s]) * inv
                e[s] = weights[s] * math.exp(-u * u)
                r[s] = math.exp(-(2.0 * u * h + h * h))
            sums = _walk(e[i_far:i_left], r[i_far:i_left], c, count)
            for t in range(count):
                out[b0 + t] += sums[t]

        lo_right = max(i_right, i_left)
        if i_end > lo_right:
            for s in range(lo_right, i_end):
                u = (gr - values[s]) * inv
                e[s] = weights[s] * math.exp(-u * u)
                r[s] = math.exp(2.0 * u * h - h * h)
            sums = _walk(e[lo_right:i_end], r[lo_right:i_end], c, count)
            for t in range(count):
                out[b1 - 1 - t] += sums[t]

        # inside the block: anchor on both neighbours of the sample, walk outwards
        for s in range(i_left, lo_right):
            v = values[s]
            w = weights[s]
            k0 = min(max(int(math.ceil((v - g0) / step)), b0), b1 - 1)
            u = (g0 + k0 * step - v) * inv
            if u < 0.0:
                k0 += 1
                u += h
            if k0 < b1:
                ek = w * math.exp(-u * u)
                rk = math.exp(-(2.0 * u * h + h * h))
                for k in range(k0, b1):
                    out[k] += ek
                    ek *= rk
                    rk *= c
            if k0 > b0:
                u -= h
                ek = w * math.exp(-u * u)
                rk = math.exp(2.0 * u * h - h * h)
                for k in range(k0 - 1, b0 - 1, -1):
                    out[k] += ek
                    ek *= rk
                    rk *= c
    return out
