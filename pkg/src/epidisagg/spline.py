"""Not-a-knot cubic spline interpolation.

The spline is parametrised by its first derivatives (slopes) at the knots,
which satisfy a tridiagonal system: C2 continuity at interior knots plus
third-derivative continuity across the first and last interior knots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError


@dataclass(frozen=True)
class SplineFit:
    """Piecewise cubic ``s_i(t) = a_i t³ + b_i t² + c_i t + d_i`` with ``t = x - knots[i]``.

    ``coeffs`` has shape ``(4, len(knots) - 1)``, rows ``a, b, c, d``.
    Evaluation outside ``[knots[0], knots[-1]]`` extends the end pieces.
    """

    knots: np.ndarray
    values: np.ndarray
    coeffs: np.ndarray

    def __call__(self, x, nu: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0, len(self.knots) - 2)
        t = x - self.knots[i]
        a, b, c, d = self.coeffs[:, i]
        if nu == 0:
            return ((a * t + b) * t + c) * t + d
        if nu == 1:
            return (3 * a * t + 2 * b) * t + c
        if nu == 2:
            return 6 * a * t + 2 * b
        raise DomainError(f"derivative order must be 0, 1 or 2, got {nu}")

    def continuity_residuals(self) -> np.ndarray:
        """Relative mismatch of value, slope and curvature at interior knots.

        Row ``k`` holds the residuals of the k-th derivative, comparing the
        left piece evaluated at its right end with the right piece at t = 0.
        """
        h = np.diff(self.knots)[:-1]
        a, b, c, d = self.coeffs[:, :-1]
        left = np.stack(
            [
                ((a * h + b) * h + c) * h + d,
                (3 * a * h + 2 * b) * h + c,
                6 * a * h + 2 * b,
            ]
        )
        right = np.stack([self.coeffs[3, 1:], self.coeffs[2, 1:], 2 * self.coeffs[1, 1:]])
        scale = np.maximum(1.0, np.maximum(np.abs(left), np.abs(right)))
        return np.abs(left - right) / scale


def fit_not_a_knot(knots, values) -> SplineFit:
    """Interpolating cubic spline with not-a-knot end conditions.

    With three knots the not-a-knot conditions collapse to the parabola
    through the three points; with two knots the result is linear.
    """
    x = np.asarray(knots, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DomainError("knots and values must be 1-D arrays of equal length")
    n = x.size
    if n < 2:
        raise DomainError("need at least two knots")
    h = np.diff(x)
    if np.any(h <= 0) or not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise DomainError("knots must be finite and strictly increasing, values finite")
    delta = np.diff(y) / h

    if n == 2:
        s = np.array([delta[0], delta[0]])
    elif n == 3:
        # exact parabola: slope at each knot from the three-point derivative
        curv = (delta[1] - delta[0]) / (x[2] - x[0])
        s = np.array(
            [
                delta[0] - curv * h[0],
                delta[0] + curv * h[0],
                delta[1] + curv * h[1],
            ]
        )
    else:
        s = _solve_slopes(h, delta)

    a = (s[:-1] + s[1:] - 2 * delta) / h**2
    b = (3 * delta - 2 * s[:-1] - s[1:]) / h
    coeffs = np.stack([a, b, s[:-1], y[:-1]])
    return SplineFit(knots=x, values=y, coeffs=coeffs)


def _solve_slopes(h: np.ndarray, delta: np.ndarray) -> np.ndarray:
    n = h.size + 1
    ab = np.zeros((3, n))  # upper, main, lower diagonals in solve_banded layout
    rhs = np.empty(n)

    # interior: h_i s_{i-1} + 2(h_{i-1}+h_i) s_i + h_{i-1} s_{i+1} = 3(h_i δ_{i-1} + h_{i-1} δ_i)
    ab[1, 1:-1] = 2 * (h[:-1] + h[1:])
    ab[0, 2:] = h[:-1]
    ab[2, :-2] = h[1:]
    rhs[1:-1] = 3 * (h[1:] * delta[:-1] + h[:-1] * delta[1:])

    # not-a-knot at the left end: third derivative continuous at knots[1]
    w = h[0] + h[1]
    ab[1, 0] = h[1]
    ab[0, 1] = w
    rhs[0] = ((h[0] + 2 * w) * h[1] * delta[0] + h[0] ** 2 * delta[1]) / w

    # and at the right end, across knots[-2]
    w = h[-1] + h[-2]
    ab[1, -1] = h[-2]
    ab[2, -2] = w
    rhs[-1] = (h[-1] ** 2 * delta[-2] + (2 * w + h[-1]) * h[-2] * delta[-1]) / w

    return solve_banded((1, 1), ab, rhs, overwrite_ab=True, overwrite_b=True, check_finite=False)
