"""Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson tangents).

Used for the force-to-speed curves: the knots are few (typically three) and
the interpolant must stay strictly monotone between them with no overshoot.
Tangents are initialized to secant averages and then pulled back into the
Fritsch-Carlson monotonicity region (alpha^2 + beta^2 <= 9).
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np


def fritsch_carlson_tangents(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Return knot tangents that keep the cubic Hermite interpolant monotone."""
    h = np.diff(x)
    d = np.diff(y) / h

    m = np.empty_like(y)
    m[0] = d[0]
    m[-1] = d[-1]
    if len(y) > 2:
        m[1:-1] = (d[:-1] + d[1:]) / 2.0
        # Flat or direction-changing secants force a zero tangent.
        interior_break = (d[:-1] * d[1:]) <= 0.0
        m[1:-1][interior_break] = 0.0

    for k in range(len(d)):
        if d[k] == 0.0:
            m[k] = 0.0
            m[k + 1] = 0.0
            continue
        a = m[k] / d[k]
        b = m[k + 1] / d[k]
        if a < 0.0:
            m[k] = 0.0
            a = 0.0
        if b < 0.0:
            m[k + 1] = 0.0
            b = 0.0
        r = a * a + b * b
        if r > 9.0:
            tau = 3.0 / np.sqrt(r)
            m[k] = tau * a * d[k]
            m[k + 1] = tau * b * d[k]
    return m


class MonotoneCubic:
    """Cubic Hermite interpolant through (x, y) knots, monotone on each span.

    Queries outside the knot range are clamped to the boundary values, which
    is the behavior every force curve in this package relies on.
    """

    def __init__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.size < 2 or x.shape != y.shape:
            raise ValueError("need matching 1-D knot arrays with at least two points")
        if np.any(np.diff(x) <= 0.0):
            raise ValueError("knot abscissae must be strictly increasing")
        self.x = x
        self.y = y
        self.tangents = fritsch_carlson_tangents(x, y)
        # Plain-float copies for the scalar fast path (per-tick engine calls).
        self._xs = x.tolist()
        self._ys = y.tolist()
        self._ms = self.tangents.tolist()

    def _locate(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        q = np.clip(q, self.x[0], self.x[-1])
        idx = np.searchsorted(self.x, q, side="right") - 1
        idx = np.clip(idx, 0, len(self.x) - 2)
        return q, idx

    def _scalar(self, q: float) -> float:
        xs = self._xs
        if q <= xs[0]:
            return self._ys[0]
        if q >= xs[-1]:
            return self._ys[-1]
        i = bisect_right(xs, q) - 1
        h = xs[i + 1] - xs[i]
        t = (q - xs[i]) / h
        t2 = t * t
        t3 = t2 * t
        return (
            (2.0 * t3 - 3.0 * t2 + 1.0) * self._ys[i]
            + (t3 - 2.0 * t2 + t) * h * self._ms[i]
            + (-2.0 * t3 + 3.0 * t2) * self._ys[i + 1]
            + (t3 - t2) * h * self._ms[i + 1]
        )

    def __call__(self, q):
        if isinstance(q, (int, float)):
            return self._scalar(float(q))
        scalar = np.isscalar(q)
        q, i = self._locate(np.asarray(q, dtype=float))
        h = self.x[i + 1] - self.x[i]
        t = (q - self.x[i]) / h
        t2 = t * t
        t3 = t2 * t
        h00 = 2.0 * t3 - 3.0 * t2 + 1.0
        h10 = t3 - 2.0 * t2 + t
        h01 = -2.0 * t3 + 3.0 * t2
        h11 = t3 - t2
        out = (
            h00 * self.y[i]
            + h10 * h * self.tangents[i]
            + h01 * self.y[i + 1]
            + h11 * h * self.tangents[i + 1]
        )
        return float(out) if scalar else out

    def derivative(self, q):
        scalar = np.isscalar(q)
        q, i = self._locate(np.asarray(q, dtype=float))
        h = self.x[i + 1] - self.x[i]
        t = (q - self.x[i]) / h
        t2 = t * t
        dh00 = (6.0 * t2 - 6.0 * t) / h
        dh10 = 3.0 * t2 - 4.0 * t + 1.0
        dh01 = (-6.0 * t2 + 6.0 * t) / h
        dh11 = 3.0 * t2 - 2.0 * t
        out = (
            dh00 * self.y[i]
            + dh10 * self.tangents[i]
            + dh01 * self.y[i + 1]
            + dh11 * self.tangents[i + 1]
        )
        return float(out) if scalar else out
