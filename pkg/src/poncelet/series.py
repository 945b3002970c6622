"""Truncated Taylor series at x = 0 used by the Cayley-type conditions.

B is the series of sqrt((a - x)(b - x)(lam0 - x)), C = B / (lam0 - x) and
D = B / (b - x).  The coefficient arrays may carry trailing axes so that a
whole grid of lam0 values is expanded in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NonPositiveParam(ValueError):
    pass


class ZeroRoot(ValueError):
    pass


@dataclass(frozen=True)
class PowerSeries:
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return self.coeffs.shape[0]

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        out = np.zeros((n + 1,) + np.broadcast_shapes(self.coeffs.shape[1:], other.coeffs.shape[1:]))
        for k in range(n + 1):
            for j in range(k + 1):
                out[k] += self.coeffs[j] * other.coeffs[k - j]
        return PowerSeries(out)

    def __call__(self, x):
        """Evaluate the truncated series (Horner)."""
        acc = np.zeros(np.broadcast_shapes(np.shape(x), self.coeffs.shape[1:]))
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc


def cubic_coefficients(a, b, lambda0):
    """Coefficients f0..f3 of f(x) = (a - x)(b - x)(lam0 - x)."""
    lam = np.asarray(lambda0, dtype=float)
    f0 = a * b * lam
    f1 = -(a * b + a * lam + b * lam)
    f2 = a + b + lam
    f3 = -np.ones_like(lam)
    return f0, f1, f2, f3


def sqrt_cubic_series(a, b, lambda0, N: int) -> PowerSeries:
    """Coefficients B_0..B_N of the principal square root of (a - x)(b - x)(lam0 - x).

    Uses 2 B_0 B_k = f_k - sum_{j=1}^{k-1} B_j B_{k-j}.  ``lambda0`` may be an
    array, in which case coefficient k has the shape of ``lambda0``.
    """
    lam = np.asarray(lambda0, dtype=float)
    if a <= 0 or b <= 0 or np.any(lam <= 0):
        raise NonPositiveParam("a, b and lambda0 must be positive")
    if N < 0:
        raise ValueError("N must be nonnegative")
    return sqrt_series(cubic_coefficients(a, b, lam), N)


def sqrt_series(poly, N: int) -> PowerSeries:
    """Taylor coefficients to order N of the square root of a polynomial.

    ``poly`` lists the polynomial coefficients (lowest degree first); the
    constant term must be positive and selects the principal branch.
    """
    f = [np.asarray(c, dtype=float) for c in poly]
    shape = np.broadcast_shapes(*(c.shape for c in f))
    S = np.zeros((N + 1,) + shape)
    S[0] = np.sqrt(f[0])
    for k in range(1, N + 1):
        acc = f[k] * np.ones(shape) if k < len(f) else np.zeros(shape)
        for j in range(1, k):
            acc = acc - S[j] * S[k - j]
        S[k] = acc / (2.0 * S[0])
    return PowerSeries(S)


def divide_by_linear(series: PowerSeries, root) -> PowerSeries:
    """Series of series(x) / (root - x): g_0 = s_0/root, g_k = (s_k + g_{k-1})/root."""
    r = np.asarray(root, dtype=float)
    if np.any(r == 0):
        raise ZeroRoot("root must be nonzero")
    s = series.coeffs
    g = np.zeros(np.broadcast_shapes(s.shape, (1,) + r.shape))
    g[0] = s[0] / r
    for k in range(1, s.shape[0]):
        g[k] = (s[k] + g[k - 1]) / r
    return PowerSeries(g)


def series_family(a, b, lambda0, N: int) -> dict[str, PowerSeries]:
    """The B, C and D series sharing one square-root expansion."""
    B = sqrt_cubic_series(a, b, lambda0, N)
    return {
        "B": B,
        "C": divide_by_linear(B, lambda0),
        "D": divide_by_linear(B, b),
    }
