"""Small numerical helpers: compensated sums, probe points and scaled polynomial fits."""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

import numpy as np


def csum(values: Iterable[complex]) -> complex:
    """Compensated sum of complex values."""
    re, im = [], []
    for v in values:
        v = complex(v)
        re.append(v.real)
        im.append(v.imag)
    return complex(math.fsum(re), math.fsum(im))


def cheb_probes(n: int, lo: float = 0.15, hi: float = 2.85) -> list[float]:
    """Chebyshev nodes mapped onto ``[lo, hi]``."""
    k = np.arange(n)
    t = np.cos((2 * k + 1) * np.pi / (2 * n))
    return list(((lo + hi) / 2 + (hi - lo) / 2 * t)[::-1])


def spread(values: Sequence[complex]) -> float:
    """Relative spread ``max|v - mean| / |mean|`` of values that should coincide."""
    v = np.asarray(values, dtype=complex)
    m = v.mean()
    return float(np.abs(v - m).max() / max(abs(m), 1e-300))


@dataclass(frozen=True)
class PolyFit:
    """Least-squares polynomial fit in monomial coefficients (ascending powers).

    ``residual`` is the max fit error relative to ``scale = max|y|``.
    """

    coeffs: np.ndarray
    residual: float
    scale: float

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)


def _scaled(xs):
    xs = np.asarray(xs, dtype=complex)
    c = xs.mean()
    h = np.abs(xs - c).max()
    if h == 0:
        raise ValueError("fit abscissae coincide")
    return xs, c, h


def poly_fit(xs, ys, deg: int) -> PolyFit:
    """Fit ``ys`` by a polynomial of degree ``deg`` in ``xs`` using a centred, scaled basis."""
    xs, c, h = _scaled(xs)
    ys = np.asarray(ys, dtype=complex)
    u = (xs - c) / h
    V = np.vander(u, deg + 1, increasing=True)
    b, *_ = np.linalg.lstsq(V, ys, rcond=None)
    scale = float(max(np.abs(ys).max(), 1e-300))
    res = float(np.abs(V @ b - ys).max() / scale)
    # expand sum b_j ((x - c)/h)^j into monomials
    coeffs = np.zeros(deg + 1, dtype=complex)
    for j, bj in enumerate(b):
        for i in range(j + 1):
            coeffs[i] += bj * comb(j, i) * (-c) ** (j - i) / h**j
    return PolyFit(coeffs, res, scale)


def stray_coefficient(xs, ys, deg: int, floor: float = 0.0) -> float:
    """Relative size of the degree ``deg + 1`` term when fitting one degree too many.

    Measured in the scaled basis, so it is a dimensionless certificate that the
    data is a polynomial of degree at most ``deg``.  The reference size is
    ``max(max|y|, floor)``; ``floor`` lets callers supply the magnitude of
    inputs that cancel when the data was computed.
    """
    xs, c, h = _scaled(xs)
    ys = np.asarray(ys, dtype=complex)
    u = (xs - c) / h
    V = np.vander(u, deg + 2, increasing=True)
    b, *_ = np.linalg.lstsq(V, ys, rcond=None)
    return float(abs(b[-1]) / max(np.abs(ys).max(), floor, 1e-300))


def rel_err(a, b, floor: float = 1e-12) -> float:
    return float(abs(a - b) / max(abs(a), abs(b), floor))
