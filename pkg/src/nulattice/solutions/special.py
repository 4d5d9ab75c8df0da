"""Log-Gamma, Gamma ratios, Pochhammer symbols and generalized hypergeometric series."""
from __future__ import annotations

import cmath
import math
from typing import Sequence

from ..errors import ConvergenceError, InvalidInputError, PoleError
from ..numerics import csum

# Bernoulli numbers B_2 .. B_20 for the Stirling series
_BERN = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510, 43867 / 798, -174611 / 330)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)
_LOG_PI = math.log(math.pi)
_STIRLING_MIN = 15.0

INT_TOL = 1e-12


def nonpositive_integer(z: complex, tol: float = INT_TOL) -> int | None:
    """Return ``-k`` when ``z`` is (numerically) the nonpositive integer ``-k``."""
    z = complex(z)
    if abs(z.imag) > tol:
        return None
    r = round(z.real)
    if r <= 0 and abs(z.real - r) <= tol * max(1.0, abs(r)):
        return int(r)
    return None


def _stirling(z: complex) -> complex:
    """Stirling series, accurate to rounding for ``|z| >= 15`` with ``Re z > 0``."""
    w = 1 / z
    w2 = w * w
    corr = 0j
    p = w
    for k, b in enumerate(_BERN, start=1):
        corr += b / (2 * k * (2 * k - 1)) * p
        p *= w2
    return (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI + corr


def _log_gamma_right(z: complex) -> complex:
    """``log Gamma`` for ``Re z >= 1/2`` by upward recurrence into the Stirling region."""
    m = 0
    while abs(z + m) < _STIRLING_MIN:
        m += 1
    shift = [cmath.log(z + k) for k in range(m)]
    return _stirling(z + m) - complex(math.fsum(v.real for v in shift), math.fsum(v.imag for v in shift))


def _sin_pi(z: complex) -> complex:
    """``sin(pi z)`` reduced by the nearest integer, so it stays accurate near its zeros."""
    n = round(z.real)
    s = cmath.sin(math.pi * (z - n))
    return -s if n % 2 else s


def log_gamma(z: complex) -> complex:
    """Principal branch of ``log Gamma(z)``.

    Uses the Stirling series (after an upward recurrence) for ``Re z >= 1/2`` and the
    reflection formula otherwise; the imaginary part on the reflected side is pinned to
    the branch given by continuing ``Gamma(z) = Gamma(z+m) / (z (z+1) ... (z+m-1))``.
    """
    z = complex(z)
    if nonpositive_integer(z, 0.0) is not None:
        raise PoleError(f"log_gamma pole at {z}")
    if z.real >= 0.5:
        return _log_gamma_right(z)
    if z.real > -0.5:
        # one step of the recurrence keeps full relative accuracy near the pole at 0
        return _log_gamma_right(z + 1) - cmath.log(z)
    s = _sin_pi(z)
    if s == 0:
        raise PoleError(f"log_gamma pole at {z}")
    val = _LOG_PI - cmath.log(s) - _log_gamma_right(1 - z)
    m = math.ceil(0.5 - z.real)
    im = _log_gamma_right(z + m).imag - math.fsum(cmath.phase(z + k) for k in range(m))
    turns = round((im - val.imag) / (2 * math.pi))
    return val + 2j * math.pi * turns


def gamma(z: complex) -> complex:
    return cmath.exp(log_gamma(z))


def _is_integer(m, tol: float = INT_TOL) -> bool:
    m = complex(m)
    return abs(m.imag) <= tol and abs(m.real - round(m.real)) <= tol


def pochhammer(a: complex, k: int) -> complex:
    """Rising factorial ``(a)_k`` for integer ``k`` (negative ``k`` uses ``1/(a-|k|)_|k|``)."""
    r = 1 + 0j
    if k >= 0:
        for j in range(k):
            r *= a + j
        return r
    for j in range(1, -k + 1):
        d = a - j
        if d == 0:
            raise PoleError(f"pochhammer pole: ({a})_{k}")
        r /= d
    return r


def gamma_ratio(a: complex, m: complex) -> complex:
    """``Gamma(a + m) / Gamma(a)``, finite and exact-by-product when ``m`` is an integer."""
    if _is_integer(m):
        return pochhammer(a, round(complex(m).real))
    num_pole = nonpositive_integer(a + m) is not None
    den_pole = nonpositive_integer(a) is not None
    if num_pole:
        raise PoleError(f"Gamma pole at {a + m} in numerator")
    if den_pole:
        return 0j
    return cmath.exp(log_gamma(a + m) - log_gamma(a))


def eval_pFq(
    upper: Sequence[complex],
    lower: Sequence[complex],
    z: complex,
    max_terms: int = 100_000,
    rtol: float = 1e-16,
) -> complex:
    """Generalized hypergeometric series ``pFq(upper; lower; z)``.

    Terminating series (an upper parameter equal to ``-N``) are summed exactly
    through the ``z^N`` term; otherwise terms are added until one falls below
    ``rtol * |partial sum|``.
    """
    upper = [complex(a) for a in upper]
    lower = [complex(b) for b in lower]
    z = complex(z)
    stops = [-k for k in (nonpositive_integer(a) for a in upper) if k is not None]
    n_stop = min(stops) if stops else None
    if n_stop is None and abs(z) > 1:
        raise ConvergenceError(f"series diverges for |z| = {abs(z):.3g} > 1 without termination")
    for b in lower:
        k = nonpositive_integer(b)
        if k is not None and (n_stop is None or -k < n_stop):
            raise PoleError(f"lower parameter {b} hits a pole before the series terminates")
    terms = [1 + 0j]
    t = 1 + 0j
    partial = 1 + 0j
    k = 0
    while True:
        if n_stop is not None and k >= n_stop:
            break
        num = 1 + 0j
        for a in upper:
            num *= a + k
        den = 1 + 0j
        for b in lower:
            den *= b + k
        t = t * num / den * z / (k + 1)
        k += 1
        if t == 0:
            break
        terms.append(t)
        partial += t
        if n_stop is None:
            if abs(t) < rtol * abs(partial):
                break
            if k >= max_terms:
                raise ConvergenceError(f"pFq did not converge within {max_terms} terms")
        if not cmath.isfinite(t):
            raise ConvergenceError("pFq term overflow")
    return csum(terms)
