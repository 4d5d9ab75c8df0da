"""Racah-type equation on ``x(s) = s^2`` with ``sigma(s) = (s-s1)(s-s2)(s-s3)(s-s4)``.

The equation has a Gamma-product weight and, when ``s1 + s2 + nu`` is a
nonnegative integer, a closed-form solution given by a terminating very-well-poised
``7F6`` series at unit argument.
"""
from __future__ import annotations

import cmath
import math
from typing import Sequence

from ..errors import InvalidInputError, PoleError
from ..hypeq import EquationSpec
from ..lattice import LatticeSpec
from .special import _is_integer, eval_pFq, gamma_ratio, log_gamma


def _roots4(roots: Sequence[complex]) -> tuple[complex, complex, complex, complex]:
    if len(roots) != 4:
        raise InvalidInputError("exactly four sigma roots are required")
    return tuple(complex(r) for r in roots)


def racah_equation(roots: Sequence[complex], lam: complex = 0j) -> EquationSpec:
    """The equation on ``x = s^2`` whose ``sigma`` has the given four roots."""
    return EquationSpec.from_roots(_roots4(roots), lam, LatticeSpec.quadratic(1.0, 0.0, 0.0))


def racah_log_weight(roots: Sequence[complex], nu: float, s) -> complex:
    """``log rho_nu(s)`` for ``rho_nu(s) = prod Gamma(s-s_k) Gamma(-s_k-s-nu) sin 2pi(s+(nu+1)/2)``.

    The constant factor is fixed to one.  The weight obeys
    ``rho_nu(s+1)/rho_nu(s) = sigma(s)/sigma(-s-1-nu)``.
    """
    total = 0j
    for sk in _roots4(roots):
        total += log_gamma(s - sk) + log_gamma(-sk - s - nu)
    sn = cmath.sin(2 * math.pi * (s + (nu + 1) / 2))
    if sn == 0:
        raise PoleError(f"weight vanishes at s={s}")
    return total + cmath.log(sn)


def racah_weight(roots: Sequence[complex], nu: float, s) -> complex:
    return cmath.exp(racah_log_weight(roots, nu, s))


def racah_parameters(roots: Sequence[complex], nu: float, z) -> tuple[list[complex], list[complex]]:
    """Upper and lower parameters of the ``7F6`` in the closed-form solution."""
    s1, s2, s3, s4 = _roots4(roots)
    e = s1 + s2 + nu
    a = 2 * z - e
    upper = [a, a / 2 + 1, -e, 1 + z - s1, 1 + z - s2, z + s4, z + s3]
    lower = [a / 2, 1 + 2 * z, z - s2 - nu, z - s1 - nu, 1 + z - e - s4, 1 + z - e - s3]
    return upper, lower


def racah_prefactor(roots: Sequence[complex], nu: float, z) -> complex:
    """Gamma-ratio prefactor of the closed form, paired so integer shifts reduce to products."""
    s1, s2, s3, s4 = _roots4(roots)
    e = s1 + s2 + nu
    r = gamma_ratio(1 + 2 * z, -e)
    r *= gamma_ratio(z - s1 - nu, 1 + nu)
    r *= gamma_ratio(z - s2 - nu, 1 + nu)
    r *= gamma_ratio(1 + z - e - s3, e)
    r *= gamma_ratio(1 + z - e - s4, e)
    return r


def racah_solution(roots: Sequence[complex], nu: float, z, max_terms: int = 100_000) -> complex:
    """Closed-form solution (up to a constant factor) as prefactor times ``7F6(...; 1)``."""
    upper, lower = racah_parameters(roots, nu, z)
    return racah_prefactor(roots, nu, z) * eval_pFq(upper, lower, 1.0, max_terms=max_terms)


def racah_polynomial(roots: Sequence[complex], n: int, z) -> complex:
    """Polynomial case ``nu = n - 1`` with ``s1 + s2 = 1``; a degree-``n`` polynomial in ``x(z)``."""
    s1, s2, _, _ = _roots4(roots)
    if n < 0 or int(n) != n:
        raise InvalidInputError("n must be a nonnegative integer")
    if not _is_integer(s1 + s2 - 1, 1e-12):
        raise InvalidInputError("the polynomial case needs s1 + s2 = 1")
    return racah_solution(roots, n - 1, z)
