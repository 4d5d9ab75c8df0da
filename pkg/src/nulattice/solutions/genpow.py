"""Generalized powers ``[x_nu(s) - x_nu(z)]^(mu)`` on a lattice.

Integer exponents use the descending product
``prod_{j<k} (x_nu(s) - x_nu(z - j))``; negative integers give the reciprocal
``1 / prod_{j=1..|k|} (x_nu(s) - x_nu(z + j))`` so that
``P_m(s, z) = P_j(s, z) P_{m-j}(s, z - j)`` holds for all integers.  Real exponents
are available on quadratic lattices through a ratio of Gamma functions.
"""
from __future__ import annotations

import cmath

from ..errors import InvalidInputError, PoleError
from ..lattice import QUADRATIC, LatticeSpec
from .special import _is_integer, gamma_ratio

_UNIT_QUADRATIC = LatticeSpec.quadratic(1.0, 0.0, 0.0)


def genpow_int(lat: LatticeSpec, nu: float, k: int, s, z) -> complex:
    """Product form of the generalized power for an integer exponent ``k``."""
    if not _is_integer(k):
        raise InvalidInputError(f"integer exponent expected, got {k}")
    k = round(complex(k).real)
    xs = lat.xs(nu, s)
    r = 1 + 0j
    if k >= 0:
        for j in range(k):
            r *= xs - lat.xs(nu, z - j)
        return r
    for j in range(1, -k + 1):
        f = xs - lat.xs(nu, z + j)
        if f == 0:
            raise PoleError(f"generalized power of exponent {k} has a pole at s={s}, z={z}")
        r /= f
    return r


def genpow_gamma(nu: float, mu: float, s, z, lat: LatticeSpec | None = None) -> complex:
    """Gamma form of the generalized power on ``x(s) = c1 s^2 + c2 s + c3``.

    With ``h = c2 / (2 c1)``, ``t = s + h`` and ``w = z + h`` this is
    ``c1^mu Gamma(t-w+mu)/Gamma(t-w) * Gamma(t+w+nu+1)/Gamma(t+w+nu+1-mu)``;
    on ``x = s^2`` it reduces to
    ``Gamma(s-z+mu) Gamma(s+z+nu+1) / (Gamma(s-z) Gamma(s+z+nu+1-mu))``.
    """
    lat = lat or _UNIT_QUADRATIC
    if lat.kind != QUADRATIC or lat.c1 == 0:
        raise InvalidInputError("the Gamma form needs a quadratic lattice with c1 != 0")
    h = lat.c2 / (2 * lat.c1)
    t, w = s + h, z + h
    scale = 1 + 0j if mu == 0 else cmath.exp(mu * cmath.log(lat.c1))
    return scale * gamma_ratio(t - w, mu) * gamma_ratio(t + w + nu + 1 - mu, mu)


def genpow(lat: LatticeSpec, nu: float, mu: float, s, z) -> complex:
    """Generalized power with the product form for integers and the Gamma form otherwise."""
    if _is_integer(mu):
        return genpow_int(lat, nu, round(complex(mu).real), s, z)
    if lat.kind != QUADRATIC:
        raise InvalidInputError("real exponents are only supported on quadratic lattices")
    return genpow_gamma(nu, mu, s, z, lat)
