"""Divided difference operators on shifted lattices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DivisionGuardError, InvalidInputError, NonFiniteError
from .lattice import LatticeSpec

ScalarFn = Callable[[complex], complex]

GUARD = 1e-300
MAX_DEPTH = 16


@dataclass(frozen=True)
class GridSpec:
    """Integer-step grid ``z0 + k`` for ``k = 0..count-1``."""

    z0: complex
    count: int
    stride: int = 1

    def __post_init__(self):
        if self.count < 2:
            raise InvalidInputError("grid needs at least two points")
        if self.stride != 1:
            raise InvalidInputError("only unit stride is supported")

    def points(self) -> np.ndarray:
        return complex(self.z0) + np.arange(self.count)

    def __iter__(self):
        return iter(complex(p) for p in self.points())

    def __len__(self) -> int:
        return self.count


def guarded_div(num, den, where: str = ""):
    if abs(den) < GUARD:
        raise DivisionGuardError(f"zero denominator {where}".rstrip())
    val = num / den
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise NonFiniteError(f"non-finite quotient {where}".rstrip())
    return val


def delta_nu(f: ScalarFn, lat: LatticeSpec, nu: float) -> ScalarFn:
    """``s -> (f(s+1) - f(s)) / (x_nu(s+1) - x_nu(s))``."""

    def g(s):
        return guarded_div(f(s + 1) - f(s), lat.delta(nu, s), f"at s={s}, nu={nu}")

    return g


def nabla_nu(f: ScalarFn, lat: LatticeSpec, nu: float) -> ScalarFn:
    """``s -> (f(s) - f(s-1)) / (x_nu(s) - x_nu(s-1))``."""

    def g(s):
        return guarded_div(f(s) - f(s - 1), lat.nabla(nu, s), f"at s={s}, nu={nu}")

    return g


def _check_depth(n: int):
    if n < 0 or int(n) != n:
        raise InvalidInputError("iteration depth must be a nonnegative integer")
    if n > MAX_DEPTH:
        raise InvalidInputError(f"iteration depth {n} exceeds {MAX_DEPTH}")


def delta_iter(f: ScalarFn, lat: LatticeSpec, nu: float, n: int) -> ScalarFn:
    """Forward differences over ``x_nu`` (innermost), ``x_{nu+1}``, ..., ``x_{nu+n-1}`` (outermost)."""
    _check_depth(n)
    g = f
    for k in range(n):
        g = delta_nu(g, lat, nu + k)
    return g


def nabla_iter(f: ScalarFn, lat: LatticeSpec, nu: float, n: int) -> ScalarFn:
    """Backward differences over ``x_nu`` (innermost), ``x_{nu-1}``, ..., ``x_{nu-n+1}`` (outermost)."""
    _check_depth(n)
    g = f
    for k in range(n):
        g = nabla_nu(g, lat, nu - k)
    return g


def check_difference_rules(lat: LatticeSpec, nu: float, f: ScalarFn, g: ScalarFn, points, tol: float = 1e-12):
    """Product, quotient and shift rules of ``Delta_nu`` and ``nabla_nu`` at ``points``.

    Residuals are relative to the sum of magnitudes of the terms involved.
    """
    from .report import VerificationReport

    fg = lambda s: f(s) * g(s)  # noqa: E731
    q = lambda s: f(s) / g(s)  # noqa: E731
    Df, Dg, Dfg, Dq = (delta_nu(h, lat, nu) for h in (f, g, fg, q))
    Nf, Ng, Nfg, Nq = (nabla_nu(h, lat, nu) for h in (f, g, fg, q))

    def rel(lhs, *terms):
        return abs(lhs - sum(terms)) / max(abs(lhs) + sum(abs(t) for t in terms), 1e-300)

    prod = quot = shift = 0.0
    for s in points:
        prod = max(
            prod,
            rel(Dfg(s), f(s + 1) * Dg(s), g(s) * Df(s)),
            rel(Dfg(s), f(s) * Dg(s), g(s + 1) * Df(s)),
            rel(Nfg(s), f(s - 1) * Ng(s), g(s) * Nf(s)),
            rel(Nfg(s), f(s) * Ng(s), g(s - 1) * Nf(s)),
        )
        quot = max(
            quot,
            rel(Dq(s) * g(s) * g(s + 1), g(s) * Df(s), -f(s) * Dg(s)),
            rel(Nq(s) * g(s) * g(s - 1), g(s) * Nf(s), -f(s) * Ng(s)),
        )
        shift = max(shift, rel(Nf(s + 1), Df(s)))
    rep = VerificationReport()
    rep.add("diffops.product_rules", "difference product rules", prod, tol, f"nu={nu}")
    rep.add("diffops.quotient_rules", "difference quotient rules", quot, tol, f"nu={nu}")
    rep.add("diffops.shift", "nabla(s+1) = Delta(s)", shift, tol, f"nu={nu}")
    return rep
