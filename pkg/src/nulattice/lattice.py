"""Quadratic and q-quadratic lattices, their shifts, steps and structure constants."""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import InvalidInputError, NonFiniteError
from .report import VerificationReport

QUADRATIC = "quadratic"
Q_QUADRATIC = "q-quadratic"

ABS_FLOOR = 1e-12


class ZeroStepWarning(RuntimeWarning):
    """A lattice step is numerically zero; downstream divisions will be guarded."""


@dataclass(frozen=True)
class LatticeSpec:
    """A lattice ``x(s)``.

    ``q-quadratic``: ``c1 q^s + c2 q^-s + c3``; ``quadratic``: ``c1 s^2 + c2 s + c3``.
    """

    kind: str
    c1: complex
    c2: complex
    c3: complex
    q: float | None = None
    beta: complex = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in (QUADRATIC, Q_QUADRATIC):
            raise InvalidInputError(f"unknown lattice kind {self.kind!r}")
        for name in ("c1", "c2", "c3"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.kind == Q_QUADRATIC:
            if self.q is None or not (float(self.q) > 0) or float(self.q) == 1.0 or not math.isfinite(self.q):
                raise InvalidInputError("q-quadratic lattice needs a positive real q != 1")
            object.__setattr__(self, "q", float(self.q))
        else:
            object.__setattr__(self, "q", None)
        # constant of the midpoint relation, taken once at s = 0
        a = self.alpha(1.0)
        object.__setattr__(self, "beta", (self.x(1.0) + self.x(0.0)) / 2 - a * self.x(0.5))

    @classmethod
    def quadratic(cls, c1=1.0, c2=0.0, c3=0.0) -> "LatticeSpec":
        return cls(QUADRATIC, c1, c2, c3)

    @classmethod
    def q_quadratic(cls, c1, c2, c3, q) -> "LatticeSpec":
        return cls(Q_QUADRATIC, c1, c2, c3, q)

    @property
    def degenerate(self) -> bool:
        """True when ``c1 * c2 == 0`` (uniform or pure exponential lattices)."""
        return self.c1 * self.c2 == 0

    @property
    def is_q(self) -> bool:
        return self.kind == Q_QUADRATIC

    # lattice evaluation

    def x(self, s):
        if self.kind == QUADRATIC:
            val = (self.c1 * s + self.c2) * s + self.c3
        elif isinstance(s, np.ndarray):
            lq = math.log(self.q)
            with np.errstate(over="ignore", invalid="ignore"):
                val = self.c1 * np.exp(s * lq) + self.c2 * np.exp(-s * lq) + self.c3
        else:
            lq = math.log(self.q)
            try:
                val = self.c1 * cmath.exp(s * lq) + self.c2 * cmath.exp(-s * lq) + self.c3
            except OverflowError as exc:
                raise NonFiniteError(f"lattice overflow at s={s}") from exc
        if not np.all(np.isfinite(val)):
            raise NonFiniteError(f"non-finite lattice value at s={s}")
        return val

    def xs(self, nu, s):
        """Shifted lattice ``x_nu(s) = x(s + nu/2)``."""
        return self.x(s + nu / 2)

    def delta(self, nu, s):
        """Forward step ``x_nu(s+1) - x_nu(s)``."""
        return self.xs(nu, s + 1) - self.xs(nu, s)

    def nabla(self, nu, s):
        """Backward step ``x_nu(s) - x_nu(s-1)``."""
        return self.xs(nu, s) - self.xs(nu, s - 1)

    # structure constants

    def alpha(self, mu) -> float:
        if self.kind == QUADRATIC:
            return 1.0
        h = self.q ** (mu / 2)
        return (h + 1 / h) / 2

    def gamma(self, mu) -> float:
        if self.kind == QUADRATIC:
            return float(mu)
        h = self.q ** (mu / 2)
        r = math.sqrt(self.q)
        return (h - 1 / h) / (r - 1 / r)

    def beta_mu(self, mu) -> complex:
        if self.kind == QUADRATIC:
            return self.beta * mu * mu
        a1 = self.alpha(1.0)
        return self.beta * (1 - self.alpha(mu)) / (1 - a1)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "c": [[z.real, z.imag] for z in (self.c1, self.c2, self.c3)]}
        if self.q is not None:
            d["q"] = self.q
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LatticeSpec":
        try:
            kind = d["kind"]
            cs = [_complex_from_json(c) for c in d["c"]]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"bad lattice description: {d!r}") from exc
        if len(cs) != 3:
            raise InvalidInputError("lattice needs exactly three coefficients")
        return cls(kind, *cs, d.get("q"))


def _complex_from_json(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InvalidInputError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise InvalidInputError(f"not a complex value: {v!r}")


def x_at(lat: LatticeSpec, s):
    return lat.x(s)


def x_shifted(lat: LatticeSpec, nu: float, s):
    return lat.xs(nu, s)


def _warn_if_zero(val, nu, s):
    if abs(val) < ABS_FLOOR:
        warnings.warn(f"zero lattice step at s={s}, nu={nu}", ZeroStepWarning, stacklevel=3)
    return val


def step_forward(lat: LatticeSpec, nu: float, s):
    return _warn_if_zero(lat.delta(nu, s), nu, s)


def step_backward(lat: LatticeSpec, nu: float, s):
    return _warn_if_zero(lat.nabla(nu, s), nu, s)


def alpha_of(lat: LatticeSpec, mu: float) -> float:
    return lat.alpha(mu)


def beta_of(lat: LatticeSpec, mu: float) -> complex:
    return lat.beta_mu(mu)


def gamma_of(lat: LatticeSpec, mu: float) -> float:
    return lat.gamma(mu)


def check_lattice_identities(
    lat: LatticeSpec,
    grid: Iterable[complex],
    mus: Iterable[float] = (0.0, 0.5, -0.5, 1.0, -1.0, 2.0, 3.0),
    tol: float = 1e-12,
    max_k: int = 8,
) -> VerificationReport:
    """Check the midpoint relation, the step-sum relation and the alpha/gamma sums."""
    pts = list(grid)
    if not pts:
        raise InvalidInputError("empty grid")
    if not tol > 0:
        raise InvalidInputError("tolerance must be positive")
    mus = list(mus)
    a1, b = lat.alpha(1.0), lat.beta
    mid = 0.0
    for s in pts:
        lhs = (lat.x(s + 1) + lat.x(s)) / 2
        rhs = a1 * lat.x(s + 0.5) + b
        mid = max(mid, abs(lhs - rhs) / max(1.0, abs(lat.x(s + 1)), abs(lat.x(s))))
    step = 0.0
    for z in pts:
        for mu in mus:
            lhs = lat.x(z + mu) - lat.x(z)
            rhs = lat.gamma(mu) * (lat.x(z + (mu + 1) / 2) - lat.x(z + (mu - 1) / 2))
            step = max(step, abs(lhs - rhs) / max(1.0, abs(lat.x(z + mu))))
    sums = 0.0
    for k in range(1, max_k + 1):
        sa = math.fsum(lat.alpha(2 * j) for j in range(k))
        sg = math.fsum(lat.gamma(2 * j) for j in range(k))
        ra = lat.alpha(k - 1) * lat.gamma(k)
        rg = lat.gamma(k - 1) * lat.gamma(k)
        sums = max(sums, abs(sa - ra) / max(1.0, abs(ra)), abs(sg - rg) / max(1.0, abs(rg)))
    rep = VerificationReport()
    rep.add("lattice.midpoint", "lattice midpoint relation", mid, tol, f"alpha={a1:.6g}, beta={b:.6g}")
    rep.add("lattice.step_sum", "lattice step-sum relation", step, tol, f"mu in {mus}")
    rep.add("lattice.alpha_gamma_sums", "alpha/gamma partial sums", sums, tol, f"k=1..{max_k}")
    return rep


def lattice_table(lat: LatticeSpec, nu: float, points: Iterable[complex]) -> dict:
    """Lattice values, steps and the constants ``alpha(nu)``, ``gamma(nu)``, ``beta(nu)`` as JSON-ready data."""

    def pair(v):
        v = complex(v)
        return [v.real, v.imag]

    rows = []
    for s in points:
        s = complex(s)
        rows.append(
            {
                "s": pair(s),
                "x_nu": pair(lat.xs(nu, s)),
                "delta_nu": pair(lat.delta(nu, s)),
                "nabla_nu": pair(lat.nabla(nu, s)),
            }
        )
    return {
        "lattice": lat.to_dict(),
        "nu": nu,
        "alpha": lat.alpha(nu),
        "gamma": lat.gamma(nu),
        "beta": pair(lat.beta_mu(nu)),
        "points": rows,
    }
