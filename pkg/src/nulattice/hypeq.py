"""Hypergeometric-type difference equations on a lattice.

The equation is described by polynomials ``sigma_tilde`` (degree <= 2) and
``tau_tilde`` (degree <= 1) in the lattice variable together with a spectral
constant ``lam``.  From these we derive ``sigma(s)``, the shifted coefficients
``tau_nu`` and ``sigma_tilde_nu``, the slopes ``kappa_m``, Pearson weights and
Rodrigues-type polynomial solutions.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .diffops import GUARD, GridSpec, ScalarFn, delta_nu, guarded_div, nabla_iter, nabla_nu
from .errors import InconsistencyError, InvalidInputError, PoleError
from .lattice import QUADRATIC, LatticeSpec, _complex_from_json
from .numerics import cheb_probes, poly_fit, stray_coefficient
from .report import VerificationReport

KAPPA_PROBES = ((0.31, 0.83, 1.37), (0.57, 1.13, 1.71), (0.19, 0.74, 1.52))


def _polyval(coeffs, x):
    r = 0j
    for c in reversed(coeffs):
        r = r * x + c
    return r


class CoefficientFamily:
    """The shifted coefficients ``tau_k`` generated by ``sigma`` and one member ``tau_d0``.

    Every member obeys ``tau_k(z) dx_{k+1}(z) - tau_j(z') dx_{j+1}(z') = sigma(z') - sigma(z)``
    with ``z' = z + k - j`` (``dx`` a backward step), which lets any index be produced
    from the base one.
    """

    def __init__(self, lat: LatticeSpec, sigma: ScalarFn, tau_base: ScalarFn, base: float = 0.0):
        self.lat = lat
        self.sigma = sigma
        self.tau_base = tau_base
        self.base = base

    def tau(self, k: float, z):
        if k == self.base:
            return self.tau_base(z)
        lat = self.lat
        zp = z + (k - self.base)
        num = self.tau_base(zp) * lat.nabla(self.base + 1, zp) + self.sigma(zp) - self.sigma(z)
        return guarded_div(num, lat.nabla(k + 1, z), f"in tau_{k} at z={z}")

    def sigma_tilde(self, k: float, z):
        return self.sigma(z) + 0.5 * self.tau(k, z) * self.lat.nabla(k + 1, z)

    def tau_magnitude(self, k: float, z) -> float:
        """Size of the terms that cancel in :meth:`tau`; the natural scale for its rounding error."""
        if k == self.base:
            return abs(self.tau_base(z))
        lat = self.lat
        zp = z + (k - self.base)
        num = abs(self.tau_base(zp) * lat.nabla(self.base + 1, zp)) + abs(self.sigma(zp)) + abs(self.sigma(z))
        return num / abs(lat.nabla(k + 1, z))

    def kappa(self, m: float, probes: Sequence[float] | None = None, tol: float = 1e-10) -> complex:
        """Slope of ``tau_{(m-1)/2}`` as a function of ``x_{(m-1)/2}``, checked on a third probe."""
        nu = (m - 1) / 2
        candidates = [tuple(probes)] if probes is not None else KAPPA_PROBES
        last_exc = None
        for pr in candidates:
            if len(pr) < 3:
                raise InvalidInputError("kappa needs three probe points")
            try:
                xs = [self.lat.xs(nu, z) for z in pr]
                ts = [self.tau(nu, z) for z in pr]
            except ZeroDivisionError as exc:
                last_exc = exc
                continue
            if abs(xs[0] - xs[1]) < GUARD:
                raise InvalidInputError("coincident kappa probes")
            slope = (ts[0] - ts[1]) / (xs[0] - xs[1])
            scale = max(1.0, *(abs(t) for t in ts))
            for x3, t3 in zip(xs[2:], ts[2:]):
                dev = abs(ts[0] + slope * (x3 - xs[0]) - t3) / scale
                if dev > tol:
                    raise InconsistencyError(
                        f"tau_{nu} is not linear in x_{nu} (deviation {dev:.2e}); not a hypergeometric-type instance"
                    )
            return slope
        raise last_exc


@dataclass(frozen=True)
class EquationSpec:
    """Coefficients of a hypergeometric-type equation on ``lat``.

    ``sigma_tilde`` and ``tau_tilde`` hold ascending coefficients in ``x``.
    When ``sigma_roots`` is given, ``sigma(s)`` is the product ``prod(s - s_k)`` and
    the tilde coefficients must reproduce it (see :meth:`from_roots`).
    """

    lat: LatticeSpec
    sigma_tilde: tuple[complex, complex, complex]
    tau_tilde: tuple[complex, complex]
    lam: complex = 0j
    sigma_roots: tuple[complex, ...] | None = None
    family: CoefficientFamily = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        st = tuple(complex(c) for c in self.sigma_tilde)
        tt = tuple(complex(c) for c in self.tau_tilde)
        if len(st) > 3 or len(tt) > 2:
            raise InvalidInputError("sigma_tilde has at most 3 and tau_tilde at most 2 coefficients")
        st = st + (0j,) * (3 - len(st))
        tt = tt + (0j,) * (2 - len(tt))
        object.__setattr__(self, "sigma_tilde", st)
        object.__setattr__(self, "tau_tilde", tt)
        object.__setattr__(self, "lam", complex(self.lam))
        if self.sigma_roots is not None:
            object.__setattr__(self, "sigma_roots", tuple(complex(r) for r in self.sigma_roots))
            self._check_roots()
        object.__setattr__(self, "family", CoefficientFamily(self.lat, self.sigma, self.tau, 0.0))

    @property
    def symmetric(self) -> bool:
        """True on quadratic lattices even in ``s`` (``c2 == 0``), where ``sigma(s) + tau(s) dx_1(s) = sigma(-s)``."""
        return self.lat.kind == QUADRATIC and self.lat.c2 == 0 and self.lat.c1 != 0

    def _check_roots(self):
        if not self.symmetric:
            raise InvalidInputError("sigma_roots requires a quadratic lattice c1 s^2 + c3")
        if len(self.sigma_roots) > 4:
            raise InvalidInputError("at most four sigma roots")
        lat = self.lat
        for s in (0.37, 1.21, -0.83, 2.45):
            prod = self.sigma(s)
            poly = self._sigma_from_tilde(s)
            scale = max(1.0, abs(prod))
            if abs(prod - poly) > 1e-10 * scale:
                raise InconsistencyError("sigma_tilde/tau_tilde do not reproduce the sigma roots")
            refl = prod + self.tau(s) * lat.nabla(1, s) - self.sigma(-s)
            if abs(refl) > 1e-10 * scale:
                raise InconsistencyError("sigma roots violate the reflection identity")

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lam: complex = 0j, lat: LatticeSpec | None = None) -> "EquationSpec":
        """Build the equation whose ``sigma(s)`` is ``prod(s - s_k)`` on a symmetric quadratic lattice."""
        lat = lat or LatticeSpec.quadratic(1.0, 0.0, 0.0)
        if not (lat.kind == QUADRATIC and lat.c2 == 0 and lat.c1 != 0):
            raise InvalidInputError("roots form needs a quadratic lattice c1 s^2 + c3")
        roots = [complex(r) for r in roots]
        if len(roots) > 4:
            raise InvalidInputError("at most four sigma roots")
        p = np.polynomial.polynomial.polyfromroots(roots) if roots else np.array([1.0 + 0j])
        p = np.concatenate([np.asarray(p, dtype=complex), np.zeros(5 - len(p), dtype=complex)])
        c1, c3 = lat.c1, lat.c3
        # s^2 = (x - c3)/c1 = u0 + u1 x
        u = np.array([-c3 / c1, 1 / c1])
        P = np.polynomial.polynomial
        even = P.polyadd(P.polyadd([p[0]], p[2] * u), p[4] * P.polymul(u, u))
        odd = P.polyadd([p[1]], p[3] * u)
        # sigma(s) = sigma_tilde(x) - tau_tilde(x) c1 s
        st = np.zeros(3, dtype=complex)
        st[: len(even)] = even
        tt = np.zeros(2, dtype=complex)
        tt[: len(odd)] = -np.asarray(odd) / c1
        return cls(lat, tuple(st), tuple(tt), lam, tuple(roots))

    def with_lambda(self, lam: complex) -> "EquationSpec":
        return replace(self, lam=lam)

    # coefficient functions

    def sigma_tilde_at(self, x):
        return _polyval(self.sigma_tilde, x)

    def tau_tilde_at(self, x):
        return _polyval(self.tau_tilde, x)

    def _sigma_from_tilde(self, s):
        x = self.lat.x(s)
        return self.sigma_tilde_at(x) - 0.5 * self.tau_tilde_at(x) * self.lat.nabla(1, s)

    def sigma(self, s):
        if self.sigma_roots is not None:
            r = 1 + 0j
            for sk in self.sigma_roots:
                r *= s - sk
            return r
        return self._sigma_from_tilde(s)

    def tau(self, s):
        return self.tau_tilde_at(self.lat.x(s))

    def tau_nu(self, nu: float, z):
        return self.family.tau(nu, z)

    def sigma_tilde_nu(self, nu: float, z):
        return self.family.sigma_tilde(nu, z)

    def kappa(self, m: float, probes=None) -> complex:
        return self.family.kappa(m, probes)

    # serialization

    def to_dict(self) -> dict:
        d = {
            "sigma_tilde": [[c.real, c.imag] for c in self.sigma_tilde],
            "tau_tilde": [[c.real, c.imag] for c in self.tau_tilde],
            "lambda": [self.lam.real, self.lam.imag],
        }
        if self.sigma_roots is not None:
            d["sigma_roots"] = [[c.real, c.imag] for c in self.sigma_roots]
        return d

    @classmethod
    def from_dict(cls, d: dict, lat: LatticeSpec) -> "EquationSpec":
        """Inverse of :meth:`to_dict`; ``sigma_roots`` alone builds the equation via :meth:`from_roots`."""
        if not isinstance(d, dict):
            raise InvalidInputError(f"bad equation description: {d!r}")
        lam = _complex_from_json(d.get("lambda", 0.0))
        roots = d.get("sigma_roots")
        try:
            if roots is not None and "sigma_tilde" not in d:
                return cls.from_roots([_complex_from_json(r) for r in roots], lam, lat)
            st = [_complex_from_json(c) for c in d["sigma_tilde"]]
            tt = [_complex_from_json(c) for c in d["tau_tilde"]]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"bad equation description: {d!r}") from exc
        if roots is not None:
            roots = tuple(_complex_from_json(r) for r in roots)
        return cls(lat, tuple(st), tuple(tt), lam, roots)


def sigma_of(eq: EquationSpec) -> ScalarFn:
    return eq.sigma


def tau_nu_eval(eq: EquationSpec, nu: float, z):
    return eq.tau_nu(nu, z)


def sigma_tilde_nu_eval(eq: EquationSpec, nu: float, z):
    return eq.sigma_tilde_nu(nu, z)


def kappa(eq: EquationSpec, m: float, probes=None) -> complex:
    return eq.kappa(m, probes)


def kappa_closed_form(eq: EquationSpec, m: float) -> complex:
    """``alpha(m-1) tau_tilde' + gamma(m-1) sigma_tilde''/2``; used as an independent oracle."""
    lat = eq.lat
    return lat.alpha(m - 1) * eq.tau_tilde[1] + lat.gamma(m - 1) * eq.sigma_tilde[2]


def _delta_tau_j(eq: EquationSpec, j: int, probes=(0.43, 1.29), tol: float = 1e-10) -> complex:
    """``Delta tau_j(s) / Delta x_j(s)``, verified to be constant in ``s``."""
    vals = [delta_nu(lambda t: eq.tau_nu(j, t), eq.lat, j)(s) for s in probes]
    scale = max(1.0, *(abs(v) for v in vals))
    if abs(vals[0] - vals[1]) > tol * scale:
        raise InconsistencyError(f"Delta_{j} tau_{j} is not constant")
    return vals[0]


def lambda_n(eq: EquationSpec, n: int) -> complex:
    """``-sum_{j<n} Delta_j tau_j``: the constant making a degree-``n`` polynomial solution possible."""
    if n < 0 or int(n) != n:
        raise InvalidInputError("n must be a nonnegative integer")
    return -sum((_delta_tau_j(eq, j) for j in range(int(n))), 0j)


def lambda_variants(eq: EquationSpec, n: int) -> dict[str, complex]:
    """The defining sum together with the ``-gamma(n) kappa_n`` and ``-n kappa_n`` expressions."""
    k = eq.kappa(n) if n else 0j
    return {
        "sum": lambda_n(eq, n),
        "gamma_kappa": -eq.lat.gamma(n) * k,
        "n_kappa": -n * k,
    }


def mu_k(eq: EquationSpec, k: int, tol: float = 1e-9) -> complex:
    """``lam + sum_{j<k} Delta_j tau_j``, cross-checked against ``lam + gamma(k) kappa_k``."""
    val = eq.lam - lambda_n(eq, k)
    if k:
        alt = eq.lam + eq.lat.gamma(k) * eq.kappa(k)
        if abs(val - alt) > tol * max(1.0, abs(val)):
            raise InconsistencyError(f"mu_{k} disagrees with its closed form ({val} vs {alt})")
    return val


@dataclass(frozen=True)
class DerivedCoeffs:
    k: int
    sigma_tilde_k: tuple[complex, complex, complex]
    tau_tilde_k: tuple[complex, complex]
    mu_k: complex
    fit_residual: float = 0.0


def derive_kth(eq: EquationSpec, k: int, tol: float = 1e-9, npts: int = 9) -> DerivedCoeffs:
    """Coefficients of the equation satisfied by the ``k``-th divided difference of a solution."""
    if k < 0 or k > 8 or int(k) != k:
        raise InvalidInputError("k must be an integer in 0..8")
    lat = eq.lat
    st, tt = np.array(eq.sigma_tilde), np.array(eq.tau_tilde)
    mu = eq.lam
    worst = 0.0
    ss = cheb_probes(npts, -0.3, 1.4)
    for j in range(1, k + 1):
        vs, vt, xk = [], [], []
        for s in ss:
            x0, x1 = lat.xs(j - 1, s), lat.xs(j - 1, s + 1)
            dprev = lat.delta(j - 1, s)
            dk, nk = lat.delta(j, s), lat.nabla(j, s)
            t0, t1 = _polyval(tt, x0), _polyval(tt, x1)
            s0, s1 = _polyval(st, x0), _polyval(st, x1)
            dt = (t1 - t0) / dprev
            ds = (s1 - s0) / dprev
            vs.append((s1 + s0) / 2 + 0.25 * dt * (dk + nk) / (2 * dprev) * dprev**2 + (t1 + t0) / 2 * (dk - nk) / 4)
            vt.append(ds + dt * (dk - nk) / 4 + (t1 + t0) / 2 * (dk + nk) / (2 * dprev))
            xk.append(lat.xs(j, s))
        mu = mu + tt[1]
        fs, ft = poly_fit(xk, vs, 2), poly_fit(xk, vt, 1)
        worst = max(worst, fs.residual, ft.residual)
        if worst > tol:
            raise InconsistencyError(f"derived coefficients at k={j} are not polynomial (residual {worst:.2e})")
        st, tt = fs.coeffs, ft.coeffs
    return DerivedCoeffs(int(k), tuple(complex(c) for c in st), tuple(complex(c) for c in tt), complex(mu), worst)


def apply_L(eq: EquationSpec, nu: float, mu: float, y: ScalarFn, lam: complex | None = None) -> ScalarFn:
    """``sigma Delta_{d-1} nabla_d y + tau_d Delta_d y + lam y`` with ``d = nu - mu``."""
    lat = eq.lat
    d = nu - mu
    lam = eq.lam if lam is None else lam
    second = delta_nu(nabla_nu(y, lat, d), lat, d - 1)
    first = delta_nu(y, lat, d)

    def Ly(z):
        return eq.sigma(z) * second(z) + eq.tau_nu(d, z) * first(z) + lam * y(z)

    return Ly


def pearson_ratio(eq: EquationSpec, nu: float) -> ScalarFn:
    """``rho_nu(z+1)/rho_nu(z)`` for the forward Pearson equation of index ``nu``."""
    lat = eq.lat

    def ratio(z):
        den = eq.sigma(z + 1)
        if abs(den) < GUARD:
            raise PoleError(f"sigma(z+1) vanishes at z={z}")
        return (eq.sigma(z) + eq.tau_nu(nu, z) * lat.nabla(nu + 1, z)) / den

    return ratio


def pearson_ratio_backward(eq: EquationSpec, nu: float) -> ScalarFn:
    """``rho_nu(z+1)/rho_nu(z) = sigma(z) / (sigma(z+1) + tau_nu(z+1) dx_{nu+1}(z+1))``."""
    lat = eq.lat

    def ratio(z):
        den = eq.sigma(z + 1) + eq.tau_nu(nu, z + 1) * lat.nabla(nu + 1, z + 1)
        if abs(den) < GUARD:
            raise PoleError(f"backward Pearson denominator vanishes at z={z}")
        return eq.sigma(z) / den

    return ratio


def pearson_ratio_reflected(eq: EquationSpec, nu: float, backward: bool = False) -> ScalarFn:
    """Reflected forms on symmetric lattices: ``sigma(-z-nu)/sigma(z+1)`` or ``sigma(z)/sigma(-z-1-nu)``."""
    if not eq.symmetric:
        raise InvalidInputError("reflected Pearson ratio needs a symmetric quadratic lattice")

    def forward(z):
        den = eq.sigma(z + 1)
        if abs(den) < GUARD:
            raise PoleError(f"sigma(z+1) vanishes at z={z}")
        return eq.sigma(-z - nu) / den

    def back(z):
        den = eq.sigma(-z - 1 - nu)
        if abs(den) < GUARD:
            raise PoleError(f"sigma(-z-1-nu) vanishes at z={z}")
        return eq.sigma(z) / den

    return back if backward else forward


def _step_offset(s, s0) -> int:
    k = s - s0
    kr = round(complex(k).real)
    if abs(k - kr) > 1e-9:
        raise InvalidInputError(f"{s} is not on the integer grid through {s0}")
    return int(kr)


@dataclass(frozen=True)
class PearsonWeight:
    """A weight known through its anchor value and its one-step ratio.

    Values are accumulated in the log domain: ``log rho(s0 + k) = log rho(s0) + sum log ratio``.
    """

    anchor: complex
    ratio: ScalarFn
    nu: float = 0.0
    log_value_at_anchor: complex = 0j
    _steps: dict = field(default_factory=dict, repr=False, compare=False)

    def _log_step(self, j: int) -> complex:
        """``log(rho(s0+j+1)/rho(s0+j))``."""
        if j not in self._steps:
            try:
                r = self.ratio(self.anchor + j)
            except PoleError as exc:
                raise PoleError(str(exc), index=j) from exc
            if r == 0 or not cmath.isfinite(r):
                raise PoleError(f"weight ratio is {r} at step {j} from the anchor", index=j)
            self._steps[j] = cmath.log(r)
        return self._steps[j]

    def log_eval(self, s) -> complex:
        k = _step_offset(s, self.anchor)
        if k >= 0:
            logs = [self._log_step(j) for j in range(k)]
            sign = 1
        else:
            logs = [self._log_step(j) for j in range(k, 0)]
            sign = -1
        re = math.fsum(l.real for l in logs)
        im = math.fsum(l.imag for l in logs)
        return self.log_value_at_anchor + sign * complex(re, im)

    def value(self, s) -> complex:
        lv = self.log_eval(s)
        try:
            return cmath.exp(lv)
        except OverflowError as exc:
            raise PoleError(f"weight overflows at s={s}") from exc

    def relative(self, s, ref) -> complex:
        """``rho(s)/rho(ref)`` without forming either value."""
        return cmath.exp(self.log_eval(s) - self.log_eval(ref))

    def __call__(self, s) -> complex:
        return self.value(s)


def weight_eval(w: PearsonWeight, s) -> tuple[float, complex]:
    """``rho(s)`` as ``(log|rho|, phase)``."""
    lv = w.log_eval(s)
    return lv.real, cmath.exp(1j * lv.imag)


def rho_k_product(eq: EquationSpec, rho: PearsonWeight, k: int, s) -> complex:
    """``rho_k(s) = rho(s+k) prod_{i=1..k} sigma(s+i)``."""
    r = rho.value(s + k)
    for i in range(1, k + 1):
        r *= eq.sigma(s + i)
    return r


def rodrigues_eval(eq: EquationSpec, n: int, grid, ratio: ScalarFn | None = None) -> np.ndarray:
    """Values of ``y_n(s) = nabla_n^{(n)}[rho_n](s) / rho(s)`` at each grid point.

    ``rho`` is the forward Pearson weight of index 0 unless ``ratio`` is supplied.
    Each point uses weights relative to ``rho(s)``, so no absolute weight is formed.
    """
    if n < 0 or n > 8 or int(n) != n:
        raise InvalidInputError("n must be an integer in 0..8")
    n = int(n)
    ratio = ratio or pearson_ratio(eq, 0.0)
    pts = list(grid) if not isinstance(grid, GridSpec) else list(grid.points())
    out = np.empty(len(pts), dtype=complex)
    for idx, s in enumerate(pts):
        s = complex(s)
        rel = [1 + 0j]
        for m in range(n):
            rel.append(rel[-1] * ratio(s + m))

        def rho_n(t, s=s, rel=rel):
            r = rel[_step_offset(t, s) + n]
            for i in range(1, n + 1):
                r *= eq.sigma(t + i)
            return r

        out[idx] = nabla_iter(rho_n, eq.lat, float(n), n)(s)
    return out


@dataclass(frozen=True)
class QuadraticDecomposition:
    """Fitted ``Q(s) = A + B u + C u v`` with ``u = x_nu(s) - x_nu(z)``, ``v = x_nu(s) - x_nu(z - mu)``."""

    A: complex
    B: complex
    C: complex
    residual: float


def quadratic_decomposition(eq: EquationSpec, nu: float, mu: float, z, npts: int = 9) -> QuadraticDecomposition:
    """Fit ``Q(s) = gamma(mu) sigma(s) - tau_nu(s) [x_{nu-mu}(s) - x_{nu-mu}(z)]`` in the three-term basis.

    The exact values are ``A = gamma(mu) sigma(z)``, ``B = -tau_{nu-mu}(z)`` and
    ``C = -kappa_{2 nu - mu + 1}``.
    """
    lat = eq.lat
    g = lat.gamma(mu)
    xz, xzm = lat.xs(nu, z), lat.xs(nu, z - mu)
    xd = lat.xs(nu - mu, z)
    rows, vals = [], []
    for s in cheb_probes(npts, -0.4, 1.6):
        u = lat.xs(nu, s) - xz
        v = lat.xs(nu, s) - xzm
        rows.append([1.0, u, u * v])
        vals.append(g * eq.sigma(s) - eq.tau_nu(nu, s) * (lat.xs(nu - mu, s) - xd))
    V = np.asarray(rows, dtype=complex)
    y = np.asarray(vals, dtype=complex)
    norms = np.abs(V).max(axis=0)
    norms[norms == 0] = 1.0
    coef, *_ = np.linalg.lstsq(V / norms, y, rcond=None)
    coef = coef / norms
    res = float(np.abs(V @ coef - y).max() / max(np.abs(y).max(), 1e-300))
    return QuadraticDecomposition(complex(coef[0]), complex(coef[1]), complex(coef[2]), res)


def certify_linearity(
    eq: EquationSpec,
    nus: Sequence[float] = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0),
    npts: int = 9,
    tol: float = 1e-10,
) -> VerificationReport:
    """``tau_nu`` is linear and ``sigma_tilde_nu`` quadratic in ``x_nu`` for every ``nu``."""
    lat = eq.lat
    probes = cheb_probes(npts, 0.11, 1.9)
    lin = quad = 0.0
    fam = eq.family
    for nu in nus:
        xs = [lat.xs(nu, z) for z in probes]
        # scale by the cancelling inputs so tiny tau_nu does not inflate rounding noise
        t_mag = max(fam.tau_magnitude(nu, z) for z in probes)
        s_mag = max(abs(eq.sigma(z)) + 0.5 * fam.tau_magnitude(nu, z) * abs(lat.nabla(nu + 1, z)) for z in probes)
        lin = max(lin, stray_coefficient(xs, [eq.tau_nu(nu, z) for z in probes], 1, floor=t_mag))
        quad = max(quad, stray_coefficient(xs, [eq.sigma_tilde_nu(nu, z) for z in probes], 2, floor=s_mag))
    rep = VerificationReport()
    rep.add("hypeq.tau_linear", "tau_nu linear in x_nu", lin, tol, f"nu in {list(nus)}")
    rep.add("hypeq.sigma_tilde_quadratic", "sigma_tilde_nu quadratic in x_nu", quad, tol, f"nu in {list(nus)}")
    return rep


def rodrigues_check(eq: EquationSpec, n: int, grid, tol_fit: float = 1e-8, tol_eq: float = 1e-8) -> VerificationReport:
    """Rodrigues values form a degree-``n`` polynomial in ``x`` and solve the equation with ``lam = lambda_n``."""
    pts = list(grid) if not isinstance(grid, GridSpec) else list(grid)
    ys = rodrigues_eval(eq, n, pts)
    fit = poly_fit([eq.lat.x(z) for z in pts], ys, n)
    lam = lambda_n(eq, n)
    cache = {}

    def y(t):
        key = complex(t)
        if key not in cache:
            cache[key] = rodrigues_eval(eq, n, [key])[0]
        return cache[key]

    L = apply_L(eq, 0.0, 0.0, y, lam)
    res = max(abs(L(z)) for z in pts) / max(float(np.abs(ys).max()), 1e-300)
    rep = VerificationReport()
    rep.add("hypeq.rodrigues_degree", "Rodrigues values polynomial in x", fit.residual, tol_fit, f"n={n}")
    rep.add("hypeq.rodrigues_equation", "Rodrigues values solve the equation", res, tol_eq, f"n={n}, lambda_n={lam:.6g}")
    return rep
