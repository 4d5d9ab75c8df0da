"""Adjoint operators of hypergeometric-type difference equations.

For an equation with index ``d = nu - mu`` the operator
``L[y] = sigma Delta_{d-1} nabla_d y + tau_d Delta_d y + lam y`` has an adjoint with
respect to the scalar product weighted by ``Delta x_{d-1}``.  Its coefficients are
built in two independent ways (directly, and through the shifted family ``tau_{d-2}``),
and a family of checks certifies adjointness, conjugation and duality.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .diffops import ScalarFn, delta_nu, guarded_div, nabla_nu
from .errors import InconsistencyError, InvalidInputError
from .hypeq import CoefficientFamily, EquationSpec, PearsonWeight, apply_L, pearson_ratio
from .lattice import LatticeSpec
from .numerics import cheb_probes, csum, poly_fit, stray_coefficient
from .report import VerificationReport, guarded

RAW = "raw"
SIMPLIFIED = "simplified"
PROBES = tuple(cheb_probes(10, 0.15, 2.85))


@dataclass(frozen=True)
class AdjointCoeffs:
    sigma_star: ScalarFn
    tau_star: ScalarFn
    lambda_star: complex
    nu: float
    mu: float
    source: str

    @property
    def d(self) -> float:
        return self.nu - self.mu


def _raw_parts(lat: LatticeSpec, d: float, sigma: ScalarFn, tau_d: ScalarFn):
    """Adjoint coefficients of ``sigma Delta_{d-1} nabla_d + tau_d Delta_d`` and the z-dependent lambda shift."""

    def sigma_star(z):
        return sigma(z - 1) + tau_d(z - 1) * lat.nabla(d - 1, z)

    def tau_star(z):
        num = sigma(z + 1) - sigma(z - 1) - tau_d(z - 1) * lat.nabla(d - 1, z)
        return guarded_div(num, lat.delta(d - 1, z), f"in tau* at z={z}")

    def g(z):
        num = tau_d(z - 1) * lat.nabla(d - 1, z) - (sigma(z) - sigma(z - 1))
        return guarded_div(num, lat.nabla(d, z), f"at z={z}")

    shift = delta_nu(g, lat, d - 1)
    return sigma_star, tau_star, shift


def _constant(values: Sequence[complex], what: str, tol: float = 1e-10) -> complex:
    v = np.asarray(values, dtype=complex)
    scale = max(1.0, float(np.abs(v).max()))
    if np.abs(v - v[0]).max() > tol * scale:
        raise InconsistencyError(f"{what} is not constant (spread {np.abs(v - v[0]).max():.2e})")
    return complex(v[0])


def adjoint_raw(eq: EquationSpec, nu: float, mu: float, probes: Sequence[float] = PROBES) -> AdjointCoeffs:
    """Adjoint coefficients from the summation-by-parts expansion."""
    d = nu - mu
    ss, ts, shift = _raw_parts(eq.lat, d, eq.sigma, lambda z: eq.tau_nu(d, z))
    lam_star = eq.lam - _constant([shift(z) for z in probes], "lambda* expression")
    return AdjointCoeffs(ss, ts, lam_star, nu, mu, RAW)


def adjoint_simplified(eq: EquationSpec, nu: float, mu: float) -> AdjointCoeffs:
    """Adjoint coefficients through ``tau* (z) = -tau_{d-2}(z+1)`` and ``lam* = lam - kappa_{2d-1}``."""
    lat = eq.lat
    d = nu - mu

    def tau_star(z):
        return -eq.tau_nu(d - 2, z + 1)

    def sigma_star(z):
        return eq.sigma(z + 1) - tau_star(z) * lat.delta(d - 1, z)

    return AdjointCoeffs(sigma_star, tau_star, eq.lam - eq.kappa(2 * d - 1), nu, mu, SIMPLIFIED)


def apply_L_star(adj: AdjointCoeffs, eq: EquationSpec, w: ScalarFn, form: str = "coefficients") -> ScalarFn:
    """The adjoint operator applied to ``w``.

    ``form`` selects ``"coefficients"`` (sigma*, tau*, forward term), ``"shifted"``
    (``sigma(z+1)`` with a backward first-order term) or ``"divergence"``
    (difference of fluxes, built from the original coefficients only).
    """
    lat = eq.lat
    d = adj.d
    second = delta_nu(nabla_nu(w, lat, d), lat, d - 1)
    if form == "coefficients":
        first = delta_nu(w, lat, d)

        def Lw(z):
            return adj.sigma_star(z) * second(z) + adj.tau_star(z) * first(z) + adj.lambda_star * w(z)

    elif form == "shifted":
        back = nabla_nu(w, lat, d)

        def Lw(z):
            return (
                eq.sigma(z + 1) * second(z)
                - eq.tau_nu(d - 2, z + 1) * back(z)
                + (eq.lam - eq.kappa(2 * d - 1)) * w(z)
            )

    elif form == "divergence":
        flux = nabla_nu(lambda t: w(t) * eq.sigma(t), lat, d)

        def drift(t):
            return w(t) * eq.tau_nu(d, t) * lat.delta(d - 1, t) / lat.delta(d, t)

        def Lw(z):
            a = (flux(z + 1) - flux(z)) / lat.delta(d - 1, z)
            b = (drift(z) - drift(z - 1)) / lat.delta(d - 1, z)
            return a - b + eq.lam * w(z)

    else:
        raise InvalidInputError(f"unknown adjoint form {form!r}")
    return Lw


def _grid_len(a, b) -> int:
    n = b - a
    k = round(complex(n).real)
    if abs(n - k) > 1e-9 or k < 0:
        raise InvalidInputError("b - a must be a nonnegative integer")
    return int(k)


def scalar_product(w: ScalarFn, y: ScalarFn, a, b, lat: LatticeSpec, nu: float, mu: float) -> complex:
    """``sum_{z=a}^{b-1} w(z) y(z) Delta x_{d-1}(z)`` with compensated summation."""
    n = _grid_len(a, b)
    d = nu - mu
    return csum(w(a + k) * y(a + k) * lat.delta(d - 1, a + k) for k in range(n))


def _grid_fn(a, values: dict[int, complex]) -> ScalarFn:
    def f(z):
        return values[round(complex(z - a).real)]

    return f


def verify_adjointness(
    eq: EquationSpec,
    nu: float,
    mu: float,
    a,
    b,
    trials: int = 20,
    seed: int = 0,
    adj: AdjointCoeffs | None = None,
    tol: float = 1e-9,
) -> VerificationReport:
    """Bilinear identity ``<w, L y> = <y, L* w>`` for random functions vanishing at ``a-1, a, b-1, b``."""
    n = _grid_len(a, b)
    if n < 4:
        raise InvalidInputError("adjointness needs b - a >= 4")
    lat = eq.lat
    d = nu - mu
    rep = VerificationReport()
    zero_measure = [a + k for k in range(n) if abs(lat.delta(d - 1, a + k)) < 1e-14]
    if zero_measure:
        rep.add("adjoint.bilinear", "adjointness", 0.0, tol, f"grid skipped: zero measure at {zero_measure}")
        return rep
    adj = adj or adjoint_simplified(eq, nu, mu)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        fns = []
        for _f in range(2):
            vals = {k: complex(*rng.normal(size=2)) for k in range(-1, n + 2)}
            for k in (-1, 0, n - 1, n):
                vals[k] = 0j
            fns.append(_grid_fn(a, vals))
        w, y = fns
        Ly = apply_L(eq, nu, mu, y)
        Lw = apply_L_star(adj, eq, w)
        terms_l = [w(a + k) * Ly(a + k) * lat.delta(d - 1, a + k) for k in range(n)]
        terms_r = [y(a + k) * Lw(a + k) * lat.delta(d - 1, a + k) for k in range(n)]
        scale = max(1.0, sum(abs(t) for t in terms_l), sum(abs(t) for t in terms_r))
        worst = max(worst, abs(csum(terms_l) - csum(terms_r)) / scale)
    rep.add("adjoint.bilinear", "adjointness", worst, tol, f"{trials} trials on {n} points, adjoint {adj.source}")
    return rep


def perturbed(adj: AdjointCoeffs, tau_scale: complex) -> AdjointCoeffs:
    """Copy of ``adj`` with ``tau*`` multiplied by ``tau_scale``; used to check that the checks can fail."""
    tau = adj.tau_star
    return replace(adj, tau_star=lambda z: tau_scale * tau(z), source=f"{adj.source}, tau* scaled by {tau_scale}")


def compare_adjoints(
    eq: EquationSpec,
    nu: float,
    mu: float,
    probes: Sequence[float] = PROBES,
    tol: float = 1e-10,
    simplified: AdjointCoeffs | None = None,
) -> VerificationReport:
    """Pointwise agreement of the raw and simplified adjoint coefficients."""
    raw = adjoint_raw(eq, nu, mu)
    simp = simplified or adjoint_simplified(eq, nu, mu)
    ds = max(abs(raw.sigma_star(z) - simp.sigma_star(z)) / max(1.0, abs(raw.sigma_star(z))) for z in probes)
    dt = max(abs(raw.tau_star(z) - simp.tau_star(z)) / max(1.0, abs(raw.tau_star(z))) for z in probes)
    dl = abs(raw.lambda_star - simp.lambda_star) / max(1.0, abs(raw.lambda_star))
    rep = VerificationReport()
    note = f"nu={nu}, mu={mu}"
    rep.add("adjoint.sigma_star", "raw vs simplified sigma*", ds, tol, note)
    rep.add("adjoint.tau_star", "raw vs simplified tau*", dt, tol, note)
    rep.add("adjoint.lambda_star", "raw vs simplified lambda*", dl, tol, note)
    return rep


def conjugation_check(
    eq: EquationSpec,
    nu: float,
    mu: float,
    z0: complex = 0.37,
    npts: int = 10,
    y: ScalarFn | None = None,
    adj: AdjointCoeffs | None = None,
    tol: float = 1e-9,
) -> VerificationReport:
    """``L*[rho_d y] = rho_d L[y]`` at ``z0 .. z0+npts-1`` with ``rho_d`` the forward Pearson weight."""
    d = nu - mu
    lat = eq.lat
    adj = adj or adjoint_simplified(eq, nu, mu)
    rho = PearsonWeight(z0 - 1, pearson_ratio(eq, d), d)
    if y is None:

        def y(t):
            return np.cos(0.3 * t) + 0.2 * lat.xs(d, t)

    second = delta_nu(nabla_nu(y, lat, d), lat, d - 1)
    first = delta_nu(y, lat, d)
    worst = 0.0
    for k in range(npts):
        z = z0 + k

        def wy(t, z=z):
            return rho.relative(t, z) * y(t)

        lhs = apply_L_star(adj, eq, wy)(z)
        parts = (eq.sigma(z) * second(z), eq.tau_nu(d, z) * first(z), eq.lam * y(z))
        rhs = sum(parts)
        scale = max(sum(abs(p) for p in parts), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    rep = VerificationReport()
    rep.add("adjoint.conjugation", "weighted conjugation", worst, tol, f"nu={nu}, mu={mu}, {npts} points")
    return rep


def starred_family(adj: AdjointCoeffs, lat: LatticeSpec) -> CoefficientFamily:
    """The shifted-coefficient family of the adjoint equation, anchored at index ``d``."""
    return CoefficientFamily(lat, adj.sigma_star, adj.tau_star, adj.d)


def dual_recover(adj: AdjointCoeffs, eq: EquationSpec, nu: float, mu: float, probes: Sequence[float] = PROBES, tol: float = 1e-9) -> VerificationReport:
    """Recover ``sigma``, ``tau_d`` and ``lam`` from the adjoint coefficients and compare."""
    lat = eq.lat
    d = nu - mu
    sig2, tau2, shift = _raw_parts(lat, d, adj.sigma_star, adj.tau_star)
    rep = VerificationReport()

    def worst(f, g):
        return max(abs(f(z) - g(z)) / max(1.0, abs(g(z))) for z in probes)

    rep.add("dual.sigma", "sigma from adjoint", worst(sig2, eq.sigma), tol)
    rep.add("dual.tau", "tau_d from adjoint", worst(tau2, lambda z: eq.tau_nu(d, z)), tol)
    lam_rec = [adj.lambda_star - shift(z) for z in probes]
    rep.add(
        "dual.lambda",
        "lambda from adjoint",
        max(abs(v - eq.lam) for v in lam_rec) / max(1.0, abs(eq.lam)),
        tol,
    )
    fam = starred_family(adj, lat)
    rep.add(
        "dual.tau_shortcut",
        "tau_d = -tau*_{d-2}(z+1)",
        worst(lambda z: -fam.tau(d - 2, z + 1), lambda z: eq.tau_nu(d, z)),
        tol,
    )
    kappa_star = fam.kappa(2 * d - 1)
    lam2 = adj.lambda_star - kappa_star
    rep.add(
        "dual.double_lambda",
        "lambda** = lambda",
        abs(lam2 - eq.lam) / max(1.0, abs(eq.lam)),
        1e-10,
        f"kappa*={kappa_star:.6g}",
    )
    return rep


def certify_hypergeometric_type(adj: AdjointCoeffs, eq: EquationSpec, nu: float, mu: float, probes: Sequence[float] = PROBES) -> VerificationReport:
    """The adjoint equation is again of hypergeometric type in ``x_d``."""
    lat = eq.lat
    d = nu - mu

    def st_star(z):
        return adj.sigma_star(z) + 0.5 * adj.tau_star(z) * lat.delta(d - 1, z)

    xs = [lat.xs(d, z) for z in probes]
    vals = [st_star(z) for z in probes]
    taus = [adj.tau_star(z) for z in probes]
    rep = VerificationReport()
    rep.add("adjoint.sigma_tilde_degree", "adjoint sigma~ is quadratic", stray_coefficient(xs, vals, 2), 1e-9)
    rep.add("adjoint.tau_degree", "adjoint tau is linear", stray_coefficient(xs, taus, 1), 1e-9)
    dev = max(abs(st_star(z) - eq.sigma_tilde_nu(d - 2, z + 1)) / max(1.0, abs(st_star(z))) for z in probes)
    rep.add("adjoint.sigma_tilde_shift", "adjoint sigma~ = sigma~_{d-2}(z+1)", dev, 1e-10)
    slope = (taus[0] - taus[-1]) / (xs[0] - xs[-1])
    target = -eq.kappa(2 * d - 3)
    rep.add(
        "adjoint.tau_slope",
        "adjoint tau slope = -kappa_{2d-3}",
        abs(slope - target) / max(1.0, abs(target)),
        1e-9,
    )
    return rep


def compare_operator_forms(
    eq: EquationSpec,
    nu: float,
    mu: float,
    z0: complex = 0.41,
    npts: int = 10,
    adj: AdjointCoeffs | None = None,
    tol: float = 1e-10,
) -> VerificationReport:
    """The coefficient, shifted and divergence forms of the adjoint operator agree on a test function."""
    lat = eq.lat
    d = nu - mu
    adj = adj or adjoint_simplified(eq, nu, mu)

    def w(t):
        return np.exp(0.2 * t) + 0.3 * lat.xs(d, t) ** 2

    forms = {f: apply_L_star(adj, eq, w, f) for f in ("coefficients", "shifted", "divergence")}
    worst = 0.0
    for k in range(npts):
        z = z0 + k
        vals = [forms[f](z) for f in forms]
        scale = max(max(abs(v) for v in vals), abs(w(z)), 1e-300)
        worst = max(worst, max(abs(v - vals[0]) for v in vals) / scale)
    rep = VerificationReport()
    rep.add("adjoint.operator_forms", "equivalent adjoint operator forms", worst, tol, f"nu={nu}, mu={mu}")
    return rep


def adjoint_summary(
    eq: EquationSpec,
    nu: float,
    mu: float,
    probes: Sequence[float] = PROBES,
    tau_scale: complex | None = None,
) -> tuple[dict, VerificationReport]:
    """Samples of ``sigma*``, a linear fit of ``tau*`` in ``x_d``, ``lam*`` and the adjoint checks.

    ``tau_scale`` perturbs ``tau*`` before any check runs (negative control).
    """
    d = nu - mu
    adj = adjoint_simplified(eq, nu, mu)
    if tau_scale is not None:
        adj = perturbed(adj, complex(tau_scale))
    xs = [eq.lat.xs(d, z) for z in probes]
    fit = poly_fit(xs, [adj.tau_star(z) for z in probes], 1)
    rep = compare_adjoints(eq, nu, mu, simplified=adj)
    rep.extend(compare_operator_forms(eq, nu, mu, adj=adj))
    rep.extend(guarded("dual.error", "dual recovery", lambda: dual_recover(adj, eq, nu, mu, probes)))
    rep.extend(
        guarded(
            "adjoint.type_error",
            "adjoint hypergeometric type",
            lambda: certify_hypergeometric_type(adj, eq, nu, mu, probes),
        )
    )
    data = {
        "nu": nu,
        "mu": mu,
        "sigma_star_samples": [[float(z), adj.sigma_star(z).real, adj.sigma_star(z).imag] for z in probes],
        "tau_star_fit": {
            "slope": [fit.coeffs[1].real, fit.coeffs[1].imag],
            "intercept": [fit.coeffs[0].real, fit.coeffs[0].imag],
            "variable": f"x_{d:g}(z)",
            "fit_residual": fit.residual,
        },
        "lambda_star": [adj.lambda_star.real, adj.lambda_star.imag],
    }
    return data, rep
