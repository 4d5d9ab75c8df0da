"""Particular solutions written as finite sums over a Pearson weight.

Each form sums ``rho_nu(s) dx_{nu+1}(s) K(s, z)`` over ``s = a .. b-1`` for a
kernel ``K`` built from generalized powers, and solves one of three operators:

* ``"M"``: ``sigma Delta_{d-1} nabla_d y - tau_d nabla_d y + lam y``,
* ``"adjoint"``: ``sigma(z+1) Delta_{d-1} nabla_d y - tau_{d-2}(z+1) nabla_d y + (lam - kappa_{2d-1}) y``,
* ``"L"``: ``sigma Delta_{d-1} nabla_d y + tau_d Delta_d y + lam y``,

with ``d = nu - mu``.  A form is a solution when its spectral (root) condition
holds and the boundary function ``psi`` takes equal values at both ends.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from ..diffops import GUARD, ScalarFn, delta_nu, nabla_nu
from ..errors import InvalidInputError, NoRootError, PoleError, PreconditionError
from ..hypeq import (
    EquationSpec,
    PearsonWeight,
    _step_offset,
    pearson_ratio,
    pearson_ratio_backward,
    pearson_ratio_reflected,
    quadratic_decomposition,
)
from ..lattice import LatticeSpec
from ..numerics import csum, spread
from ..report import VerificationReport
from .genpow import genpow

ROOT_TOL = 1e-10


class SolutionForm(str, Enum):
    """Available sum forms; the values are the names used on the command line."""

    RECIPROCAL_LOWERED = "prop41"
    RECIPROCAL_RAISED = "thm41"
    RECIPROCAL_DIAGONAL = "thm42"
    WEIGHTED_RECIPROCAL = "cor51"
    WEIGHTED_RECIPROCAL_DIAGONAL = "cor52"
    POWER_RAISED = "thm51"
    POWER_DIAGONAL = "thm52"


@dataclass(frozen=True)
class FormLayout:
    kernel: str  # "lowered", "raised" or "power"
    operator: str  # "M", "adjoint" or "L"
    diagonal: bool
    outer: bool  # divide by the forward weight of index d at z

    @property
    def backward(self) -> bool:
        return self.kernel == "power"


LAYOUT = {
    SolutionForm.RECIPROCAL_LOWERED: FormLayout("lowered", "M", False, False),
    SolutionForm.RECIPROCAL_RAISED: FormLayout("raised", "adjoint", False, False),
    SolutionForm.RECIPROCAL_DIAGONAL: FormLayout("raised", "adjoint", True, False),
    SolutionForm.WEIGHTED_RECIPROCAL: FormLayout("raised", "L", False, True),
    SolutionForm.WEIGHTED_RECIPROCAL_DIAGONAL: FormLayout("raised", "L", True, True),
    SolutionForm.POWER_RAISED: FormLayout("power", "L", False, False),
    SolutionForm.POWER_DIAGONAL: FormLayout("power", "L", True, False),
}


def as_form(form) -> SolutionForm:
    try:
        return SolutionForm(form)
    except ValueError as exc:
        names = ", ".join(f.value for f in SolutionForm)
        raise InvalidInputError(f"unknown solution form {form!r}; expected one of {names}") from exc


def _resolve_mu(form: SolutionForm, nu: float, mu: float | None) -> float:
    if LAYOUT[form].diagonal:
        if mu is not None and mu != nu:
            raise InvalidInputError(f"form {form.value} requires mu == nu")
        return nu
    if mu is None:
        raise InvalidInputError(f"form {form.value} needs mu")
    return mu


# spectral conditions


def root_condition(eq: EquationSpec, form, nu: float, mu: float | None = None, variant: str = "printed") -> complex:
    """Residual of the form's spectral condition; zero when ``eq.lam`` is admissible.

    ``variant="matched"`` replaces the raised-power condition
    ``lam + kappa_{2nu-mu+1} gamma(mu+1)`` by ``lam + kappa_{2nu-mu-1} gamma(mu+1)``
    (the index pattern of the reciprocal forms); only the default is a valid condition.
    """
    form = as_form(form)
    mu = _resolve_mu(form, nu, mu)
    lat, lam = eq.lat, eq.lam
    g = lat.gamma
    if form is SolutionForm.RECIPROCAL_LOWERED:
        return lam + eq.kappa(2 * nu - mu + 1) * g(mu - 1)
    if form in (SolutionForm.RECIPROCAL_RAISED, SolutionForm.RECIPROCAL_DIAGONAL):
        lam_star = lam - eq.kappa(2 * (nu - mu) - 1)
        return lam_star + eq.kappa(2 * nu - mu - 1) * g(mu + 1)
    if form in (SolutionForm.WEIGHTED_RECIPROCAL, SolutionForm.WEIGHTED_RECIPROCAL_DIAGONAL):
        return lam + eq.kappa(2 * nu - mu) * g(mu)
    if variant == "matched":
        return lam + eq.kappa(2 * nu - mu - 1) * g(mu + 1)
    if variant != "printed":
        raise InvalidInputError(f"unknown root-condition variant {variant!r}")
    return lam + eq.kappa(2 * nu - mu + 1) * g(mu + 1)


def lambda_for_root(eq: EquationSpec, form, nu: float, mu: float | None = None, variant: str = "printed") -> complex:
    """The ``lam`` that satisfies the spectral condition (the condition is ``lam + const``)."""
    return eq.lam - root_condition(eq, form, nu, mu, variant)


def _root_fn(eq, form, mu, variant):
    def f(nu):
        return root_condition(eq, form, nu, mu, variant)

    return f


def spectral_roots(
    eq: EquationSpec,
    form,
    mu: float | None = None,
    bracket: tuple[float, float] = (-16.0, 16.0),
    step: float = 1 / 32,
    variant: str = "printed",
    xtol: float = 1e-12,
) -> list[float]:
    """All ``nu`` in ``bracket`` solving the spectral condition, located by a scan and bisection.

    Diagonal forms tie ``mu`` to ``nu``; other forms keep ``mu`` fixed.
    """
    form = as_form(form)
    if abs(complex(eq.lam).imag) > 0:
        raise InvalidInputError("spectral_root needs a real lambda")
    if not LAYOUT[form].diagonal and mu is None:
        raise InvalidInputError(f"form {form.value} needs mu")
    f = _root_fn(eq, form, None if LAYOUT[form].diagonal else mu, variant)
    lo, hi = bracket
    n = int(round((hi - lo) / step))
    grid = [lo + k * step for k in range(n + 1)]
    profile = []
    for v in grid:
        try:
            val = complex(f(v)).real
        except (ZeroDivisionError, ArithmeticError):
            val = math.nan
        profile.append((v, val))
    roots = []
    for (v0, f0), (v1, f1) in zip(profile, profile[1:]):
        if f0 == 0:
            roots.append(v0)
            continue
        if not (math.isfinite(f0) and math.isfinite(f1)) or f0 * f1 > 0 or f1 == 0:
            continue
        a, b, fa = v0, v1, f0
        while b - a > xtol:
            m = 0.5 * (a + b)
            fm = complex(f(m)).real
            if fm == 0:
                a = b = m
                break
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    if profile and profile[-1][1] == 0:
        roots.append(profile[-1][0])
    snapped = []
    for r in roots:
        k = round(r)
        snapped.append(float(k) if abs(r - k) <= 1e-9 else r)
    if not snapped:
        raise NoRootError(f"no sign change of the {form.value} condition on [{lo}, {hi}]", profile=profile)
    return snapped


def spectral_root(
    eq: EquationSpec,
    form,
    mu: float | None = None,
    bracket: tuple[float, float] = (-16.0, 16.0),
    near: float = 0.0,
    variant: str = "printed",
) -> float:
    """The root of :func:`spectral_roots` closest to ``near``."""
    roots = spectral_roots(eq, form, mu, bracket, variant=variant)
    return min(roots, key=lambda r: (abs(r - near), r))


# solution specs


@dataclass(frozen=True)
class SolutionSpec:
    """A sum form with its summation range and weights.

    ``weight`` is the Pearson weight of index ``nu`` used inside the sum (forward for
    the reciprocal kernels, backward for the power kernels); ``outer`` is the forward
    weight of index ``nu - mu`` that divides the weighted forms.
    """

    form: SolutionForm
    nu: float
    mu: float
    a: complex
    b: complex
    weight: PearsonWeight
    outer: PearsonWeight | None = None

    def __post_init__(self):
        object.__setattr__(self, "form", as_form(self.form))
        n = self.b - self.a
        k = round(complex(n).real)
        if abs(n - k) > 1e-9 or k < 0:
            raise InvalidInputError("b - a must be a nonnegative integer")
        if LAYOUT[self.form].diagonal and self.mu != self.nu:
            raise InvalidInputError(f"form {self.form.value} requires mu == nu")
        if LAYOUT[self.form].outer and self.outer is None:
            raise InvalidInputError(f"form {self.form.value} needs an outer weight")

    @property
    def layout(self) -> FormLayout:
        return LAYOUT[self.form]

    @property
    def d(self) -> float:
        return self.nu - self.mu

    @property
    def count(self) -> int:
        return int(round(complex(self.b - self.a).real))

    def nodes(self) -> list[complex]:
        return [self.a + k for k in range(self.count)]


def make_solution(
    eq: EquationSpec,
    form,
    nu: float,
    mu: float | None,
    a,
    b,
    z_anchor=None,
) -> SolutionSpec:
    """Build a :class:`SolutionSpec` with weights anchored at ``a`` (and ``z_anchor`` for the outer weight)."""
    form = as_form(form)
    mu = _resolve_mu(form, nu, mu)
    lay = LAYOUT[form]
    ratio = pearson_ratio_backward(eq, nu) if lay.backward else pearson_ratio(eq, nu)
    weight = PearsonWeight(complex(a), ratio, nu)
    outer = None
    if lay.outer:
        if z_anchor is None:
            raise InvalidInputError(f"form {form.value} needs z_anchor for its outer weight")
        outer = PearsonWeight(complex(z_anchor), pearson_ratio(eq, nu - mu), nu - mu)
    return SolutionSpec(form, nu, mu, complex(a), complex(b), weight, outer)


def truncated_instance(
    lat: LatticeSpec,
    form,
    nu: float,
    mu: float | None,
    a,
    n: int,
    seed: int = 0,
    scale: float = 1.0,
) -> EquationSpec:
    """A random equation whose weight is cut off at both ends of ``a .. a+n-1``.

    ``sigma_tilde`` (linear and quadratic parts) and the slope of ``tau_tilde`` are
    drawn at random; the two constant terms are then solved from two linear
    conditions that make ``sigma rho`` vanish just outside the summation range.
    Forward weights need ``sigma(a) = 0`` and ``S(b-1+nu) = 0``; backward weights need
    ``sigma(b-1) = 0`` and ``S(a+nu) = 0``, where ``S(w) = sigma(w) + tau(w) dx_1(w)``.
    ``lam`` is set to the root of the form's spectral condition.
    """
    form = as_form(form)
    mu = _resolve_mu(form, nu, mu)
    if n < 1:
        raise InvalidInputError("need at least one summation node")
    rng = np.random.default_rng(seed)
    s1, s2, t1 = scale * rng.normal(size=3)
    b = a + n
    if LAYOUT[form].backward:
        s_sig, w_s = b - 1, a + nu
    else:
        s_sig, w_s = a, b - 1 + nu
    X, N = lat.x(s_sig), lat.nabla(1, s_sig)
    X2, N2 = lat.x(w_s), lat.nabla(1, w_s)
    A = np.array([[1, -0.5 * N], [1, 0.5 * N2]], dtype=complex)
    rhs = -np.array(
        [
            s1 * X + s2 * X * X - 0.5 * t1 * X * N,
            s1 * X2 + s2 * X2 * X2 + 0.5 * t1 * X2 * N2,
        ],
        dtype=complex,
    )
    s0, t0 = np.linalg.solve(A, rhs)
    s0 = s0.real if abs(s0.imag) < 1e-14 else s0
    t0 = t0.real if abs(t0.imag) < 1e-14 else t0
    eq = EquationSpec(lat, (s0, s1, s2), (t0, t1), 0.0)
    return eq.with_lambda(lambda_for_root(eq, form, nu, mu))


# evaluation


def _kernel(spec: SolutionSpec, lat: LatticeSpec, s, z, shift: int = 0, variant_mu: float | None = None) -> complex:
    """Kernel of the sum; ``variant_mu`` evaluates the same family at another exponent parameter."""
    nu = spec.nu
    mu = spec.mu if variant_mu is None else variant_mu
    kind = spec.layout.kernel
    if kind == "lowered":
        p = genpow(lat, nu, mu - 1, s, z - 1)
    elif kind == "raised":
        p = genpow(lat, nu, mu + 1, s, z)
    else:
        return genpow(lat, nu, mu + 1, s, z)
    if abs(p) < GUARD:
        raise PoleError(f"generalized power vanishes at s={s}, z={z}", index=_step_offset(s, spec.a))
    return 1 / p


def _weighted_sum(spec: SolutionSpec, eq: EquationSpec, z, kernel: Callable, measure_shift: float = 1.0) -> complex:
    """``sum rho_nu(s) dx_{nu+shift}(s) kernel(s)`` with the weight scaled out in the log domain."""
    nodes = spec.nodes()
    if not nodes:
        return 0j
    logs = [spec.weight.log_eval(s) for s in nodes]
    top = max(l.real for l in logs)
    terms = []
    for s, l in zip(nodes, logs):
        terms.append(cmath.exp(l - top) * eq.lat.nabla(spec.nu + measure_shift, s) * kernel(s))
    total = csum(terms)
    log_scale = top
    if spec.outer is not None:
        log_scale = log_scale - spec.outer.log_eval(z)
    if total == 0:
        return 0j
    return total * cmath.exp(log_scale)


def solution_sum(spec: SolutionSpec, eq: EquationSpec, z, strict: bool = True, tol: float = ROOT_TOL) -> complex:
    """Value of the sum form at ``z``.

    With ``strict`` the spectral condition is checked first and a violation raises
    :class:`PreconditionError`.
    """
    if strict:
        r = root_condition(eq, spec.form, spec.nu, spec.mu)
        if abs(r) > tol * max(1.0, abs(eq.lam)):
            raise PreconditionError(f"spectral condition of {spec.form.value} violated by {abs(r):.3e}")
    return _weighted_sum(spec, eq, z, lambda s: _kernel(spec, eq.lat, s, z))


def solution_fn(spec: SolutionSpec, eq: EquationSpec, strict: bool = True) -> ScalarFn:
    if strict:
        r = root_condition(eq, spec.form, spec.nu, spec.mu)
        if abs(r) > ROOT_TOL * max(1.0, abs(eq.lam)):
            raise PreconditionError(f"spectral condition of {spec.form.value} violated by {abs(r):.3e}")
    return lambda z: solution_sum(spec, eq, z, strict=False)


def operator_parts(spec: SolutionSpec, eq: EquationSpec, y: ScalarFn, lam: complex | None = None):
    """``z -> (second-order term, first-order term, zeroth-order term)`` of the form's operator."""
    lat = eq.lat
    d = spec.d
    lam = eq.lam if lam is None else lam
    second = delta_nu(nabla_nu(y, lat, d), lat, d - 1)
    back = nabla_nu(y, lat, d)
    fwd = delta_nu(y, lat, d)
    op = spec.layout.operator
    if op == "M":

        def parts(z):
            return eq.sigma(z) * second(z), -eq.tau_nu(d, z) * back(z), lam * y(z)

    elif op == "adjoint":
        lam_star = lam - eq.kappa(2 * d - 1)

        def parts(z):
            return eq.sigma(z + 1) * second(z), -eq.tau_nu(d - 2, z + 1) * back(z), lam_star * y(z)

    else:

        def parts(z):
            return eq.sigma(z) * second(z), eq.tau_nu(d, z) * fwd(z), lam * y(z)

    return parts


def form_operator(spec: SolutionSpec, eq: EquationSpec, y: ScalarFn, lam: complex | None = None) -> ScalarFn:
    parts = operator_parts(spec, eq, y, lam)
    return lambda z: sum(parts(z))


def solution_residual(spec: SolutionSpec, eq: EquationSpec, zs: Sequence[complex], lam: complex | None = None) -> float:
    """``max |Op[y](z)| / max |y(z)|`` over ``zs``."""
    y = solution_fn(spec, eq, strict=False)
    op = form_operator(spec, eq, y, lam)
    ys = [abs(y(z)) for z in zs]
    res = [abs(op(z)) for z in zs]
    return float(max(res) / max(max(ys), 1e-300))


def solve_on_grid(spec: SolutionSpec, eq: EquationSpec, zs: Sequence[complex]) -> list[tuple[complex, complex, float]]:
    """``(z, y(z), |Op[y](z)| / max|y|)`` for each grid point; empty input gives an empty list.

    Every value is computed before anything is returned, so errors never leave partial output.
    """
    zs = [complex(z) for z in zs]
    if not zs:
        return []
    y = solution_fn(spec, eq)
    op = form_operator(spec, eq, y)
    ys = [y(z) for z in zs]
    ops = [op(z) for z in zs]
    ymax = max(max(abs(v) for v in ys), 1e-300)
    return [(z, v, float(abs(o) / ymax)) for z, v, o in zip(zs, ys, ops)]


# side conditions


def _default_points(spec: SolutionSpec, count: int = 5) -> list[complex]:
    base = spec.outer.anchor if spec.outer is not None else spec.a + 0.73
    return [base + k for k in range(count)]


def _edge_sigma_rho(spec: SolutionSpec, eq: EquationSpec, s) -> complex:
    """``sigma(s) rho_nu(s)`` including the cut-off points ``b`` (forward) and ``a-1`` (backward)."""
    lat = eq.lat
    nu = spec.nu

    def S(t):
        return eq.sigma(t) + eq.tau_nu(nu, t) * lat.nabla(nu + 1, t)

    k = _step_offset(s, spec.a)
    n = spec.count
    if spec.layout.backward and k == -1:
        return spec.weight.value(spec.a) * S(spec.a)
    if not spec.layout.backward and k == n:
        last = spec.a + n - 1
        return spec.weight.value(last) * S(last)
    return eq.sigma(s) * spec.weight.value(s)


def boundary_function(spec: SolutionSpec, eq: EquationSpec) -> tuple[Callable, float, tuple[complex, complex]]:
    """``(psi, c, (lo, hi))`` with ``Op[y](z) = c [psi(hi, z) - psi(lo, z)]`` (divided by the outer weight)."""
    lat = eq.lat
    nu, mu = spec.nu, spec.mu
    kind = spec.layout.kernel
    g = lat.gamma
    if kind == "lowered":

        def psi(s, z):
            return _edge_sigma_rho(spec, eq, s) / genpow(lat, nu - 1, mu, s, z)

        return psi, -g(mu - 1), (spec.a, spec.b)
    if kind == "raised":

        def psi(s, z):
            return _edge_sigma_rho(spec, eq, s) / genpow(lat, nu - 1, mu + 2, s, z + 1)

        return psi, -g(mu + 1), (spec.a, spec.b)

    def psi(s, z):
        return _edge_sigma_rho(spec, eq, s) * genpow(lat, nu + 1, mu, s, z - 1)

    return psi, g(mu + 1), (spec.a - 1, spec.b - 1)


def pearson_residual(eq: EquationSpec, weight: PearsonWeight, nu: float, points: Sequence[complex], backward: bool = False) -> float:
    """Relative residual of the forward (``Delta(sigma rho)/dx_{nu+1} = tau_nu rho``) or backward Pearson equation."""
    lat = eq.lat
    worst = 0.0
    for s in points:
        t = eq.tau_nu(nu, s)
        dx = lat.nabla(nu + 1, s)
        if backward:
            r = weight.relative(s - 1, s)
            lhs = (eq.sigma(s) - eq.sigma(s - 1) * r) / dx
            scale = (abs(eq.sigma(s)) + abs(eq.sigma(s - 1) * r)) / abs(dx) + abs(t)
            worst = max(worst, abs(lhs + t) / max(scale, 1e-300))
        else:
            r = weight.relative(s + 1, s)
            lhs = (eq.sigma(s + 1) * r - eq.sigma(s)) / dx
            scale = (abs(eq.sigma(s + 1) * r) + abs(eq.sigma(s))) / abs(dx) + abs(t)
            worst = max(worst, abs(lhs - t) / max(scale, 1e-300))
    return worst


def _phi(spec: SolutionSpec, eq: EquationSpec, z, mu_param: float, measure_shift: float) -> complex:
    return _weighted_sum(spec, eq, z, lambda s: _kernel(spec, eq.lat, s, z, variant_mu=mu_param), measure_shift)


def derivative_rule_residual(spec: SolutionSpec, eq: EquationSpec, zs: Sequence[complex], measure_shift: float = 1.0) -> float:
    """Residual of the difference-derivative rule of the kernel family ``phi_mu``.

    Reciprocal kernels obey ``nabla phi_mu / nabla x_{nu-mu} = g phi_{mu+1}`` with
    ``g = gamma(mu-1)`` (lowered) or ``gamma(mu+1)`` (raised); power kernels obey
    ``Delta phi_mu / Delta x_{nu-mu} = -gamma(mu+1) phi_{mu-1}``.  ``measure_shift``
    picks ``dx_{nu+1}(s)`` (``1``) or ``dx_{nu-1}(s)`` (``-1``) inside ``phi``.
    """
    lat = eq.lat
    nu, mu = spec.nu, spec.mu
    d = nu - mu
    kind = spec.layout.kernel
    probe = spec if spec.outer is None else _strip_outer(spec)
    worst = 0.0
    for z in zs:
        if kind == "power":
            lhs = (_phi(probe, eq, z + 1, mu, measure_shift) - _phi(probe, eq, z, mu, measure_shift)) / lat.delta(d, z)
            rhs = -lat.gamma(mu + 1) * _phi(probe, eq, z, mu - 1, measure_shift)
        else:
            lhs = (_phi(probe, eq, z, mu, measure_shift) - _phi(probe, eq, z - 1, mu, measure_shift)) / lat.nabla(d, z)
            g = lat.gamma(mu - 1) if kind == "lowered" else lat.gamma(mu + 1)
            rhs = g * _phi(probe, eq, z, mu + 1, measure_shift)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return worst


def _strip_outer(spec: SolutionSpec) -> SolutionSpec:
    """The same sum without the outer weight (the kernel family lives on the inner sum)."""
    inner = SolutionForm.RECIPROCAL_RAISED if not spec.layout.diagonal else SolutionForm.RECIPROCAL_DIAGONAL
    return SolutionSpec(inner, spec.nu, spec.mu, spec.a, spec.b, spec.weight, None)


def check_side_conditions(
    spec: SolutionSpec,
    eq: EquationSpec,
    zs: Sequence[complex] | None = None,
    root_tol: float = ROOT_TOL,
) -> VerificationReport:
    """Report on the four solution conditions and the boundary identity.

    * weights: Pearson residuals of the inner (and outer) weight,
    * spectral: the root condition,
    * derivative rule: for both measures ``dx_{nu+1}`` and ``dx_{nu-1}``,
    * boundary: ``psi`` equal at both ends,
    * identity: ``Op[y](z) = c [psi(hi, z) - psi(lo, z)]``.
    """
    zs = list(zs) if zs is not None else _default_points(spec)
    lat = eq.lat
    rep = VerificationReport()
    name = spec.form.value
    n = spec.count
    back = spec.layout.backward
    pts = [spec.a + k for k in (range(1, n) if back else range(n - 1))]
    res_i = pearson_residual(eq, spec.weight, spec.nu, pts, backward=back) if pts else 0.0
    note = f"{'backward' if back else 'forward'} weight of index {spec.nu} on {len(pts)} points"
    if spec.outer is not None:
        res_i = max(res_i, pearson_residual(eq, spec.outer, spec.d, zs))
        note += f"; outer weight of index {spec.d}"
    rep.add("solution.pearson", "weight Pearson equations", res_i, 1e-9, note)

    r = root_condition(eq, spec.form, spec.nu, spec.mu)
    rep.add("solution.spectral", "spectral condition", abs(r) / max(1.0, abs(eq.lam)), root_tol, f"form {name}")

    try:
        d_main = derivative_rule_residual(spec, eq, zs, 1.0)
        d_alt = derivative_rule_residual(spec, eq, zs, -1.0)
        rep.add("solution.derivative_rule", "kernel difference-derivative rule", d_main, 1e-8, "measure dx_{nu+1}(s)")
        rep.add("solution.derivative_rule_alt", "kernel difference-derivative rule", d_alt, 1e-8, "measure dx_{nu-1}(s)")
    except (PoleError, ZeroDivisionError) as exc:
        rep.add("solution.derivative_rule", "kernel difference-derivative rule", math.inf, 1e-8, f"not evaluable: {exc}")

    psi, c, (lo, hi) = boundary_function(spec, eq)
    worst_iv, worst_id = 0.0, 0.0
    y = solution_fn(spec, eq, strict=False)
    parts = operator_parts(spec, eq, y)
    for z in zs:
        interior = [psi(lo + k, z) for k in range(n + 1)]
        scale = max(max(abs(v) for v in interior), 1e-300)
        jump = interior[-1] - interior[0]
        worst_iv = max(worst_iv, abs(jump) / scale)
        p = parts(z)
        rhs = c * jump
        if spec.outer is not None:
            rhs = rhs / spec.outer.value(z)
        worst_id = max(worst_id, abs(sum(p) - rhs) / max(sum(abs(t) for t in p), abs(rhs), 1e-300))
    rep.add("solution.boundary", "boundary function equal at both ends", worst_iv, 1e-9, f"psi at {lo} and {hi}")
    rep.add("solution.boundary_identity", "operator equals boundary jump", worst_id, 1e-9, f"c={c:.6g}")
    return rep


# proof-level identities


def _product_chain(ratio: ScalarFn, anchor, lo: int, hi: int) -> dict[int, complex]:
    """Plain products ``rho(anchor + k) / rho(anchor)`` for ``lo <= k <= hi``; zeros are allowed."""
    vals = {0: 1 + 0j}
    for k in range(hi):
        vals[k + 1] = vals[k] * ratio(anchor + k)
    for k in range(0, lo, -1):
        vals[k - 1] = vals[k] / ratio(anchor + k - 1)
    return vals


def telescoping_residual(eq: EquationSpec, nu: float, mu: int, z, backward: bool, s0=0.4, npts: int = 12) -> float:
    """Pointwise identity behind the sum forms.

    Forward weights: ``Delta_s[sigma rho / P^{nu-1}_mu(s, z)] = -w(s) Q(s) / P^nu_{mu+1}(s, z)``.
    Backward weights: ``nabla_s[sigma rho P^{nu+1}_mu(s, z-1)] = w(s) P^nu_{mu-1}(s, z-1) Q(s)``.
    Here ``w = rho dx_{nu+1}(s)`` and ``Q(s) = gamma(mu) sigma(s) - tau_nu(s) [x_{nu-mu}(s) - x_{nu-mu}(z)]``.
    """
    lat = eq.lat
    ratio = pearson_ratio_backward(eq, nu) if backward else pearson_ratio(eq, nu)
    rho = _product_chain(ratio, s0, -1, npts)

    def Q(s):
        return lat.gamma(mu) * eq.sigma(s) - eq.tau_nu(nu, s) * (lat.xs(nu - mu, s) - lat.xs(nu - mu, z))

    worst = 0.0
    for k in range(npts):
        s = s0 + k
        w = rho[k] * lat.nabla(nu + 1, s)
        if backward:

            def psi(j):
                t = s0 + j
                return eq.sigma(t) * rho[j] * genpow(lat, nu + 1, mu, t, z - 1)

            lhs = psi(k) - psi(k - 1)
            rhs = w * genpow(lat, nu, mu - 1, s, z - 1) * Q(s)
        else:

            def psi(j):
                t = s0 + j
                return eq.sigma(t) * rho[j] / genpow(lat, nu - 1, mu, t, z)

            lhs = psi(k + 1) - psi(k)
            rhs = -w * Q(s) / genpow(lat, nu, mu + 1, s, z)
        scale = max(abs(lhs), abs(rhs), abs(psi(k)), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def summand_telescoping_check(
    spec: SolutionSpec | None,
    eq: EquationSpec,
    z,
    nu: float | None = None,
    mu: int | None = None,
    backward: bool | None = None,
    npts: int = 12,
    tol: float = 1e-9,
) -> VerificationReport:
    """Telescoping identity for the summand and the three-term decomposition of ``Q``.

    Parameters default to those of ``spec``; the weight direction follows the kernel
    (forward for reciprocal kernels, backward for power kernels).
    """
    if spec is not None:
        nu = spec.nu if nu is None else nu
        mu = spec.mu if mu is None else mu
        backward = spec.layout.backward if backward is None else backward
    if nu is None or mu is None or backward is None:
        raise InvalidInputError("nu, mu and the weight direction are required without a spec")
    s0 = spec.a if spec is not None else 0.4
    rep = VerificationReport()
    res = telescoping_residual(eq, nu, mu, z, backward, s0, npts)
    kind = "nabla" if backward else "delta"
    rep.add("telescoping.summand", "summand telescoping identity", res, tol, f"{kind} form, nu={nu}, mu={mu}, {npts} points")
    dec = quadratic_decomposition(eq, nu, mu, z)
    lat = eq.lat
    a_ref = lat.gamma(mu) * eq.sigma(z)
    b_ref = -eq.tau_nu(nu - mu, z)
    rep.add("decomposition.A", "Q decomposition constant term", abs(dec.A - a_ref) / max(1.0, abs(a_ref)), tol)
    rep.add("decomposition.B", "Q decomposition linear term", abs(dec.B - b_ref) / max(1.0, abs(b_ref)), tol)
    c_main = -eq.kappa(2 * nu - mu + 1)
    c_alt = -eq.kappa(mu - 2 * nu + 1)
    dev_alt = abs(dec.C - c_alt) / max(1.0, abs(c_alt))
    rep.add(
        "decomposition.C",
        "Q decomposition quadratic term",
        abs(dec.C - c_main) / max(1.0, abs(c_main)),
        tol,
        f"matches -kappa_(2nu-mu+1); deviation from -kappa_(mu-2nu+1) is {dev_alt:.3e}",
    )
    return rep


def weight_product_check(eq: EquationSpec, nu: float, grid: Sequence[complex], tol: float = 1e-9) -> VerificationReport:
    """Forward and backward weights of index ``nu`` are reciprocal up to ``sigma`` factors.

    ``sigma(z) rho_fwd(z) sigma(z-1) rho_bwd(z-1)`` is constant along the grid; on
    symmetric quadratic lattices the backward and forward ratios also match their
    reflected forms ``sigma(z)/sigma(-z-1-nu)`` and ``sigma(-z-nu)/sigma(z+1)``.
    """
    pts = [complex(z) for z in grid]
    if len(pts) < 2:
        raise InvalidInputError("grid needs at least two points")
    z0 = pts[0]
    fwd = PearsonWeight(z0, pearson_ratio(eq, nu), nu)
    bwd = PearsonWeight(z0 - 1, pearson_ratio_backward(eq, nu), nu)
    logs = []
    for z in pts:
        sz, sm = eq.sigma(z), eq.sigma(z - 1)
        if sz == 0 or sm == 0:
            raise PoleError(f"sigma vanishes next to z={z}")
        logs.append(cmath.log(sz) + fwd.log_eval(z) + cmath.log(sm) + bwd.log_eval(z - 1))
    ref = logs[0]
    vals = [cmath.exp(l - ref) for l in logs]
    rep = VerificationReport()
    rep.add("weights.product", "forward/backward weight product", spread(vals), tol, f"nu={nu}, {len(pts)} points")
    if eq.symmetric:
        rb, rf = pearson_ratio_backward(eq, nu), pearson_ratio(eq, nu)
        refl_b = pearson_ratio_reflected(eq, nu, backward=True)
        refl_f = pearson_ratio_reflected(eq, nu)
        db = max(abs(rb(z) - refl_b(z)) / max(abs(rb(z)), 1e-300) for z in pts)
        df = max(abs(rf(z) - refl_f(z)) / max(abs(rf(z)), 1e-300) for z in pts)
        rep.add("weights.reflected_backward", "backward ratio sigma(z)/sigma(-z-1-nu)", db, tol)
        rep.add("weights.reflected_forward", "forward ratio sigma(-z-nu)/sigma(z+1)", df, tol)
    return rep
