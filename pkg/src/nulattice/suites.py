"""Verification suites: each runs a family of checks and returns a report."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import adjoint as adj_mod
from .diffops import GridSpec, check_difference_rules, delta_iter
from .errors import InvalidInputError
from .fixtures import ADJOINT_PAIRS, RACAH_ROOTS
from .hypeq import (
    EquationSpec,
    PearsonWeight,
    certify_linearity,
    derive_kth,
    kappa_closed_form,
    lambda_n,
    lambda_variants,
    mu_k,
    pearson_ratio,
    rho_k_product,
    rodrigues_check,
    rodrigues_eval,
)
from .lattice import check_lattice_identities
from .numerics import cheb_probes, spread
from .report import VerificationReport, guarded
from .solutions import racah
from .solutions.sums import (
    LAYOUT,
    SolutionForm,
    check_side_conditions,
    form_operator,
    make_solution,
    solution_fn,
    solution_residual,
    spectral_root,
    summand_telescoping_check,
    truncated_instance,
    weight_product_check,
)


@dataclass
class SuiteContext:
    """Inputs shared by all suites."""

    eq: EquationSpec
    nu: float = 0.8
    mu: float = 2.0
    seed: int = 0
    pairs: tuple = ADJOINT_PAIRS
    faults: dict = field(default_factory=dict)


def _merge_max(rep: VerificationReport, parts: list[VerificationReport], notes: str = "") -> None:
    """Add one entry per check id holding the worst residual across ``parts``."""
    worst: dict[str, tuple] = {}
    for p in parts:
        for e in p.entries:
            prev = worst.get(e.check_id)
            if prev is None or not e.max_residual <= prev[0].max_residual:
                worst[e.check_id] = (e, p)
    for cid, (e, _) in worst.items():
        rep.add(cid, e.paper_anchor, e.max_residual, e.tolerance, "; ".join(x for x in (e.notes, notes) if x))


def lattice_suite(ctx: SuiteContext) -> VerificationReport:
    lat = ctx.eq.lat
    rep = check_lattice_identities(lat, GridSpec(-31.7, 64), tol=1e-12)
    par = 0.0
    for mu in (0.5, 1.0, 1.5, 2.0, 3.0):
        par = max(par, abs(lat.gamma(-mu) + lat.gamma(mu)), abs(lat.alpha(-mu) - lat.alpha(mu)))
    rep.add("lattice.parity", "gamma odd, alpha even", par, 1e-12)
    shift = 0.0
    for k in (-2, -1, 1, 3):
        for s in (0.3, 1.7):
            a, b = lat.xs(0.5, s + k), lat.xs(0.5 + 2 * k, s)
            shift = max(shift, abs(a - b) / max(1.0, abs(a)))
    rep.add("lattice.shift", "x_nu(s+k) = x_{nu+2k}(s)", shift, 1e-12)
    return rep


def diffops_suite(ctx: SuiteContext) -> VerificationReport:
    lat = ctx.eq.lat
    rng = np.random.default_rng(ctx.seed)
    parts = []
    for nu in (-1.0, 0.0, 0.5, 1.0):
        cf = rng.normal(size=4)
        cg = rng.normal(size=3) * 0.3

        def f(s, cf=cf):
            return cf[0] + cf[1] * s + cf[2] * s * s + cf[3] * s**3

        def g(s, cg=cg):
            return 3.0 + cg[0] * s + cg[1] * s * s + cg[2] * 0.1 * s**3

        pts = [0.37 + k for k in range(8)]
        parts.append(check_difference_rules(lat, nu, f, g, pts, tol=1e-12))
    rep = VerificationReport()
    _merge_max(rep, parts, "nu in [-1, 0, 0.5, 1]")
    sq = delta_iter(lambda s: lat.xs(0, s) ** 2, lat, 0.0, 2)
    vals = [sq(0.31 + k) for k in range(5)]
    rep.add("diffops.degree_drop", "second difference of x^2 is constant", spread(vals), 1e-10)
    return rep


def hypeq_suite(ctx: SuiteContext) -> VerificationReport:
    eq = ctx.eq
    lat = eq.lat
    rep = certify_linearity(eq)
    kap = max(
        abs(eq.kappa(m) - kappa_closed_form(eq, m)) / max(1.0, abs(kappa_closed_form(eq, m)))
        for m in (-3.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.5)
    )
    rep.add("hypeq.kappa_closed_form", "kappa slope vs closed form", kap, 1e-10, f"lattice {lat.kind}")
    lam_dev = mu0 = 0.0
    for n in range(1, 7):
        v = lambda_variants(eq, n)
        lam_dev = max(lam_dev, abs(v["sum"] - v["gamma_kappa"]) / max(1.0, abs(v["sum"])))
        mu0 = max(mu0, abs(mu_k(eq.with_lambda(v["sum"]), n)))
    rep.add("hypeq.lambda_n", "lambda_n sum vs -gamma(n) kappa_n", lam_dev, 1e-10, "n=1..6")
    rep.add("hypeq.mu_n_zero", "mu_n vanishes at lambda_n", mu0, 1e-9, "n=1..6")
    sig_dev = slope_dev = 0.0
    probes = cheb_probes(10, 0.2, 1.8)
    for k in range(0, 5):
        dc = derive_kth(eq, k)
        for s in probes:
            xk = lat.xs(k, s)
            st = dc.sigma_tilde_k[0] + dc.sigma_tilde_k[1] * xk + dc.sigma_tilde_k[2] * xk * xk
            tt = dc.tau_tilde_k[0] + dc.tau_tilde_k[1] * xk
            corr = 0.5 * tt * lat.nabla(k + 1, s)
            # the two terms cancel on stretched lattices, so scale by their size
            scale = max(1.0, abs(st) + abs(corr))
            sig_dev = max(sig_dev, abs(st - corr - eq.sigma(s)) / scale)
        ref = eq.kappa(2 * k + 1)
        slope_dev = max(slope_dev, abs(dc.tau_tilde_k[1] - ref) / max(1.0, abs(ref)))
    rep.add("hypeq.derived_sigma", "derived equations share sigma", sig_dev, 1e-10, "k=0..4")
    rep.add("hypeq.derived_slope", "derived tau slope = kappa_{2k+1}", slope_dev, 1e-9, "k=0..4")
    # rho_k is the forward weight of index k
    k = 3
    rho = PearsonWeight(0.4, pearson_ratio(eq, 0.0))
    worst = 0.0
    for s in [0.4 + j for j in range(6)]:
        r0, r1 = rho_k_product(eq, rho, k, s), rho_k_product(eq, rho, k, s + 1)
        lhs = (eq.sigma(s + 1) * r1 - eq.sigma(s) * r0) / lat.nabla(k + 1, s)
        rhs = eq.tau_nu(k, s) * r0
        scale = (abs(eq.sigma(s + 1) * r1) + abs(eq.sigma(s) * r0)) / abs(lat.nabla(k + 1, s)) + abs(rhs)
        worst = max(worst, abs(lhs - rhs) / scale)
    rep.add("hypeq.rho_k_pearson", "rho_k solves the index-k Pearson equation", worst, 1e-9, f"k={k}")
    parts = [rodrigues_check(eq, n, [0.37 + 0.29 * j for j in range(10)]) for n in range(5)]
    _merge_max(rep, parts, "n=0..4")
    return rep


def adjoint_suite(ctx: SuiteContext) -> VerificationReport:
    eq = ctx.eq
    rep = VerificationReport()
    scale = ctx.faults.get("tau_star_scale")
    for nu, mu in ctx.pairs:
        simp = adj_mod.adjoint_simplified(eq, nu, mu)
        if scale is not None:
            simp = adj_mod.perturbed(simp, complex(scale))
        note = f"nu={nu}, mu={mu}"
        parts = [
            adj_mod.compare_adjoints(eq, nu, mu, simplified=simp),
            adj_mod.compare_operator_forms(eq, nu, mu, adj=simp),
            adj_mod.verify_adjointness(eq, nu, mu, 0.4, 8.4, trials=20, seed=ctx.seed, adj=simp),
            adj_mod.conjugation_check(eq, nu, mu, adj=simp),
            guarded("dual.error", "dual recovery", lambda: adj_mod.dual_recover(simp, eq, nu, mu)),
            guarded(
                "adjoint.type_error",
                "adjoint hypergeometric type",
                lambda: adj_mod.certify_hypergeometric_type(simp, eq, nu, mu),
            ),
        ]
        for p in parts:
            for e in p.entries:
                notes = e.notes if note in e.notes else "; ".join(x for x in (e.notes, note) if x)
                rep.add(e.check_id, e.paper_anchor, e.max_residual, e.tolerance, notes)
    return rep


def _form_params(form: SolutionForm, lat) -> list[tuple[float, float]]:
    if LAYOUT[form].diagonal:
        return [(2.0, 2.0)] + ([(1.3, 1.3)] if lat.kind == "quadratic" else [])
    return [(1.3, 2.0), (0.6, 1.0)]


def solutions_suite(ctx: SuiteContext) -> VerificationReport:
    eq = ctx.eq
    lat = eq.lat
    rep = VerificationReport()
    a, n = 0.4, 5
    zs = [2.13 + k for k in range(5)]
    for form in SolutionForm:
        for nu, mu in _form_params(form, lat):
            inst = truncated_instance(lat, form, nu, mu, a, n, seed=ctx.seed)
            spec = make_solution(inst, form, nu, mu, a, a + n, z_anchor=zs[0])
            note = f"form {form.value}, nu={nu}, mu={mu}"
            for e in check_side_conditions(spec, inst, zs).entries:
                rep.add(e.check_id, e.paper_anchor, e.max_residual, e.tolerance, "; ".join(x for x in (e.notes, note) if x))
            rep.add("solutions.residual", "sum solves its equation", solution_residual(spec, inst, zs), 1e-7, note)
    # negative control: a perturbed lambda must be visible in the residual
    form = SolutionForm.POWER_RAISED
    inst = truncated_instance(lat, form, 1.3, 2.0, a, n, seed=ctx.seed)
    spec = make_solution(inst, form, 1.3, 2.0, a, a + n)
    bad = solution_residual(spec, inst, zs, lam=inst.lam * 1.1 + (0.1 if inst.lam == 0 else 0))
    rep.add("solutions.sensitivity", "perturbed lambda is detected", 1e-3 / max(bad, 1e-300), 1.0, "1e-3 over the residual at 1.1 lambda")
    for mu in (1, 2, 3):
        for back in (False, True):
            for e in summand_telescoping_check(None, eq, 2.37, nu=ctx.nu, mu=mu, backward=back).entries:
                rep.add(e.check_id, e.paper_anchor, e.max_residual, e.tolerance, f"{e.notes}; mu={mu}".strip("; "))
    rep.extend(weight_product_check(eq, ctx.nu, [0.37 + k for k in range(10)]))
    root_dev = 0.0
    for k in (1, 2, 3):
        e2 = eq.with_lambda(lambda_n(eq, k))
        root_dev = max(root_dev, abs(spectral_root(e2, SolutionForm.WEIGHTED_RECIPROCAL_DIAGONAL, near=k) - k))
    rep.add("solutions.spectral_root", "spectral root recovers n from lambda_n", root_dev, 1e-9, "n=1..3")
    return rep


def racah_suite(ctx: SuiteContext, degrees=(1, 2, 3)) -> VerificationReport:
    roots = RACAH_ROOTS
    note = "fixture roots"
    if ctx.eq.sigma_roots is not None and len(ctx.eq.sigma_roots) == 4:
        r = ctx.eq.sigma_roots
        if abs(r[0] + r[1] - 1) < 1e-12:
            roots, note = r, "configured roots"
    eq = racah.racah_equation(roots)
    rep = VerificationReport()
    zs = [2.4 + 0.37 * k for k in range(10)]
    for n in degrees:
        lam = lambda_n(eq, n)
        e = eq.with_lambda(lam)

        def y(z, n=n):
            return racah.racah_polynomial(roots, n, z)

        spec = make_solution(e, SolutionForm.POWER_DIAGONAL, n - 1, None, -roots[0] - (n - 1), roots[1] + 1)
        ys = np.array([y(z) for z in zs])
        ymax = float(np.abs(ys).max())
        res = max(abs(form_operator(spec, e, y)(z)) for z in zs) / ymax
        bad = max(abs(form_operator(spec, e, y, lam * 1.1)(z)) for z in zs) / ymax
        yr = rodrigues_eval(e, n, zs)
        fs = solution_fn(spec, e)
        ysum = np.array([fs(z) for z in zs])
        tag = f"n={n}, {note}"
        rep.add("example51.residual", "closed form solves the equation", res, 1e-7, tag)
        rep.add("example51.rodrigues_ratio", "closed form proportional to Rodrigues", spread(ys / yr), 1e-7, tag)
        rep.add("example51.sensitivity", "perturbed lambda is detected", 1e-3 / max(bad, 1e-300), 1.0, f"{tag}; 1e-3 over the residual at 1.1 lambda")
        rep.add("example51.sum_ratio", "terminating sum proportional to Rodrigues", spread(ysum / yr), 1e-7, tag)
        for en in check_side_conditions(spec, e, [2.4 + k for k in range(5)]).entries:
            rep.add("example51." + en.check_id.split(".", 1)[1], en.paper_anchor, en.max_residual, en.tolerance, tag)
        nu = n - 1
        ratio_dev = 0.0
        for s in [0.45 + 0.5 * k for k in range(6)]:
            got = np.exp(racah.racah_log_weight(roots, nu, s + 1) - racah.racah_log_weight(roots, nu, s))
            want = e.sigma(s) / e.sigma(-s - 1 - nu)
            ratio_dev = max(ratio_dev, abs(got - want) / abs(want))
        rep.add("example51.weight_ratio", "Gamma-product weight ratio", ratio_dev, 1e-9, tag)
        for en in weight_product_check(e, nu, [0.37 + k for k in range(10)]).entries:
            rep.add("example51." + en.check_id.split(".", 1)[1], en.paper_anchor, en.max_residual, en.tolerance, tag)
    return rep


SUITES: dict[str, Callable[[SuiteContext], VerificationReport]] = {
    "lattice": lattice_suite,
    "diffops": diffops_suite,
    "hypeq": hypeq_suite,
    "adjoint": adjoint_suite,
    "solutions": solutions_suite,
    "example51": racah_suite,
}


def run_suites(names, ctx: SuiteContext) -> VerificationReport:
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InvalidInputError(f"unknown suite(s) {unknown}; available: {sorted(SUITES)}")
    rep = VerificationReport()
    for name in names:
        rep.extend(SUITES[name](ctx))
    return rep
