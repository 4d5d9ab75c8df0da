import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nulattice.errors import InconsistencyError, InvalidInputError
from nulattice.fixtures import LATTICES, SIGMA_TILDE, TAU_TILDE, fixture_equation
from nulattice.hypeq import (
    EquationSpec,
    PearsonWeight,
    apply_L,
    certify_linearity,
    derive_kth,
    kappa_closed_form,
    lambda_n,
    lambda_variants,
    mu_k,
    pearson_ratio,
    pearson_ratio_backward,
    quadratic_decomposition,
    rho_k_product,
    rodrigues_check,
    rodrigues_eval,
)
from nulattice.lattice import LatticeSpec

T1, S2 = TAU_TILDE[1], SIGMA_TILDE[2]


def _alpha_gamma(q, mu):
    h, r = q ** (mu / 2), math.sqrt(q)
    return (h + 1 / h) / 2, (h - 1 / h) / (r - 1 / r)


# kappa_m = alpha(m-1) tau~' + gamma(m-1) sigma~''/2, worked by hand on each fixture
KAPPA_3 = {"quadratic": 4.5, "quadratic-symmetric": 4.5, "q2": 5.208452377915606, "q4": 7.6375}


def test_kappa_frozen(lat_name, eq):
    assert eq.kappa(3) == pytest.approx(KAPPA_3[lat_name], rel=1e-12)


@pytest.mark.parametrize("m", [-3.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.5])
def test_kappa_matches_closed_form(eq, m):
    assert eq.kappa(m) == pytest.approx(kappa_closed_form(eq, m), rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("n", range(0, 6))
def test_lambda_n_classical_on_quadratic(n):
    eq = fixture_equation(LATTICES["quadratic"])
    assert lambda_n(eq, n) == pytest.approx(-n * (T1 + (n - 1) * S2), abs=1e-12)


@pytest.mark.parametrize("name,q", [("q2", 2.0), ("q4", 4.0)])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_lambda_n_on_q_lattices(name, q, n):
    eq = fixture_equation(LATTICES[name])
    a1, g1 = _alpha_gamma(q, n - 1)
    gn = _alpha_gamma(q, n)[1]
    want = -gn * (a1 * T1 + g1 * S2)
    assert lambda_n(eq, n) == pytest.approx(want, rel=1e-12)


def test_lambda_n_differs_from_n_kappa_on_q_lattice():
    v = lambda_variants(fixture_equation(LATTICES["q2"]), 3)
    assert v["sum"] == pytest.approx(v["gamma_kappa"], rel=1e-12)
    assert abs(v["sum"] - v["n_kappa"]) > 0.1


def test_mu_n_vanishes_at_lambda_n(eq):
    for n in range(1, 5):
        assert abs(mu_k(eq.with_lambda(lambda_n(eq, n)), n)) < 1e-9


def test_lambda_n_rejects_bad_n(eq):
    with pytest.raises(InvalidInputError):
        lambda_n(eq, -1)
    with pytest.raises(InvalidInputError):
        lambda_n(eq, 1.5)


def test_linearity_certificate(eq):
    rep = certify_linearity(eq)
    assert rep.passed, rep.summary()


@pytest.mark.parametrize("k", range(0, 5))
def test_derived_slope_is_kappa(eq, k):
    dc = derive_kth(eq, k)
    assert dc.tau_tilde_k[1] == pytest.approx(eq.kappa(2 * k + 1), rel=1e-9)
    assert dc.mu_k == pytest.approx(eq.lam - lambda_n(eq, k), rel=1e-9, abs=1e-9)


def test_derive_kth_range(eq):
    with pytest.raises(InvalidInputError):
        derive_kth(eq, 9)


def test_rodrigues_first_degree_is_tau(eq):
    zs = [0.37 + k for k in range(5)]
    y = rodrigues_eval(eq, 1, zs)
    for v, z in zip(y, zs):
        assert v == pytest.approx(eq.tau(z), rel=1e-12)


def test_rodrigues_zero_degree_is_one(eq):
    assert np.allclose(rodrigues_eval(eq, 0, [0.4, 1.4]), 1.0)


@pytest.mark.parametrize("n", range(0, 5))
def test_rodrigues_solves_equation(eq, n):
    rep = rodrigues_check(eq, n, [0.37 + 0.29 * j for j in range(10)])
    assert rep.passed, rep.summary()


def test_rodrigues_negative_control(eq):
    lam = lambda_n(eq, 2)
    zs = [0.37 + k for k in range(4)]
    y = lambda t: rodrigues_eval(eq, 2, [t])[0]
    L = apply_L(eq, 0.0, 0.0, y, lam * 1.1)
    assert max(abs(L(z)) for z in zs) > 1e-3 * max(abs(y(z)) for z in zs)


def test_pearson_equation(eq):
    # Delta[sigma rho](s) = tau_nu(s) rho(s) dx_{nu+1}(s) on the forward weight
    lat = eq.lat
    for nu in (0.0, 1.5):
        rho = PearsonWeight(0.4, pearson_ratio(eq, nu), nu)
        for s in (0.4, 1.4, 2.4):
            lhs = (eq.sigma(s + 1) * rho(s + 1) - eq.sigma(s) * rho(s)) / lat.nabla(nu + 1, s)
            assert lhs == pytest.approx(eq.tau_nu(nu, s) * rho(s), rel=1e-10)


def test_backward_pearson_equation(eq):
    # nabla[sigma rho](s) = -tau_nu(s) rho(s) dx_{nu+1}(s) on the backward weight
    lat = eq.lat
    nu = 1.0
    rho = PearsonWeight(0.4, pearson_ratio_backward(eq, nu), nu)
    for s in (1.4, 2.4):
        lhs = (eq.sigma(s) * rho(s) - eq.sigma(s - 1) * rho(s - 1)) / lat.nabla(nu + 1, s)
        assert lhs == pytest.approx(-eq.tau_nu(nu, s) * rho(s), rel=1e-10)


def test_rho_k_satisfies_index_k_pearson(eq):
    lat, k = eq.lat, 2
    rho = PearsonWeight(0.4, pearson_ratio(eq, 0.0))
    for s in (0.4, 1.4):
        r0, r1 = rho_k_product(eq, rho, k, s), rho_k_product(eq, rho, k, s + 1)
        lhs = (eq.sigma(s + 1) * r1 - eq.sigma(s) * r0) / lat.nabla(k + 1, s)
        assert lhs == pytest.approx(eq.tau_nu(k, s) * r0, rel=1e-9)


def test_weight_is_log_accumulated():
    eq = fixture_equation(LATTICES["quadratic"])
    rho = PearsonWeight(0.4, pearson_ratio(eq, 0.0))
    # 400 steps overflow a plain product but not the log domain
    assert np.isfinite(rho.log_eval(400.4).real)
    assert rho.relative(3.4, 2.4) == pytest.approx(pearson_ratio(eq, 0.0)(2.4))


@pytest.mark.parametrize("mu", [1, 2, 3])
def test_quadratic_decomposition(eq, mu):
    nu, z = 0.8, 2.37
    dec = quadratic_decomposition(eq, nu, mu, z)
    assert dec.residual < 1e-10
    assert dec.A == pytest.approx(eq.lat.gamma(mu) * eq.sigma(z), rel=1e-9)
    assert dec.B == pytest.approx(-eq.tau_nu(nu - mu, z), rel=1e-9)
    assert dec.C == pytest.approx(-eq.kappa(2 * nu - mu + 1), rel=1e-9)


def test_roots_form():
    eq = EquationSpec.from_roots([0.3, 0.7, -0.2, 1.9])
    for s in (0.1, 1.3, -2.2):
        assert eq._sigma_from_tilde(s) == pytest.approx((s - 0.3) * (s - 0.7) * (s + 0.2) * (s - 1.9))


def test_roots_need_symmetric_lattice():
    with pytest.raises(InvalidInputError):
        EquationSpec.from_roots([0.3, 0.7], lat=LATTICES["quadratic"])


def test_inconsistent_roots_rejected():
    lat = LatticeSpec.quadratic(1, 0, 0)
    with pytest.raises(InconsistencyError):
        EquationSpec(lat, (1, 0, 1), (0, 1), 0, (0.3, 0.7, -0.2, 1.9))


def test_dict_round_trip(eq):
    back = EquationSpec.from_dict(eq.to_dict(), eq.lat)
    assert back.sigma_tilde == eq.sigma_tilde and back.tau_tilde == eq.tau_tilde and back.lam == eq.lam


def test_dict_from_roots():
    lat = LatticeSpec.quadratic(1, 0, 0)
    eq = EquationSpec.from_dict({"sigma_roots": [0.3, 0.7, -0.2, 1.9], "lambda": [1.5, 0]}, lat)
    assert eq.lam == 1.5 and eq.sigma(0.3) == 0


def test_too_many_coefficients():
    with pytest.raises(InvalidInputError):
        EquationSpec(LATTICES["q2"], (1, 2, 3, 4), (1,))


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3),
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=2, max_size=2),
    st.sampled_from(sorted(LATTICES)),
)
def test_tau_nu_linear_for_random_coefficients(sig, tau, name):
    eq = EquationSpec(LATTICES[name], tuple(sig), tuple(tau))
    rep = certify_linearity(eq, nus=(-1.0, 0.5, 2.0))
    assert rep["hypeq.tau_linear"].max_residual < 1e-9
