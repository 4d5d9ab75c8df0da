import mpmath
import numpy as np
import pytest

from nulattice.errors import InvalidInputError, PoleError
from nulattice.fixtures import RACAH_ROOTS
from nulattice.hypeq import lambda_n, rodrigues_eval
from nulattice.numerics import spread
from nulattice.solutions.racah import (
    racah_equation,
    racah_log_weight,
    racah_parameters,
    racah_polynomial,
    racah_prefactor,
    racah_solution,
)
from nulattice.solutions.sums import form_operator, make_solution, solution_fn

ZS = [2.4 + 0.37 * k for k in range(10)]

# closed-form values at z = 2.4, checked against an mpmath Gamma/hypergeometric evaluation
FROZEN = {1: -15.528999999999996, 2: 698.2404110000003, 3: -65955.296624679}


def _mp_closed_form(roots, nu, z):
    s1, s2, s3, s4 = roots
    e = s1 + s2 + nu
    g = mpmath.gamma
    pref = (
        g(1 + 2 * z - e) / g(1 + 2 * z)
        * g(z - s1 + 1) / g(z - s1 - nu)
        * g(z - s2 + 1) / g(z - s2 - nu)
        * g(1 + z - s3) / g(1 + z - e - s3)
        * g(1 + z - s4) / g(1 + z - e - s4)
    )
    up, lo = racah_parameters(roots, nu, z)
    return complex(pref * mpmath.hyper([u.real for u in up], [v.real for v in lo], 1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_frozen_values(n):
    assert racah_polynomial(RACAH_ROOTS, n, 2.4).real == pytest.approx(FROZEN[n], rel=1e-12)
    assert racah_polynomial(RACAH_ROOTS, n, 2.4) == pytest.approx(_mp_closed_form(RACAH_ROOTS, n - 1, 2.4), rel=1e-12)


def test_general_solution_matches_mpmath():
    roots = (0.5, 1.0, -0.3, 2.2)
    for z in (2.63, 3.04):
        assert racah_solution(roots, 0.5, z) == pytest.approx(_mp_closed_form(roots, 0.5, z), rel=1e-11)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_polynomial_solves_equation_and_matches_rodrigues(n):
    eq = racah_equation(RACAH_ROOTS, lambda_n(racah_equation(RACAH_ROOTS), n))
    y = lambda z: racah_polynomial(RACAH_ROOTS, n, z)
    spec = make_solution(eq, "thm52", n - 1, None, -RACAH_ROOTS[0] - (n - 1), RACAH_ROOTS[1] + 1)
    ys = np.array([y(z) for z in ZS])
    res = max(abs(form_operator(spec, eq, y)(z)) for z in ZS) / np.abs(ys).max()
    assert res < 1e-7
    bad = max(abs(form_operator(spec, eq, y, eq.lam * 1.1)(z)) for z in ZS) / np.abs(ys).max()
    assert bad > 1e-3
    assert spread(ys / rodrigues_eval(eq, n, ZS)) < 1e-7
    fs = solution_fn(spec, eq)
    assert spread(np.array([fs(z) for z in ZS]) / ys) < 1e-7


def test_polynomial_degree_in_x():
    from nulattice.numerics import poly_fit

    ys = [racah_polynomial(RACAH_ROOTS, 3, z) for z in ZS]
    assert poly_fit([z * z for z in ZS], ys, 3).residual < 1e-10


def test_general_terminating_case_solves_equation():
    # s1 + s2 + nu = 2 terminates the series without being a polynomial case
    roots, nu = (0.5, 1.0, -0.3, 2.2), 0.5
    eq0 = racah_equation(roots)
    eq = eq0.with_lambda(-(nu + 1) * eq0.kappa(nu + 1))
    spec = make_solution(eq, "thm52", nu, None, 0.0, 1.0)
    y = lambda z: racah_solution(roots, nu, z)
    zs = [2.63 + 0.41 * k for k in range(8)]
    ys = np.array([y(z) for z in zs])
    assert max(abs(form_operator(spec, eq, y)(z)) for z in zs) / np.abs(ys).max() < 1e-7


def test_weight_ratio():
    for n in (1, 2, 3):
        nu = n - 1
        eq = racah_equation(RACAH_ROOTS)
        for s in (0.35, 0.45, 1.45):
            got = np.exp(racah_log_weight(RACAH_ROOTS, nu, s + 1) - racah_log_weight(RACAH_ROOTS, nu, s))
            want = eq.sigma(s) / eq.sigma(-s - 1 - nu)
            assert got == pytest.approx(want, rel=1e-9)


def test_weight_pole_at_root():
    # Gamma(s - 0.3) has a pole at the root s = 0.3
    with pytest.raises(PoleError):
        racah_log_weight(RACAH_ROOTS, 0.0, 0.3)


def test_polynomial_case_validation():
    with pytest.raises(InvalidInputError):
        racah_polynomial((0.3, 0.8, -0.2, 1.9), 2, 2.4)
    with pytest.raises(InvalidInputError):
        racah_polynomial(RACAH_ROOTS, -1, 2.4)
    with pytest.raises(InvalidInputError):
        racah_equation((0.3, 0.7, 1.0))


def test_prefactor_is_finite_across_integer_shifts():
    assert np.isfinite(abs(racah_prefactor(RACAH_ROOTS, 2, 2.4)))
