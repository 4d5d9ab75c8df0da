import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import shared_instance
from nulattice.errors import InvalidInputError, NoRootError, PreconditionError
from nulattice.fixtures import LATTICES, fixture_equation
from nulattice.hypeq import lambda_n
from nulattice.solutions.sums import (
    LAYOUT,
    SolutionForm,
    check_side_conditions,
    lambda_for_root,
    make_solution,
    root_condition,
    solution_residual,
    solution_sum,
    solve_on_grid,
    spectral_root,
    spectral_roots,
    summand_telescoping_check,
    truncated_instance,
    weight_product_check,
)

A, N = 0.4, 5
ZS = [2.13 + k for k in range(5)]


def _params(form, lat):
    if LAYOUT[form].diagonal:
        return (2.0, 2.0) if lat.kind != "quadratic" else (1.3, 1.3)
    return (1.3, 2.0)


def _instance(lat, form, seed=0):
    nu, mu = _params(form, lat)
    inst = truncated_instance(lat, form, nu, mu, A, N, seed=seed)
    return inst, make_solution(inst, form, nu, mu, A, A + N, z_anchor=ZS[0])


@pytest.mark.parametrize("form", list(SolutionForm))
def test_truncated_sum_solves_equation(lat, form):
    inst, spec = _instance(lat, form)
    assert solution_residual(spec, inst, ZS) < 1e-7
    rep = check_side_conditions(spec, inst, ZS)
    assert rep.passed, rep.summary()


@pytest.mark.parametrize("form", list(SolutionForm))
def test_perturbed_lambda_is_detected(form):
    inst, spec = _instance(LATTICES["q2"], form)
    lam = inst.lam * 1.1 if inst.lam != 0 else 0.1
    assert solution_residual(spec, inst, ZS, lam=lam) > 1e-3


def test_matched_variant_is_not_a_solution():
    lat = LATTICES["quadratic"]
    form = SolutionForm.POWER_RAISED
    inst, spec = _instance(lat, form)
    lam = lambda_for_root(inst, form, 1.3, 2.0, variant="matched")
    assert solution_residual(spec, inst, ZS, lam=lam) > 1e-3


def test_strict_evaluation_checks_root(eq):
    spec = make_solution(eq, "thm51", 1.3, 2.0, A, A + N)
    with pytest.raises(PreconditionError):
        solution_sum(spec, eq, 2.13)


def test_root_condition_zero_at_lambda_for_root(eq):
    for form in SolutionForm:
        nu, mu = _params(form, eq.lat)
        e = eq.with_lambda(lambda_for_root(eq, form, nu, mu))
        assert abs(root_condition(e, form, nu, mu)) < 1e-12


def test_power_diagonal_root_is_lambda_n(eq):
    # the raised-power diagonal condition at nu = n - 1 is lambda = lambda_n
    for n in (1, 2, 3):
        assert lambda_for_root(eq, "thm52", n - 1) == pytest.approx(lambda_n(eq, n), rel=1e-10)


def test_spectral_root_recovers_degree(eq):
    for n in (1, 2, 3):
        e = eq.with_lambda(lambda_n(eq, n))
        assert spectral_root(e, "cor52", near=n) == pytest.approx(n, abs=1e-9)
        assert spectral_root(e, "thm52", near=n - 1) == pytest.approx(n - 1, abs=1e-9)


def test_spectral_roots_none():
    # lambda far above every value the condition takes on the bracket
    eq = fixture_equation(LATTICES["quadratic"], lam=1e6)
    with pytest.raises(NoRootError) as info:
        spectral_roots(eq, "cor52", bracket=(-2, 2))
    assert info.value.profile


def test_spectral_root_needs_real_lambda(eq):
    with pytest.raises(InvalidInputError):
        spectral_roots(eq.with_lambda(1j), "cor52")


@pytest.mark.parametrize(
    "args",
    [
        ("thm52", 1.0, 2.0, 0.4, 3.4),
        ("thm51", 1.0, None, 0.4, 3.4),
        ("thm51", 1.0, 2.0, 0.4, 3.9),
        ("nope", 1.0, 2.0, 0.4, 3.4),
        ("cor51", 1.0, 2.0, 0.4, 3.4),
    ],
)
def test_invalid_specs(eq, args):
    form, nu, mu, a, b = args
    with pytest.raises(InvalidInputError):
        make_solution(eq, form, nu, mu, a, b)


@pytest.mark.parametrize("mu", [1, 2, 3])
@pytest.mark.parametrize("backward", [False, True])
def test_summand_telescoping(eq, mu, backward):
    rep = summand_telescoping_check(None, eq, 2.37, nu=0.8, mu=mu, backward=backward)
    assert rep.passed, rep.summary()


def test_weight_product_on_symmetric_lattice():
    eq = fixture_equation(LATTICES["quadratic-symmetric"])
    rep = weight_product_check(eq, 0.8, [0.37 + k for k in range(10)])
    assert {e.check_id for e in rep.entries} >= {"weights.product", "weights.reflected_forward"}
    assert rep.passed, rep.summary()


def test_solve_on_grid(lat):
    inst, spec = _instance(lat, SolutionForm.POWER_RAISED)
    rows = solve_on_grid(spec, inst, ZS)
    assert [r[0] for r in rows] == ZS
    for z, y, r in rows:
        assert y == solution_sum(spec, inst, z)
        assert r < 1e-7
    assert solve_on_grid(spec, inst, []) == []


@pytest.mark.parametrize("name", sorted(LATTICES))
def test_power_and_weighted_forms_share_an_equation(name):
    lat = LATTICES[name]
    eq = shared_instance(lat, 1.0, 0.4, 3, 0.65, 3)
    e = eq.with_lambda(lambda_for_root(eq, "thm52", 1.0))
    assert abs(root_condition(e, "cor52", 2.0)) < 1e-9
    for form, nu, a in (("thm52", 1.0, 0.4), ("cor52", 2.0, 0.65)):
        spec = make_solution(e, form, nu, None, a, a + 3, z_anchor=ZS[0])
        assert solution_residual(spec, e, ZS) < 1e-7


def test_frozen_raised_power_sum():
    # regression values on the q = 2 fixture, seed 0
    lat = LATTICES["q2"]
    inst = truncated_instance(lat, "thm51", 1.3, 2.0, 0.4, 5, seed=0)
    assert inst.lam.real == pytest.approx(-2.0162082963160737, rel=1e-12)
    assert inst.sigma_tilde[0].real == pytest.approx(19.143618786481795, rel=1e-12)
    spec = make_solution(inst, "thm51", 1.3, 2.0, 0.4, 5.4)
    assert solution_sum(spec, inst, 2.13) == pytest.approx(149513.06897109232, rel=1e-10)
    assert solution_sum(spec, inst, 3.13) == pytest.approx(96430.68353901825, rel=1e-10)


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 10_000), form=st.sampled_from(list(SolutionForm)))
def test_random_truncated_instances(seed, form):
    lat = LATTICES["quadratic"]
    inst, spec = _instance(lat, form, seed)
    assert solution_residual(spec, inst, ZS) < 1e-7
