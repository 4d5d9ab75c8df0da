import numpy as np
import pytest

from nulattice.fixtures import LATTICES, fixture_equation
from nulattice.hypeq import EquationSpec


@pytest.fixture(params=sorted(LATTICES))
def lat_name(request):
    return request.param


@pytest.fixture
def lat(lat_name):
    return LATTICES[lat_name]


@pytest.fixture
def eq(lat):
    return fixture_equation(lat)


def shared_instance(lat, nu, a1, n1, a2, n2):
    """Equation truncated for both a backward sum at ``nu`` and a forward sum at ``nu + 1``.

    Backward nodes ``a1 .. a1+n1-1`` need ``sigma(b1-1) = 0`` and ``S(a1+nu) = 0``; forward
    nodes ``a2 .. a2+n2-1`` need ``sigma(a2) = 0`` and ``S(b2+nu) = 0`` with
    ``S(w) = sigma(w) + tau(w) dx_1(w)``.  The four conditions are linear in the five
    coefficients, so the equation is the null vector normalised to ``sigma_tilde[2] = 1``.
    """
    basis = []
    for k in range(5):
        st, tt = [0.0] * 3, [0.0] * 2
        if k < 3:
            st[k] = 1.0
        else:
            tt[k - 3] = 1.0
        basis.append(EquationSpec(lat, st, tt))

    def S(e, w):
        return e.sigma(w) + e.tau(w) * lat.nabla(1, w)

    conds = [
        lambda e: e.sigma(a1 + n1 - 1),
        lambda e: S(e, a1 + nu),
        lambda e: e.sigma(a2),
        lambda e: S(e, a2 + n2 + nu),
    ]
    M = np.array([[c(e) for e in basis] for c in conds])
    v = np.linalg.svd(M)[2][-1].conj()
    v = v / v[2]
    return EquationSpec(lat, tuple(v[:3]), tuple(v[3:]))
