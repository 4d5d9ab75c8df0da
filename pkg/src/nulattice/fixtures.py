"""Reference lattices and equations shared by the verification suites and tests."""
from __future__ import annotations

from .hypeq import EquationSpec
from .lattice import LatticeSpec

LATTICES = {
    "quadratic": LatticeSpec.quadratic(1.0, 0.5, 0.2),
    "quadratic-symmetric": LatticeSpec.quadratic(1.0, 0.0, 0.0),
    "q2": LatticeSpec.q_quadratic(1.0, 0.7, 0.3, 2.0),
    "q4": LatticeSpec.q_quadratic(0.5, 1.3, -0.2, 4.0),
}

SIGMA_TILDE = (0.3, -0.7, 1.1)
TAU_TILDE = (0.4, 2.3)
LAMBDA = 0.37

RACAH_ROOTS = (0.3, 0.7, -0.2, 1.9)

ADJOINT_PAIRS = ((0.0, 0.0), (1.0, 0.0), (1.5, 0.5), (2.0, 2.0))


def fixture_equation(lat: LatticeSpec, lam: complex = LAMBDA) -> EquationSpec:
    return EquationSpec(lat, SIGMA_TILDE, TAU_TILDE, lam)


def fixture_equations() -> dict[str, EquationSpec]:
    return {name: fixture_equation(lat) for name, lat in LATTICES.items()}
