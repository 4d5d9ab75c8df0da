"""Difference equations of hypergeometric type on non-uniform lattices."""
from .adjoint import AdjointCoeffs, adjoint_raw, adjoint_simplified, apply_L_star
from .diffops import GridSpec, delta_iter, delta_nu, nabla_iter, nabla_nu
from .errors import (
    ConvergenceError,
    DivisionGuardError,
    InconsistencyError,
    InvalidInputError,
    LatticeError,
    NonFiniteError,
    NoRootError,
    PoleError,
    PreconditionError,
)
from .hypeq import EquationSpec, PearsonWeight, apply_L, derive_kth, lambda_n, rodrigues_eval
from .lattice import LatticeSpec
from .report import CheckEntry, VerificationReport

__version__ = "0.1.0"
