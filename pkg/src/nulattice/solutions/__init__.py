"""Special functions, generalized powers and particular solutions written as sums."""
from .genpow import genpow, genpow_gamma, genpow_int
from .racah import (
    racah_equation,
    racah_log_weight,
    racah_parameters,
    racah_polynomial,
    racah_prefactor,
    racah_solution,
    racah_weight,
)
from .special import eval_pFq, gamma, gamma_ratio, log_gamma, pochhammer
from .sums import (
    SolutionForm,
    SolutionSpec,
    check_side_conditions,
    form_operator,
    lambda_for_root,
    make_solution,
    root_condition,
    solution_residual,
    solution_sum,
    spectral_root,
    spectral_roots,
    summand_telescoping_check,
    truncated_instance,
    weight_product_check,
)
