"""Riesz means of n/psi(n) (psi the Dedekind totient) and their explicit
formula over the zeros of the Riemann zeta function."""

__version__ = "0.1.0"

from .approx import ApproxComplex, ApproxReal
from .arith import ArithTable, build_arith_table, riesz_mean, riesz_mean_float, riesz_means
from .errors import (
    ConvergenceError,
    DomainError,
    NonSimpleZeroError,
    PrecisionError,
    RieszPsiError,
    SizeError,
    ZeroFileError,
)
from .zeta_eval import EvalParams, chi, refine_zero, zeta, zeta_prime
from .euler_products import EulerProductSpec, h_n_eval, verify_factorization
from .zeros_db import ZeroTable, j_lambda, load_zeros, tabulate_zeta_prime
from .explicit_formula import FormulaConfig, compare, exponent_fit, main_term, residual, zero_sum

__all__ = [
    "ApproxComplex", "ApproxReal", "ArithTable", "build_arith_table", "riesz_mean", "riesz_mean_float",
    "riesz_means", "ConvergenceError", "DomainError", "NonSimpleZeroError", "PrecisionError",
    "RieszPsiError", "SizeError", "ZeroFileError", "EvalParams", "chi", "refine_zero", "zeta",
    "zeta_prime", "EulerProductSpec", "h_n_eval", "verify_factorization", "ZeroTable", "j_lambda",
    "load_zeros", "tabulate_zeta_prime", "FormulaConfig", "compare", "exponent_fit", "main_term",
    "residual", "zero_sum",
]
