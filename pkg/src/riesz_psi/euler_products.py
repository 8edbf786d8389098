"""Truncated Euler products for h_n(s) and checks of the factorization

    F(s) = zeta(s) zeta(2^n s + 2^n) h_n(s) / zeta(s + 1),

where the local factor of h_n at p, with u = p^-(s+1) and M = 2^n, is

    1 + (sum_{m=1}^{M-1} u^m / p - u^M) * p/(p+1).

h(s) of the main term is h_1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .approx import EPS, ApproxComplex
from .arith import ArithTable, dirichlet_partial, prime_power_tail, primes_up_to
from .errors import DomainError, TailBoundError
from .zeta_eval import DEFAULT_PARAMS, EvalParams, zeta

#: Fixed block size for the product reduction; keeps results bit-reproducible.
PRODUCT_BLOCK = 4096
DEFAULT_MARGIN = 0.01


@dataclass(frozen=True)
class EulerProductSpec:
    """Which h_n, where to truncate, and how much error is acceptable.

    ``target_tolerance`` is relative: err / |h_n| must not exceed it.
    """

    n: int
    prime_cutoff: int = 10**5
    target_tolerance: float = 1e-2
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.prime_cutoff < 2:
            raise DomainError("prime cutoff must be >= 2")

    @property
    def half_plane(self) -> float:
        """Abscissa -1 + 2^-n; the product converges to the right of it."""
        return -1.0 + 2.0**-self.n


def local_factors(n: int, s: complex, primes: np.ndarray) -> np.ndarray:
    s = complex(s)
    p = primes.astype(np.float64)
    logp = np.log(p)
    M = 2**n
    u = np.exp(-(s + 1) * logp)
    uM = np.exp(-M * (s + 1) * logp)
    geom = (u - uM) / (1 - u)  # sum_{m=1}^{M-1} u^m
    return 1 + (geom - p * uM) / (p + 1)


def _blocked_prod(values: np.ndarray) -> complex:
    acc = complex(1.0)
    for start in range(0, values.size, PRODUCT_BLOCK):
        acc *= complex(np.prod(values[start : start + PRODUCT_BLOCK]))
    return acc


def tail_log_bound(n: int, s: complex, P: int) -> float:
    """Bound on |log prod_{p > P} (local factor)|.

    |factor - 1| <= p^-(1+a) / (1 - p^-a) + p^-(M a) with a = Re s + 1;
    prime sums use the Rosser-Schoenfeld majorant of pi(u).
    """
    a = complex(s).real + 1
    M = 2**n
    if a <= 0 or M * a <= 1:
        return math.inf
    shrink = 1.0 / (1.0 - P**-a)
    total = shrink * prime_power_tail(1 + a, P) + prime_power_tail(M * a, P)
    c_max = shrink * P ** (-1 - a) + P ** (-M * a)
    if c_max >= 1:
        return math.inf
    return total / (1 - c_max)


def h_n_eval(spec: EulerProductSpec, s, primes: Optional[np.ndarray] = None) -> ApproxComplex:
    """h_n(s) as a product over p <= prime_cutoff with a tail bound."""
    s = complex(s)
    if s.real <= spec.half_plane + spec.margin:
        raise DomainError(
            f"Re s = {s.real} not in the half-plane Re s > {spec.half_plane} + margin {spec.margin}"
        )
    if primes is None:
        primes = primes_up_to(spec.prime_cutoff)
    else:
        primes = primes[primes <= spec.prime_cutoff]
    factors = local_factors(spec.n, s, primes)
    value = _blocked_prod(factors)

    L = tail_log_bound(spec.n, s, spec.prime_cutoff)
    rel_tail = math.expm1(L) if L < 700 else math.inf
    p = primes.astype(np.float64)
    phase = abs(s + 1) * float(np.sum(np.log(p) * p ** (-(s.real + 2))))
    rel_round = EPS * (8 * primes.size + 4 * phase)
    rel = rel_tail * (1 + rel_round) + rel_round
    if not rel <= spec.target_tolerance:
        raise TailBoundError(
            f"h_{spec.n}({s}) relative error bound {rel:.3g} exceeds {spec.target_tolerance:.3g} "
            f"with P={spec.prime_cutoff}; increase the prime cutoff"
        )
    return ApproxComplex(value, abs(value) * rel, True)


def h_eval(s, prime_cutoff: int = 10**5, target_tolerance: float = 1e-2) -> ApproxComplex:
    """h(s) of the main term, read as h_1(s) (exponent 2s+2)."""
    return h_n_eval(EulerProductSpec(1, prime_cutoff, target_tolerance), s)


@dataclass(frozen=True)
class FactorizationReport:
    s: complex
    n: int
    N: int
    prime_cutoff: int
    dirichlet: ApproxComplex  # tail-completed series side
    partial_sum: ApproxComplex
    crude_tail_bound: float
    product_side: ApproxComplex
    tolerance: float

    @property
    def difference(self) -> float:
        return abs(self.dirichlet.value - self.product_side.value)

    @property
    def bound(self) -> float:
        return self.dirichlet.err + self.product_side.err

    @property
    def passed(self) -> bool:
        return self.difference <= self.bound and self.bound <= self.tolerance


def product_side(n: int, s, spec: EulerProductSpec, params: EvalParams = DEFAULT_PARAMS) -> ApproxComplex:
    """zeta(s) zeta(2^n s + 2^n) h_n(s) / zeta(s+1)."""
    s = complex(s)
    M = 2**n
    return zeta(s, params) * zeta(M * s + M, params) * h_n_eval(spec, s) / zeta(s + 1, params)


def verify_factorization(
    n: int,
    s,
    series_limit: int,
    spec: Optional[EulerProductSpec] = None,
    table: Optional[ArithTable] = None,
    *,
    tolerance: float = 1e-5,
    params: EvalParams = DEFAULT_PARAMS,
) -> FactorizationReport:
    """Compare the Dirichlet series of n/psi(n) with the product formula.

    The series side is the partial sum to ``series_limit`` completed by the
    mean-value tail c N^(1-s)/(s-1) (certified remainder). The check passes
    when the two sides agree within their combined bound and that bound is
    at most ``tolerance``.
    """
    s = complex(s)
    if s.real <= 1:
        raise DomainError(f"factorization check needs Re s > 1, got {s}")
    if table is None:
        from .arith import build_arith_table

        table = build_arith_table(series_limit)
    if spec is None:
        spec = EulerProductSpec(n, prime_cutoff=10**6, target_tolerance=1e-6)
    elif spec.n != n:
        spec = EulerProductSpec(n, spec.prime_cutoff, spec.target_tolerance, spec.margin)
    dp = dirichlet_partial(s, series_limit, table)
    rhs = product_side(n, s, spec, params)
    return FactorizationReport(
        s=s,
        n=n,
        N=series_limit,
        prime_cutoff=spec.prime_cutoff,
        dirichlet=dp.completed,
        partial_sum=dp.partial,
        crude_tail_bound=dp.tail_bound,
        product_side=rhs,
        tolerance=tolerance,
    )


def min_admissible_n(delta: float) -> int:
    """Smallest integer n with n > log(2/delta)/log 2."""
    bound = math.log(2 / delta) / math.log(2)
    return math.floor(bound) + 1


@dataclass(frozen=True)
class GrowthScan:
    delta: float
    n: int
    t_samples: tuple
    moduli: tuple
    rel_errors: tuple
    c_hat: float  # delta * max_t log|h_n(-1+delta+it)|


def lemma22_bound_scan(
    delta: float,
    t_samples: Sequence[float],
    n: Optional[int] = None,
    prime_cutoff: int = 10**6,
    target_tolerance: float = 1.0,
) -> GrowthScan:
    """Measure |h_n(-1 + delta + it)| and the empirical constant
    C_hat = delta * max_t log|h_n| for the exp(C/delta) growth bound."""
    if not 0 < delta <= 1 / 3:
        raise DomainError(f"delta must lie in (0, 1/3], got {delta}")
    n_min = min_admissible_n(delta)
    if n is None:
        n = n_min
    if n < n_min:
        raise DomainError(f"n = {n} violates n > log(2/delta)/log 2; minimal admissible n is {n_min}")
    spec = EulerProductSpec(n, prime_cutoff, target_tolerance, margin=min(DEFAULT_MARGIN, delta / 4))
    primes = primes_up_to(prime_cutoff)
    moduli, rels = [], []
    for t in t_samples:
        h = h_n_eval(spec, complex(-1 + delta, t), primes)
        moduli.append(abs(h.value))
        rels.append(h.err / abs(h.value))
    c_hat = delta * max(math.log(m) for m in moduli)
    return GrowthScan(delta, n, tuple(float(t) for t in t_samples), tuple(moduli), tuple(rels), c_hat)
