"""Exact arithmetic layer: sieved mu and psi, Riesz means of n/psi(n), and
partial Dirichlet sums of F(s) = sum n/psi(n) n^-s.

All arrays in :class:`ArithTable` have length ``limit + 1`` so that
``table.psi[n]`` is psi(n); index 0 holds a placeholder (0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational
from typing import Iterable, Optional

import numpy as np

from .approx import EPS, ApproxComplex, ApproxReal
from .errors import DomainError, SizeError

#: Largest sieve limit accepted. psi (int64), spf (int32) and mu (int8)
#: need about 13 bytes per entry, i.e. ~1.3 GB at this limit.
MAX_TABLE_LIMIT = 10**8

#: Riesz order cap; keeps k! and the binomial expansion small.
MAX_RIESZ_ORDER = 32

#: Rosser-Schoenfeld: pi(u) < 1.25506 u / log u for u > 1.
PI_UPPER_CONSTANT = 1.25506


@dataclass(frozen=True, eq=False)
class ArithTable:
    """Sieved arithmetic functions on 1..limit (index 0 is a placeholder)."""

    limit: int
    mu: np.ndarray
    psi: np.ndarray
    smallest_prime_factor: np.ndarray

    @cached_property
    def primes(self) -> np.ndarray:
        n = np.arange(self.smallest_prime_factor.size)
        return np.flatnonzero((self.smallest_prime_factor == n) & (n >= 2))

    @cached_property
    def ratio(self) -> np.ndarray:
        """r(n) = n / psi(n) as float64, r[0] = 0."""
        n = np.arange(self.limit + 1, dtype=np.float64)
        out = np.zeros(self.limit + 1)
        out[1:] = n[1:] / self.psi[1:]
        return out

    def require(self, n: int) -> None:
        if n > self.limit:
            raise SizeError(f"arith table limit {self.limit} too small; need limit >= {n}")


def build_arith_table(limit: int) -> ArithTable:
    """Sieve mu, psi and the smallest prime factor up to ``limit``."""
    limit = int(limit)
    if limit < 1:
        raise SizeError(f"table limit must be >= 1, got {limit}")
    if limit > MAX_TABLE_LIMIT:
        raise SizeError(f"table limit {limit} exceeds MAX_TABLE_LIMIT={MAX_TABLE_LIMIT}")

    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.arange(limit + 1, dtype=np.int32)
    unset = spf == 0
    unset[:2] = False
    spf[unset] = idx[unset]
    spf[1] = 1

    psi = np.arange(limit + 1, dtype=np.int64)
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    primes = np.flatnonzero(unset)
    for p in primes.tolist():
        view = psi[p::p]
        view //= p
        view *= p + 1
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p :: p * p] = 0
    return ArithTable(limit=limit, mu=mu, psi=psi, smallest_prime_factor=spf)


@lru_cache(maxsize=8)
def primes_up_to(P: int) -> np.ndarray:
    """Primes <= P (int64, ascending) by a bare Eratosthenes sieve."""
    P = int(P)
    if P < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(P + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(P) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    out = np.flatnonzero(is_prime).astype(np.int64)
    out.flags.writeable = False
    return out


def _as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        q = x
    elif isinstance(x, (int, Rational)):
        q = Fraction(x)
    elif isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise DomainError(f"x must be finite, got {x!r}")
        q = Fraction(float(x))
    elif isinstance(x, str):
        q = Fraction(x)
    else:
        raise TypeError(f"cannot interpret {x!r} as a rational")
    if q <= 0:
        raise DomainError(f"x must be positive, got {x}")
    return q


def _check_order(k: int) -> int:
    if int(k) != k or k < 0:
        raise DomainError(f"Riesz order must be a non-negative integer, got {k!r}")
    if k > MAX_RIESZ_ORDER:
        raise DomainError(f"Riesz order {k} exceeds cap {MAX_RIESZ_ORDER}")
    return int(k)


@dataclass
class _PowerPrefix:
    """Running sums sum_{l<=L} l^(j+1) / psi(l), j = 0..k, over one common
    denominator (the lcm of psi(1..L)); avoids a gcd per term."""

    k: int
    psi: np.ndarray
    upto: int = 0
    den: int = 1
    nums: list = field(default_factory=list)

    def __post_init__(self):
        self.nums = [0] * (self.k + 1)

    def advance(self, L: int) -> None:
        nums, den, k = self.nums, self.den, self.k
        psi = self.psi
        for l in range(self.upto + 1, L + 1):
            q = int(psi[l])
            g = math.gcd(den, q)
            scale, term_scale = q // g, den // g
            if scale != 1:
                den *= scale
                for j in range(k + 1):
                    nums[j] *= scale
            lp = l
            for j in range(k + 1):
                nums[j] += lp * term_scale
                lp *= l
        self.den = den
        self.upto = max(self.upto, L)

    def riesz(self, x: Fraction) -> Fraction:
        a, b = x.numerator, x.denominator
        acc = 0
        for j in range(self.k + 1):
            acc += math.comb(self.k, j) * a ** (self.k - j) * (-b) ** j * self.nums[j]
        return Fraction(acc, math.factorial(self.k) * a**self.k * self.den)


def riesz_means(k: int, xs: Iterable, table: ArithTable) -> list:
    """Exact S_k(x) for every x in ``xs`` (order preserved).

    One sweep over l <= max floor(x): the binomial expansion of (1 - l/x)^k
    turns S_k into k+1 power-weighted prefix sums of l/psi(l).
    """
    k = _check_order(k)
    qs = [_as_rational(x) for x in xs]
    if not qs:
        return []
    top = max(q.numerator // q.denominator for q in qs)
    table.require(top)
    acc = _PowerPrefix(k, table.psi)
    out: list = [None] * len(qs)
    for i in sorted(range(len(qs)), key=lambda i: qs[i]):
        q = qs[i]
        acc.advance(q.numerator // q.denominator)
        out[i] = acc.riesz(q)
    return out


def riesz_mean(k: int, x, table: ArithTable) -> Fraction:
    """S_k(x) = (1/k!) sum_{l <= x} (l/psi(l)) (1 - l/x)^k, exactly."""
    return riesz_means(k, [x], table)[0]


def riesz_mean_float(k: int, x, table: ArithTable) -> ApproxReal:
    """Float64 S_k(x) with an absolute rounding bound (compensated sum)."""
    k = _check_order(k)
    x = float(x)
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"x must be positive and finite, got {x!r}")
    L = int(math.floor(x))
    table.require(L)
    if L == 0:
        return ApproxReal(0.0, 0.0)
    l = np.arange(1, L + 1, dtype=np.float64)
    r = table.ratio[1 : L + 1]
    w = (1.0 - l / x) ** k
    terms = r * w
    fact = math.factorial(k)
    value = math.fsum(terms.tolist()) / fact
    # per-term: ratio, quotient, difference and k-fold power each contribute O(eps)
    err = (k + 4) * EPS * float(np.sum(r * (1.0 + w))) / fact + 2 * EPS * abs(value)
    return ApproxReal(value, err)


def prime_power_tail(b: float, P: float) -> float:
    """Upper bound for sum_{p > P} p^-b (b > 1, P >= 2) from the
    Rosser-Schoenfeld bound on pi(u) and partial summation."""
    if b <= 1:
        return math.inf
    P = max(float(P), 2.0)
    return PI_UPPER_CONSTANT * b / ((b - 1) * math.log(P) * P ** (b - 1))


def mean_value_constant(table: ArithTable) -> ApproxReal:
    """c = prod_p (1 - 1/(p(p+1))), the mean value of n/psi(n).

    Truncated at the table's primes; the tail uses |log(1-y)| <= y/(1-y)
    with sum_{p>P} 1/(p(p+1)) <= sum_{p>P} p^-2.
    """
    p = table.primes.astype(np.float64)
    logs = np.log1p(-1.0 / (p * (p + 1.0)))
    log_c = math.fsum(logs.tolist())
    value = math.exp(log_c)
    P = table.limit
    tail = prime_power_tail(2.0, P)
    tail_log = tail / (1.0 - 1.0 / (P * (P + 1.0)))
    err = value * math.expm1(tail_log) + EPS * value * (4 + math.sqrt(p.size))
    return ApproxReal(value, err)


@dataclass(frozen=True)
class DirichletPartial:
    """Partial sum of F(s) with optional tail information.

    ``partial`` is sum_{n<=N} r(n) n^-s with its rounding bound. For
    Re s > 1, ``tail_bound`` is the crude majorant N^(1-sigma)/(sigma-1)
    (from r(n) <= 1) and ``completed`` adds the mean-value tail
    c N^(1-s)/(s-1) with a rigorous bound on what remains.
    """

    s: complex
    N: int
    partial: ApproxComplex
    tail_bound: Optional[float]
    completed: Optional[ApproxComplex]

    @property
    def partial_only(self) -> bool:
        return self.tail_bound is None


def dirichlet_partial(s, N: int, table: ArithTable, *, complete: bool = True) -> DirichletPartial:
    s = complex(s)
    N = int(N)
    if N < 1:
        raise SizeError("N must be >= 1")
    table.require(N)
    n = np.arange(1, N + 1, dtype=np.float64)
    logn = np.log(n)
    terms = table.ratio[1 : N + 1] * np.exp(-s * logn)
    value = complex(np.sum(terms))
    abs_sum = float(np.sum(table.ratio[1 : N + 1] * np.exp(-s.real * logn)))
    rounding = EPS * abs_sum * (4 + abs(s) * math.log(N + 1) + math.log2(N + 1))
    partial = ApproxComplex(value, rounding)

    sigma = s.real
    if sigma <= 1:
        return DirichletPartial(s, N, partial, None, None)
    tail_bound = N ** (1 - sigma) / (sigma - 1)
    completed = None
    if complete:
        c = mean_value_constant(table)
        main_tail = N ** (1 - s) / (s - 1)
        logN = math.log(N)
        correction = (3 + logN) * N**-sigma * (1 + abs(s) / sigma) + abs(s) / sigma**2 * N**-sigma
        err = partial.err + correction + c.err * abs(main_tail) + EPS * abs(c.value * main_tail)
        completed = ApproxComplex(value + c.value * main_tail, err)
    return DirichletPartial(s, N, partial, tail_bound, completed)
