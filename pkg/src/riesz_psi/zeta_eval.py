"""Riemann zeta numerics: zeta, zeta', chi and zero refinement.

zeta is computed by Euler-Maclaurin summation,

    zeta(s) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
              + sum_{j=1}^{m} B_{2j}/(2j)! s(s+1)...(s+2j-2) N^(-s-2j+1) + R,

with Backlund's remainder bound

    |R| <= |s(s+1)...(s+2m+1) B_{2m+2} N^(-sigma-2m-1)| / ((2m+2)! (sigma+2m+1)).

The float64 kernel is vectorised over n; precisions above 53 bits fall back
to an mpmath kernel of the same formula. Remainder bounds are rigorous for
sigma > -2m-1; rounding bounds are worst-case for sigma > 1 and
random-walk estimates in the critical strip, which is what the
``rigorous`` flag records.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np
from scipy import special

from .approx import EPS, ApproxComplex
from .errors import (
    ConvergenceError,
    DegenerateChiError,
    DomainError,
    MethodDisagreementError,
    NonSimpleZeroError,
    PoleError,
    PrecisionError,
)

#: Largest |Im s| accepted (Euler-Maclaurin needs ~|Im s|/2 terms).
MAX_IMAG = 1.0e5
MAX_BERNOULLI_ORDER = 60
#: Above MAX_IMAG and right of this abscissa, zeta is summed directly as a
#: Dirichlet series (no height restriction there).
DIRECT_SERIES_ABSCISSA = 3.0
SIMPLICITY_THRESHOLD = 1e-6


@lru_cache(maxsize=1)
def _bernoulli_table() -> tuple:
    """B_0..B_{MAX_BERNOULLI_ORDER + 2} as Fractions (Akiyama-Tanigawa)."""
    size = MAX_BERNOULLI_ORDER + 3
    out = []
    a = [Fraction(0)] * size
    for m in range(size):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    out[1] = -out[1]  # B_1 = -1/2 convention; unused
    return tuple(out)


@lru_cache(maxsize=None)
def _em_coefficients(m: int) -> tuple:
    """(B_{2j}/(2j)! for j=1..m, |B_{2m+2}|/(2m+2)!) as floats."""
    B = _bernoulli_table()
    coeffs = tuple(float(B[2 * j] / math.factorial(2 * j)) for j in range(1, m + 1))
    rem = float(abs(B[2 * m + 2]) / math.factorial(2 * m + 2))
    return coeffs, rem


@dataclass(frozen=True)
class EvalParams:
    """Controls for Euler-Maclaurin evaluation.

    ``terms`` is the summation length N (None picks it from |Im s| and the
    tolerance); ``bernoulli_order`` is 2m; ``tolerance`` is the absolute
    error the caller needs certified.
    """

    terms: Optional[int] = None
    bernoulli_order: int = 30
    working_precision_bits: int = 53
    max_precision_bits: int = 212
    tolerance: float = 1e-9
    derivative_tolerance: float = 1e-6

    def __post_init__(self):
        if self.bernoulli_order % 2 or not 2 <= self.bernoulli_order <= MAX_BERNOULLI_ORDER:
            raise DomainError(f"bernoulli_order must be even in [2, {MAX_BERNOULLI_ORDER}]")
        if self.terms is not None and self.terms < 1:
            raise DomainError("terms must be positive")
        if self.working_precision_bits < 53:
            raise DomainError("working precision below 53 bits is not supported")


DEFAULT_PARAMS = EvalParams()


def _remainder_bound(s: complex, N: int, m: int) -> float:
    sigma = s.real
    if sigma + 2 * m + 1 <= 0:
        return math.inf
    _, rem = _em_coefficients(m)
    prod = 1.0
    for i in range(2 * m + 2):
        prod *= abs(s + i)
    return prod * rem * N ** (-sigma - 2 * m - 1) / (sigma + 2 * m + 1)


def _choose_terms(s: complex, params: EvalParams) -> int:
    t = abs(s.imag)
    m = params.bernoulli_order // 2
    if params.terms is not None:
        if params.terms < t / 4:
            raise DomainError(f"terms={params.terms} below |Im s|/4 = {t / 4:.1f}")
        return params.terms
    N = max(10, math.ceil(t / 2))
    cap = max(1000, 8 * math.ceil(t))
    while _remainder_bound(s, N, m) > params.tolerance / 4:
        if N >= cap:
            raise PrecisionError(f"Euler-Maclaurin cannot reach tolerance {params.tolerance} at s={s}")
        N *= 2
    return N


def _em_numpy(svals: np.ndarray, N: int, m: int, derivative: bool):
    """Float64 Euler-Maclaurin at each s in ``svals`` (same N, m);
    returns (values, derivatives or None)."""
    coeffs, _ = _em_coefficients(m)
    n = np.arange(1, N, dtype=np.float64)
    logn = np.log(n)
    pw = np.exp(-np.outer(svals, logn))
    head = pw.sum(axis=1)
    dhead = -(pw * logn).sum(axis=1) if derivative else None

    logN = math.log(N)
    NS = np.exp(-svals * logN)
    vals = head + N * NS / (svals - 1) + 0.5 * NS
    if derivative:
        d = dhead - logN * N * NS / (svals - 1) - N * NS / (svals - 1) ** 2 - 0.5 * logN * NS
    poly = svals.astype(complex)
    dpoly = np.ones_like(poly)
    Npow = NS / N
    for j, c in enumerate(coeffs, start=1):
        vals = vals + c * poly * Npow
        if derivative:
            d = d + c * (dpoly - logN * poly) * Npow
        a, b = svals + (2 * j - 1), svals + 2 * j
        dpoly = dpoly * a * b + poly * (a + b)
        poly = poly * a * b
        Npow = Npow / (N * N)
    return vals, (d if derivative else None)


def _rounding_bound(s: complex, N: int, value_scale: float) -> float:
    sigma = s.real
    n = np.arange(1, N, dtype=np.float64)
    phase = 4 + abs(s) * math.log(N)
    if sigma > 1:
        mag = float(np.sum(n**-sigma))
    else:
        mag = 4.0 * math.sqrt(float(np.sum(n ** (-2 * sigma))))
    return EPS * (phase * mag + math.log2(N) * value_scale)


def _em_mpmath(s: complex, N: int, m: int, prec: int, derivative: bool):
    B = _bernoulli_table()
    with mpmath.workprec(prec):
        z = mpmath.mpc(s)
        head = mpmath.mpf(0)
        dhead = mpmath.mpf(0)
        for n in range(1, N):
            ln = mpmath.log(n)
            term = mpmath.exp(-z * ln)
            head += term
            if derivative:
                dhead -= ln * term
        lnN = mpmath.log(N)
        NS = mpmath.exp(-z * lnN)
        val = head + N * NS / (z - 1) + NS / 2
        d = dhead - lnN * N * NS / (z - 1) - N * NS / (z - 1) ** 2 - lnN * NS / 2
        poly, dpoly, Npow = z, mpmath.mpf(1), NS / N
        for j in range(1, m + 1):
            c = mpmath.mpf(B[2 * j].numerator) / (B[2 * j].denominator * mpmath.factorial(2 * j))
            val += c * poly * Npow
            d += c * (dpoly - lnN * poly) * Npow
            a, b = z + 2 * j - 1, z + 2 * j
            dpoly = dpoly * a * b + poly * (a + b)
            poly = poly * a * b
            Npow /= N * N
        return complex(val), (complex(d) if derivative else None)


def _em_eval(s: complex, params: EvalParams, derivative: bool = False):
    """One Euler-Maclaurin evaluation; returns (ApproxComplex value,
    ApproxComplex derivative or None), escalating precision if rounding
    dominates the tolerance."""
    N = _choose_terms(s, params)
    m = params.bernoulli_order // 2
    trunc = _remainder_bound(s, N, m)
    # Cauchy estimate on a unit circle bounds the differentiated remainder
    dtrunc = _remainder_bound(complex(s.real - 1, abs(s.imag) + 1), N, m) if derivative else 0.0
    rigorous = s.real > 1
    prec = params.working_precision_bits
    while True:
        if prec <= 53:
            vals, ds = _em_numpy(np.array([s]), N, m, derivative)
            v = complex(vals[0])
            dv = complex(ds[0]) if derivative else None
            rnd = _rounding_bound(s, N, abs(v))
        else:
            v, dv = _em_mpmath(s, N, m, prec, derivative)
            rnd = _rounding_bound(s, N, abs(v)) * 2.0 ** (53 - prec)
        err = trunc + rnd
        if err <= params.tolerance or prec >= params.max_precision_bits:
            break
        prec *= 2
    if err > params.tolerance:
        raise PrecisionError(
            f"zeta({s}) error bound {err:.3g} exceeds tolerance {params.tolerance:.3g} "
            f"at {prec} bits"
        )
    value = ApproxComplex(v, err, rigorous)
    deriv = None
    if derivative:
        deriv = ApproxComplex(dv, dtrunc + rnd * (1 + math.log(N)), rigorous)
    return value, deriv


def _direct_series(s: complex, params: EvalParams) -> ApproxComplex:
    sigma, t = s.real, abs(s.imag)
    # sum_{n>N} n^-sigma <= N^(1-sigma)/(sigma-1)
    target = params.tolerance / 4
    N = max(2, math.ceil((target * (sigma - 1)) ** (-1.0 / (sigma - 1))))
    n = np.arange(1, N + 1, dtype=np.float64)
    logn = np.log(n)
    terms = np.exp(-s * logn)
    value = complex(np.sum(terms[::-1]))
    mags = n ** -sigma
    rounding = EPS * float(np.sum(mags * (t * logn + sigma * logn + 4))) + EPS * N * abs(value)
    tail = N ** (1 - sigma) / (sigma - 1)
    return ApproxComplex(value, tail + rounding, True)


def _is_neg_even_int(s: complex) -> bool:
    return s.imag == 0 and s.real < 0 and s.real == int(s.real) and int(s.real) % 2 == 0


def zeta(s, params: EvalParams = DEFAULT_PARAMS) -> ApproxComplex:
    """zeta(s) with an error bound.

    Euler-Maclaurin for Re s >= -1, reflection zeta(s) = chi(s) zeta(1-s)
    further left. Values at conjugate points are exact conjugates.
    """
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.imag < 0:
        return zeta(s.conjugate(), params).conjugate()
    if s.real >= DIRECT_SERIES_ABSCISSA and s.imag > MAX_IMAG:
        return _direct_series(s, params)
    if abs(s.imag) > MAX_IMAG:
        raise DomainError(f"|Im s| = {abs(s.imag):g} beyond supported ceiling {MAX_IMAG:g}")
    if s.real < -1:
        if _is_neg_even_int(s):
            return ApproxComplex(0.0, 0.0, True)
        return chi(s, params) * zeta(1 - s, params)
    value, _ = _em_eval(s, params)
    return value


def zeta_and_derivative(s, params: EvalParams = DEFAULT_PARAMS):
    """(zeta(s), zeta'(s)) from one differentiated Euler-Maclaurin pass."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if abs(s.imag) > MAX_IMAG:
        raise DomainError(f"|Im s| = {abs(s.imag):g} beyond supported ceiling {MAX_IMAG:g}")
    if s.imag < 0:
        v, d = zeta_and_derivative(s.conjugate(), params)
        return v.conjugate(), d.conjugate()
    if s.real < -1:
        raise DomainError("zeta' is only evaluated for Re s >= -1")
    return _em_eval(s, params, derivative=True)


def _richardson_derivative(s: complex, params: EvalParams, h: float) -> complex:
    N = _choose_terms(s, params)
    m = params.bernoulli_order // 2
    pts = np.array([s + h, s - h, s + h / 2, s - h / 2])
    vals, _ = _em_numpy(pts, N, m, False)
    d1 = (vals[0] - vals[1]) / (2 * h)
    d2 = (vals[2] - vals[3]) / h
    return complex((4 * d2 - d1) / 3)


def zeta_prime(s, params: EvalParams = DEFAULT_PARAMS, *, cross_check: bool = True) -> ApproxComplex:
    """zeta'(s) by differentiated Euler-Maclaurin.

    With ``cross_check`` the result is compared with a Richardson-extrapolated
    central difference of the same sum; the returned bound covers both and a
    disagreement beyond ``params.derivative_tolerance`` (relative) raises.
    """
    s = complex(s)
    if s.imag < 0:
        return zeta_prime(s.conjugate(), params, cross_check=cross_check).conjugate()
    _, d = zeta_and_derivative(s, params)
    if not cross_check:
        return d
    N = _choose_terms(s, params)
    h = 0.05 / max(1.0, math.log(N))
    fd = _richardson_derivative(s, params, h)
    gap = abs(fd - d.value)
    if gap > params.derivative_tolerance * max(1.0, abs(d.value)):
        raise MethodDisagreementError(
            f"zeta'({s}): Euler-Maclaurin {d.value} vs finite difference {fd} (gap {gap:.3g})"
        )
    return ApproxComplex(d.value, d.err + gap, d.rigorous)


def _log_sin(z: complex) -> complex:
    """log sin z (any branch), stable for large |Im z|."""
    if z.imag > 5:
        return cmath.log(0.5j) - 1j * z + cmath.log(1 - cmath.exp(2j * z))
    if z.imag < -5:
        return cmath.log(-0.5j) + 1j * z + cmath.log(1 - cmath.exp(-2j * z))
    return cmath.log(cmath.sin(z))


def chi(s, params: EvalParams = DEFAULT_PARAMS) -> ApproxComplex:
    """chi(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s), so zeta(s) = chi(s) zeta(1-s).

    Evaluated in log form. Raises PoleError at s = 1, 3, 5, ... and
    DegenerateChiError at s = 2, 4, ... (0 * infinity in the direct formula).
    """
    s = complex(s)
    if s.imag == 0 and s.real == int(s.real):
        k = int(s.real)
        if k >= 1 and k % 2 == 1:
            raise PoleError(f"chi has a pole at s = {k}")
        if k >= 2 and k % 2 == 0:
            raise DegenerateChiError(f"chi({k}) is 0*inf in the direct formula")
        if k <= 0 and k % 2 == 0:
            return ApproxComplex(0.0, 0.0, True)
    if s.imag < 0:
        return chi(s.conjugate(), params).conjugate()
    log_chi = (
        s * math.log(2.0)
        + (s - 1) * math.log(math.pi)
        + _log_sin(math.pi * s / 2)
        + complex(special.loggamma(1 - s))
    )
    value = cmath.exp(log_chi)
    # relative error ~ eps times the magnitude of the pieces summed in log space
    scale = abs(s) * (1.0 + math.log(2 * math.pi)) + abs(math.pi * s / 2) + abs((1 - s) * cmath.log(1 - s)) + 10
    return ApproxComplex(value, 8 * EPS * scale * abs(value), False)


def theta(t: float) -> float:
    """Riemann-Siegel theta, Im log Gamma(1/4 + it/2) - (t/2) log pi."""
    return complex(special.loggamma(0.25 + 0.5j * t)).imag - 0.5 * t * math.log(math.pi)


def theta_prime(t: float) -> float:
    return 0.5 * complex(special.digamma(0.25 + 0.5j * t)).real - 0.5 * math.log(math.pi)


def hardy_z(t: float, params: EvalParams = DEFAULT_PARAMS) -> float:
    """Z(t) = exp(i theta(t)) zeta(1/2 + it), real for real t."""
    return (cmath.exp(1j * theta(t)) * zeta(complex(0.5, t), params).value).real


def _z_and_dz(t: float, params: EvalParams):
    v, d = zeta_and_derivative(complex(0.5, t), params)
    rot = cmath.exp(1j * theta(t))
    z = (rot * v.value).real
    dz = (rot * 1j * (theta_prime(t) * v.value + d.value)).real
    return z, dz, abs(v.value), abs(d.value)


def refine_zero(
    gamma_guess: float,
    params: EvalParams = DEFAULT_PARAMS,
    *,
    tol: float = 1e-9,
    max_iter: int = 40,
    simplicity_threshold: float = SIMPLICITY_THRESHOLD,
) -> float:
    """Refine a critical-line zero ordinate from a guess within 0.5 of it.

    Newton on the Hardy function Z(t); a step leaving the +-0.5 window
    switches to a sign-change bracket around the guess. Returns an ordinate
    with |zeta(1/2 + i gamma)| <= tol. Refining an output again returns it
    unchanged.
    """
    g0 = float(gamma_guess)
    if not g0 > 0:
        raise DomainError("zero ordinates must be positive")
    lo, hi = g0 - 0.5, g0 + 0.5
    t = g0
    best = (math.inf, t)
    for _ in range(max_iter):
        z, dz, zabs, dabs = _z_and_dz(t, params)
        if zabs < best[0]:
            best = (zabs, t)
        if zabs <= 1e3 * tol and dabs < simplicity_threshold:
            raise NonSimpleZeroError(f"|zeta'| = {dabs:.3g} near t = {t}", gamma=t)
        step = -z / dz if dz != 0 else math.inf
        if abs(step) <= max(64 * EPS * abs(t), 1e-13) and zabs <= tol:
            return t
        nxt = t + step
        if not lo < nxt < hi:
            return _bracket_refine(g0, params, tol, max_iter, simplicity_threshold)
        t = nxt
    if best[0] <= tol:
        return best[1]
    raise ConvergenceError(f"zero refinement from {g0} did not converge (best |zeta| = {best[0]:.3g})", best=best[1])


def _bracket_refine(g0, params, tol, max_iter, simplicity_threshold):
    ts = np.linspace(g0 - 0.5, g0 + 0.5, 51)
    zs = [hardy_z(float(t), params) for t in ts]
    brackets = [
        (float(ts[i]), float(ts[i + 1]), zs[i], zs[i + 1])
        for i in range(len(ts) - 1)
        if zs[i] == 0 or zs[i] * zs[i + 1] < 0
    ]
    if not brackets:
        raise ConvergenceError(f"no sign change of Z(t) within 0.5 of {g0}", best=g0)
    a, b, za, zb = min(brackets, key=lambda br: abs(0.5 * (br[0] + br[1]) - g0))
    t = 0.5 * (a + b)
    for _ in range(4 * max_iter):
        z, dz, zabs, dabs = _z_and_dz(t, params)
        if zabs <= 1e3 * tol and dabs < simplicity_threshold:
            raise NonSimpleZeroError(f"|zeta'| = {dabs:.3g} near t = {t}", gamma=t)
        if (z < 0) == (za < 0):
            a, za = t, z
        else:
            b, zb = t, z
        step = -z / dz if dz != 0 else math.inf
        if abs(step) <= max(64 * EPS * abs(t), 1e-13) and zabs <= tol:
            return t
        nxt = t + step
        t = nxt if a < nxt < b else 0.5 * (a + b)
    raise ConvergenceError(f"bracketed refinement near {g0} did not converge", best=t)
