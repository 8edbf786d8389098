"""Main term, residual and zero sum for Riesz means of n/psi(n).

With F(s) = sum n/psi(n) n^-s, the residue of F(s) x^s / (s (s+1) ... (s+k))
at s = 1 is the main term; every critical-line zero rho = 1/2 + i gamma gives
a simple pole of F at rho - 1 = -1/2 + i gamma (through 1/zeta(s+1)) with
residue

    A(gamma) x^(-1/2 + i gamma),

    A(gamma) = zeta(-1/2 + i gamma) zeta(2^(n-1) + 2^n i gamma) h_n(-1/2 + i gamma)
               / (zeta'(1/2 + i gamma) prod_{j=0}^{k} (j - 1/2 + i gamma)).

The zeros at +gamma and -gamma together contribute 2 Re(A x^(i gamma)) per
ordinate; :func:`zero_sum` returns that paired total Y, so that
E_k(x) ~ x^(-1/2) Y. :func:`zero_sum_refold` keeps the single real part.
"""
from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .approx import EPS, ApproxComplex, ApproxReal
from .arith import ArithTable, _check_order, riesz_mean_float, riesz_means
from .errors import DomainError, NonSimpleZeroError, SizeError
from .euler_products import EulerProductSpec, h_eval, h_n_eval
from .zeta_eval import DEFAULT_PARAMS, SIMPLICITY_THRESHOLD, EvalParams, chi, zeta
from .zeros_db import ZeroTable, midpoint_height

log = logging.getLogger(__name__)

MIN_PRIME_CUTOFF = 10**3
ZETA2 = math.pi**2 / 6
ZETA4 = math.pi**4 / 90

WINDOW_NOTE = (
    "contour height T is the midpoint above the last zero used; "
    "the x^4 <= T <= x^4+1 window is out of reach at this table size"
)


def default_n(x_max: float) -> int:
    """max(2, ceil(log(4 log x_max) / (2 log 2)) + 1)."""
    if x_max <= math.e ** 0.25:
        return 2
    return max(2, math.ceil(math.log(4 * math.log(x_max)) / (2 * math.log(2))) + 1)


@dataclass(frozen=True, eq=False)
class FormulaConfig:
    k: int
    zeros: ZeroTable
    x_grid: tuple = ()
    n: Optional[int] = None
    prime_cutoff: int = 10**5
    zero_count: Optional[int] = None  # None: every zero in the table
    h_tolerance: float = 1e-2  # relative, for h_n at the residue points
    params: EvalParams = DEFAULT_PARAMS

    def __post_init__(self):
        _check_order(self.k)
        object.__setattr__(self, "x_grid", tuple(float(x) for x in self.x_grid))
        for x in self.x_grid:
            if not x >= 1:
                raise DomainError(f"x must be >= 1, got {x}")
        if self.n is None:
            x_max = max(self.x_grid) if self.x_grid else 10.0
            object.__setattr__(self, "n", default_n(x_max))
        if self.n < 2:
            raise DomainError(f"n must be >= 2 so that -1/2 lies in the half-plane of h_n, got {self.n}")
        if self.prime_cutoff < MIN_PRIME_CUTOFF:
            raise DomainError(f"prime cutoff must be >= {MIN_PRIME_CUTOFF}")
        count = len(self.zeros) if self.zero_count is None else int(self.zero_count)
        if count < 0 or count > len(self.zeros):
            raise SizeError(f"zero count {count} outside 0..{len(self.zeros)}")
        object.__setattr__(self, "zero_count", count)

    @property
    def T(self) -> float:
        return midpoint_height(self.zeros, self.zero_count)

    def with_count(self, count: int) -> "FormulaConfig":
        return FormulaConfig(
            self.k, self.zeros, self.x_grid, self.n, self.prime_cutoff, count, self.h_tolerance, self.params
        )


@dataclass(frozen=True)
class RieszSample:
    k: int
    x: float
    s_exact: Optional[Fraction]
    s_float: float
    main: float
    residual: float
    zero_sum: Optional[float] = None
    error_budget: float = 0.0
    zero_count: int = 0
    T: Optional[float] = None

    @property
    def scaled_zero_sum(self) -> Optional[float]:
        if self.zero_sum is None:
            return None
        return self.zero_sum / math.sqrt(self.x)

    @property
    def discrepancy(self) -> Optional[float]:
        if self.zero_sum is None:
            return None
        return self.residual - self.scaled_zero_sum


# ---------------------------------------------------------------- main term

_coef_cache: dict = {}


def h1_at_one(prime_cutoff: int = 10**5, target_tolerance: float = 1e-3) -> ApproxReal:
    h = h_eval(1.0, prime_cutoff, target_tolerance)
    return ApproxReal(h.value.real, h.err, h.rigorous)


def main_term_coefficient(k: int, prime_cutoff: int = 10**5) -> ApproxReal:
    """zeta(4) h(1) / ((k+1)! zeta(2)), cached per (k, P)."""
    k = _check_order(k)
    if prime_cutoff < MIN_PRIME_CUTOFF:
        raise DomainError(f"prime cutoff must be >= {MIN_PRIME_CUTOFF}")
    key = (k, int(prime_cutoff))
    if key not in _coef_cache:
        h = h1_at_one(prime_cutoff)
        scale = ZETA4 / (math.factorial(k + 1) * ZETA2)
        value = scale * h.value
        _coef_cache[key] = ApproxReal(value, scale * h.err + 4 * EPS * abs(value), h.rigorous)
    return _coef_cache[key]


def main_term(k: int, x, prime_cutoff: int = 10**5) -> ApproxReal:
    c = main_term_coefficient(k, prime_cutoff)
    x = float(x)
    return ApproxReal(c.value * x, c.err * x + EPS * abs(c.value * x), c.rigorous)


def residual(k: int, x, table: ArithTable, prime_cutoff: int = 10**5) -> RieszSample:
    """E_k(x) = S_k(x) - main term, with S_k exact."""
    return residuals(k, [x], table, prime_cutoff)[0]


def residuals(k: int, xs: Sequence, table: ArithTable, prime_cutoff: int = 10**5) -> list:
    for x in xs:
        if not float(x) >= 1:
            raise DomainError(f"x must be >= 1, got {x}")
    exact = riesz_means(k, xs, table)
    out = []
    for x, s in zip(xs, exact):
        m = main_term(k, x, prime_cutoff)
        # correctly rounded difference of the exact mean and the float main term
        e = float(s - Fraction(m.value))
        out.append(RieszSample(k, float(x), s, float(s), m.value, e, error_budget=m.err))
    return out


def residual_float(k: int, x, table: ArithTable, prime_cutoff: int = 10**5) -> ApproxReal:
    """Float-path E_k(x) for large x, where the exact mean is too costly."""
    s = riesz_mean_float(k, x, table)
    m = main_term(k, x, prime_cutoff)
    v = s.value - m.value
    return ApproxReal(v, s.err + m.err + EPS * abs(v), m.rigorous)


# ---------------------------------------------------------------- zero sum


def residue_coefficient(gamma: float, zeta_prime_rho, k: int, n: int, spec: EulerProductSpec,
                        params: EvalParams = DEFAULT_PARAMS) -> ApproxComplex:
    """A(gamma) for one ordinate (gamma may be negative: the conjugate zero)."""
    s = complex(-0.5, gamma)
    zeta_left = chi(s, params) * zeta(1 - s, params)
    M = 2**n
    num = zeta_left * zeta(M * s + M, params) * h_n_eval(spec, s)
    den = zeta_prime_rho if isinstance(zeta_prime_rho, ApproxComplex) else ApproxComplex(zeta_prime_rho)
    for j in range(k + 1):
        den = den * complex(j - 0.5, gamma)
    return num / den


def _table_key(table: ZeroTable, count: int) -> str:
    h = hashlib.sha256(table.ordinates[:count].tobytes())
    return h.hexdigest()


_residue_cache: dict = {}


@dataclass(frozen=True)
class ResidueTerms:
    gammas: np.ndarray
    values: np.ndarray  # complex A(gamma)
    errs: np.ndarray
    rigorous: bool

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)


def residue_terms(config: FormulaConfig) -> ResidueTerms:
    """A(gamma) for the first ``config.zero_count`` zeros; cached."""
    count = config.zero_count
    table = config.zeros
    if count == 0:
        return ResidueTerms(np.zeros(0), np.zeros(0, complex), np.zeros(0), True)
    table.require_tabulated()
    key = (config.k, config.n, config.prime_cutoff, config.h_tolerance, config.params, _table_key(table, len(table)))
    cached = _residue_cache.get(key)
    if cached is not None and cached.gammas.size >= count:
        return ResidueTerms(cached.gammas[:count], cached.values[:count], cached.errs[:count], cached.rigorous)

    zp = table.zeta_prime[:count]
    small = np.flatnonzero(np.abs(zp) < SIMPLICITY_THRESHOLD)
    if small.size:
        g = float(table.ordinates[small[0]])
        raise NonSimpleZeroError(f"|zeta'(1/2 + i*{g})| below simplicity threshold", gamma=g)
    spec = EulerProductSpec(config.n, config.prime_cutoff, config.h_tolerance)
    vals = np.empty(count, complex)
    errs = np.empty(count)
    rig = True
    for i in range(count):
        g = float(table.ordinates[i])
        zpe = ApproxComplex(complex(zp[i]), float(table.zeta_prime_err[i]))
        a = residue_coefficient(g, zpe, config.k, config.n, spec, config.params)
        vals[i], errs[i] = a.value, a.err
        rig = rig and a.rigorous
    out = ResidueTerms(table.ordinates[:count].copy(), vals, errs, rig)
    _residue_cache[key] = out
    return out


def _phases(gammas: np.ndarray, x: float) -> np.ndarray:
    return np.exp(1j * gammas * math.log(x))


def _fold(terms: ResidueTerms, x: float, factor: float) -> ApproxReal:
    if terms.gammas.size == 0:
        return ApproxReal(0.0, 0.0)
    contrib = (terms.values * _phases(terms.gammas, x)).real
    value = factor * math.fsum(contrib.tolist())  # ascending gamma
    # phase rounding ~ gamma log x eps per term, plus the coefficient bounds
    phase_err = EPS * float(np.sum(terms.magnitudes * (terms.gammas * math.log(x) + 4)))
    err = factor * (float(np.sum(terms.errs)) + phase_err) + EPS * terms.gammas.size * abs(value)
    return ApproxReal(value, err, terms.rigorous)


def zero_sum(config: FormulaConfig, x) -> ApproxReal:
    """Y(x): the paired residue sum 2 Re sum_{0<gamma<T} A(gamma) x^(i gamma)."""
    x = float(x)
    if not x >= 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if config.k < 2:
        log.info("k=%d: zero-sum convergence in T is not guaranteed (experimental)", config.k)
    return _fold(residue_terms(config), x, 2.0)


def zero_sum_refold(config: FormulaConfig, x) -> ApproxReal:
    """Re sum_{0<gamma<T} A(gamma) x^(i gamma), i.e. half of :func:`zero_sum`."""
    x = float(x)
    if not x >= 1:
        raise DomainError(f"x must be >= 1, got {x}")
    return _fold(residue_terms(config), x, 1.0)


def zero_sum_pairs(config: FormulaConfig, x) -> ApproxComplex:
    """Sum over +gamma and -gamma computed separately, without folding.

    Each conjugate residue is evaluated from its own zeta'(1/2 - i gamma).
    The imaginary part should vanish up to the error bound.
    """
    x = float(x)
    terms = residue_terms(config)
    spec = EulerProductSpec(config.n, config.prime_cutoff, config.h_tolerance)
    total = ApproxComplex(0.0)
    zp = config.zeros.zeta_prime
    zperr = config.zeros.zeta_prime_err
    lx = math.log(x)
    for i, g in enumerate(terms.gammas.tolist()):
        plus = ApproxComplex(terms.values[i], terms.errs[i], terms.rigorous)
        conj_zp = ApproxComplex(complex(zp[i]).conjugate(), float(zperr[i]))
        minus = residue_coefficient(-g, conj_zp, config.k, config.n, spec, config.params)
        total = total + plus * complex(math.cos(g * lx), math.sin(g * lx))
        total = total + minus * complex(math.cos(g * lx), -math.sin(g * lx))
    return total


# ---------------------------------------------------------------- comparison


@dataclass(frozen=True)
class CompareSummary:
    fraction_improved: float  # share of x with |E - x^-1/2 Y| < |E|
    max_scaled_discrepancy: float  # max |discrepancy| sqrt(x)
    doubling_fraction: Optional[float]  # share where doubling the zeros did not increase |discrepancy|
    doubled_count: Optional[int]
    fitted_c: Optional[float]  # C' in |d| ~ K x^(-1 + C'/sqrt(log x))
    max_c_scaled: Optional[float]  # max |d| x^(1 - C'/sqrt(log x))
    zero_count: int
    T: float
    n: int
    notes: tuple = ()


@dataclass(frozen=True)
class Comparison:
    samples: list
    summary: CompareSummary


def _samples_with_zero_sum(config: FormulaConfig, base: list) -> list:
    out = []
    T = config.T
    for smp in base:
        y = zero_sum(config, smp.x)
        budget = smp.error_budget + y.err / math.sqrt(smp.x)
        out.append(
            RieszSample(smp.k, smp.x, smp.s_exact, smp.s_float, smp.main, smp.residual, y.value, budget,
                        config.zero_count, T)
        )
    return out


def _fit_c(xs: np.ndarray, d: np.ndarray):
    from scipy import stats

    keep = d != 0
    if keep.sum() < 3:
        return None, None
    lx = np.log(xs[keep])
    y = np.log(np.abs(d[keep])) + lx
    res = stats.linregress(np.sqrt(lx), y)
    c = float(res.slope)
    scaled = np.abs(d[keep]) * np.exp(lx - c * np.sqrt(lx))
    return c, float(np.max(scaled))


def compare(config: FormulaConfig, table: ArithTable, *, doubling: bool = True) -> Comparison:
    """Residual vs x^(-1/2) Y(x) on the configured grid.

    With ``doubling`` and at least twice ``zero_count`` zeros in the table,
    the summary also reports how often doubling the zero count did not
    increase the pointwise discrepancy.
    """
    if not config.x_grid:
        raise DomainError("empty x grid")
    base = residuals(config.k, config.x_grid, table, config.prime_cutoff)
    samples = _samples_with_zero_sum(config, base)
    xs = np.array([s.x for s in samples])
    E = np.array([s.residual for s in samples])
    d = np.array([s.discrepancy for s in samples])
    improved = float(np.mean(np.abs(d) < np.abs(E)))
    max_scaled = float(np.max(np.abs(d) * np.sqrt(xs)))

    doubling_fraction = doubled = None
    notes = [WINDOW_NOTE, f"T = {config.T!r} after {config.zero_count} zeros"]
    if doubling and config.zero_count > 0 and 2 * config.zero_count <= len(config.zeros):
        doubled = 2 * config.zero_count
        big = _samples_with_zero_sum(config.with_count(doubled), base)
        d2 = np.array([s.discrepancy for s in big])
        doubling_fraction = float(np.mean(np.abs(d2) <= np.abs(d)))
    elif doubling:
        notes.append("doubling check skipped: table too small")
    c_fit, c_scaled = _fit_c(xs, d)
    summary = CompareSummary(improved, max_scaled, doubling_fraction, doubled, c_fit, c_scaled,
                             config.zero_count, config.T, config.n, tuple(notes))
    return Comparison(samples, summary)


def sign_changes(values: Sequence[float]) -> int:
    v = np.sign(np.asarray(values, float))
    v = v[v != 0]
    return int(np.sum(v[1:] != v[:-1]))


# ---------------------------------------------------------------- exponent fit


@dataclass(frozen=True)
class ExponentFit:
    k: int
    slope: float
    intercept: float
    stderr: float
    lower: float
    upper: float
    confidence: float
    points: int
    excluded: int
    decades: float


def exponent_fit(
    k: int,
    x_grid: Sequence[float],
    table: ArithTable,
    prime_cutoff: int = 10**5,
    *,
    confidence: float = 0.95,
    min_decades: float = 2.0,
) -> ExponentFit:
    """Least-squares slope of log|E_k(x)| against log x (float path).

    Points whose residual is indistinguishable from 0 are dropped.
    """
    from scipy import stats

    xs = np.asarray(sorted(float(x) for x in x_grid))
    if xs.size < 3:
        raise SizeError("exponent fit needs at least three grid points")
    if xs[0] < 1:
        raise DomainError("x must be >= 1")
    decades = math.log10(xs[-1] / xs[0])
    if decades < min_decades - 1e-9:
        raise SizeError(f"grid spans {decades:.2f} decades, fewer than the required {min_decades}")
    table.require(int(xs[-1]))
    keep_x, keep_e = [], []
    for x in xs:
        e = residual_float(k, x, table, prime_cutoff)
        if abs(e.value) > e.err:
            keep_x.append(x)
            keep_e.append(abs(e.value))
    excluded = xs.size - len(keep_x)
    if len(keep_x) < 3:
        raise SizeError("fewer than three non-zero residuals on the grid")
    lx, ly = np.log(keep_x), np.log(keep_e)
    res = stats.linregress(lx, ly)
    q = stats.t.ppf(0.5 + confidence / 2, len(keep_x) - 2)
    half = q * res.stderr
    return ExponentFit(k, float(res.slope), float(res.intercept), float(res.stderr),
                       float(res.slope - half), float(res.slope + half), confidence,
                       len(keep_x), int(excluded), decades)
