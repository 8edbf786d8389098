import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from riesz_psi.arith import build_arith_table, riesz_mean_float
from riesz_psi.errors import DomainError, SizeError
from riesz_psi.explicit_formula import (
    FormulaConfig,
    compare,
    default_n,
    exponent_fit,
    main_term,
    main_term_coefficient,
    residual,
    residuals,
    residue_terms,
    sign_changes,
    zero_sum,
    zero_sum_pairs,
    zero_sum_refold,
)
from riesz_psi.zeros_db import load_zeros, tabulate_zeta_prime

DATA = Path(__file__).resolve().parents[1] / "src" / "riesz_psi" / "data" / "zeros_10k.txt"


@pytest.fixture(scope="module")
def zeros():
    return tabulate_zeta_prime(load_zeros(DATA).head(400))


@pytest.fixture(scope="module")
def arith():
    return build_arith_table(10**6)


def test_default_n():
    assert default_n(100) == 4
    assert default_n(10) == 3
    assert default_n(1.0) == 2


def test_main_term_linear_and_factorial():
    for k in (0, 2, 5):
        a = main_term(k, 1234.5)
        b = main_term(k, 2 * 1234.5)
        assert b.value == 2 * a.value
        r = main_term(k, 777.0).value / main_term(k + 1, 777.0).value
        assert r == pytest.approx(k + 2, rel=1e-15)


def test_main_coefficient_matches_mean_value(arith):
    c = main_term_coefficient(0).value
    # zeta(4) h(1) / zeta(2) = prod_p (1 - 1/(p(p+1))) = 0.7044422009991656...
    assert c == pytest.approx(0.7044422009991656, rel=1e-10)
    s0 = riesz_mean_float(0, 10**6, arith).value
    assert abs(s0 / 10**6 - c) < 0.005 * c


def test_main_term_cutoff_floor():
    with pytest.raises(DomainError):
        main_term(1, 10.0, prime_cutoff=999)


def test_residual_identity(arith):
    for smp in residuals(2, [10, 57.5, 1000, Fraction(12345, 7)], arith):
        exact = smp.s_exact - Fraction(smp.main)
        assert smp.residual == float(exact)  # correctly rounded
        assert abs(Fraction(smp.residual) - exact) <= abs(exact) * Fraction(1, 2**52)


def test_residual_sign_change_k2(arith):
    xs = np.logspace(1, 4, 60)
    E = [s.residual for s in residuals(2, xs, arith)]
    assert sign_changes(E) >= 1, f"E_2 keeps one sign on [10, 1e4]: min {min(E):.3g}, max {max(E):.3g}"


def test_residual_scale_k2(arith):
    assert abs(residual(2, 1000, arith).residual) < 1


def test_sign_changes_helper():
    assert sign_changes([1.0, -2.0, 0.0, -1.0, 3.0]) == 2
    assert sign_changes([-1.0, -0.5]) == 0


def test_zero_sum_empty_below_first_zero(zeros):
    cfg = FormulaConfig(2, zeros, (100.0,), n=2, zero_count=0)
    assert cfg.T < zeros.ordinates[0]
    assert zero_sum(cfg, 100.0).value == 0


def test_single_term_against_high_precision(zeros):
    cfg = FormulaConfig(2, zeros, (100.0,), n=2, zero_count=1)
    terms = residue_terms(cfg)
    term = terms.values[0] * np.exp(1j * terms.gammas[0] * math.log(100.0))
    # mpmath at 40 digits, same closed form, h_2 truncated at p <= 1e5
    ref = 0.00022478402259908076564 + 0.00030470506630204494876j
    assert abs(term - ref) <= terms.errs[0]
    assert abs(term - ref) < 1e-10 * abs(ref)
    assert zero_sum(cfg, 100.0).value == pytest.approx(2 * ref.real, rel=1e-12)


def test_term_decay(zeros):
    for k in (2, 3):
        cfg = FormulaConfig(k, zeros, (100.0,), n=2)
        terms = residue_terms(cfg)
        slope = np.polyfit(np.log(terms.gammas), np.log(terms.magnitudes), 1)[0]
        assert slope <= -(k - 1)


def test_terms_independent_of_x(zeros):
    cfg = FormulaConfig(2, zeros, (100.0,), n=2, zero_count=20)
    terms = residue_terms(cfg)
    for x in (10.0, 1e3, 1e5):
        mags = np.abs(terms.values * np.exp(1j * terms.gammas * math.log(x)))
        assert np.allclose(mags, terms.magnitudes, rtol=1e-14)


def test_pairs_equal_twice_refold(zeros):
    cfg = FormulaConfig(2, zeros, (100.0,), n=2, zero_count=10)
    for x in (30.0, 100.0, 5000.0):
        pairs = zero_sum_pairs(cfg, x)
        refold = zero_sum_refold(cfg, x)
        assert abs(pairs.value - 2 * refold.value) <= pairs.err + 2 * refold.err
        assert abs(pairs.imag) <= pairs.err
        assert zero_sum(cfg, x).value == 2 * refold.value


def test_n_stability(zeros):
    vals = []
    for n in (2, 3, 4):
        cfg = FormulaConfig(2, zeros, (100.0,), n=n, zero_count=10)
        vals.append(zero_sum(cfg, 100.0))
    for a in vals:
        for b in vals:
            assert abs(a.value - b.value) <= a.err + b.err


def test_config_validation(zeros):
    with pytest.raises(DomainError):
        FormulaConfig(2, zeros, (0.5,))
    with pytest.raises(DomainError):
        FormulaConfig(2, zeros, (10.0,), n=1)
    with pytest.raises(SizeError):
        FormulaConfig(2, zeros, (10.0,), zero_count=10**6)


def test_compare_summary(zeros, arith):
    cfg = FormulaConfig(2, zeros, tuple(np.logspace(1, 3, 12)), n=2, zero_count=100)
    res = compare(cfg, arith)
    s = res.summary
    assert len(res.samples) == 12
    assert 0 <= s.fraction_improved <= 1
    assert s.doubled_count == 200 and 0 <= s.doubling_fraction <= 1
    assert s.T == pytest.approx((zeros.ordinates[99] + zeros.ordinates[100]) / 2)
    assert any("x^4" in note for note in s.notes)
    for smp in res.samples:
        assert math.isfinite(smp.discrepancy)
        assert smp.discrepancy == smp.residual - smp.zero_sum / math.sqrt(smp.x)


def test_compare_rejects_small_x(zeros):
    with pytest.raises(DomainError):
        FormulaConfig(2, zeros, (0.9, 10.0))


def test_exponent_fit_band_one_vs_four_decades(arith):
    one = exponent_fit(2, np.logspace(2, 3, 30), arith, min_decades=1)
    four = exponent_fit(2, np.logspace(2, 6, 30), arith)
    assert (one.upper - one.lower) > (four.upper - four.lower), (one, four)


def test_exponent_fit_shifted_grid_k3(arith):
    a = exponent_fit(3, np.logspace(2, 6, 40), arith)
    b = exponent_fit(3, np.logspace(2.05, 5.95, 40), arith)
    assert abs(a.slope - b.slope) < 0.1


def test_exponent_fit_degenerate(arith):
    with pytest.raises(SizeError):
        exponent_fit(2, [100.0, 200.0, 300.0], arith)
    with pytest.raises(SizeError):
        exponent_fit(2, [100.0, 1e4], arith)
