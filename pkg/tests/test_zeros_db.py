from pathlib import Path

import numpy as np
import pytest

from riesz_psi.errors import DomainError, NonSimpleZeroError, SizeError, ZeroFileError
from riesz_psi.zeros_db import (
    ZeroTable,
    cache_path_for,
    j_lambda,
    j_lambda_curve,
    load_zeros,
    loglog_slope,
    midpoint_height,
    select_height,
    tabulate_zeta_prime,
    theorem2_tail_diagnostic,
    write_zeros,
)
from riesz_psi.zeta_eval import zeta, zeta_prime

DATA = Path(__file__).resolve().parents[1] / "src" / "riesz_psi" / "data" / "zeros_10k.txt"


def _write(tmp_path, text, name="z.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_three(tmp_path):
    p = _write(tmp_path, "14.134725141734\n21.022039638771\n25.010857580145\n")
    t = load_zeros(p)
    assert len(t) == 3 and not t.tabulated
    assert 14 < t.ordinates[0] < 15
    assert len(t.checksum) == 64


def test_comments_skipped(tmp_path):
    p = _write(tmp_path, "# header\n# another\n14.134725141734\n")
    assert len(load_zeros(p)) == 1


@pytest.mark.parametrize(
    "text, line",
    [
        ("14.134725141734\n25.010857580145\n21.022039638771\n", 3),
        ("14.134725141734\n21.02x039638771\n", 2),
        ("14.134725141734\n21.0220\n", 2),
        ("14.134725141734\n\n21.022039638771\n", 2),
        ("13.134725141734\n", 1),
    ],
)
def test_bad_lines_report_line_number(tmp_path, text, line):
    p = _write(tmp_path, text)
    with pytest.raises(ZeroFileError) as info:
        load_zeros(p)
    assert info.value.line == line
    assert f":{line}:" in str(info.value)


def test_empty_and_missing(tmp_path):
    with pytest.raises(ZeroFileError):
        load_zeros(_write(tmp_path, "# only a comment\n"))
    with pytest.raises(ZeroFileError):
        load_zeros(tmp_path / "absent.txt")


def test_round_trip(tmp_path):
    t = load_zeros(DATA).head(50)
    p = tmp_path / "rt.txt"
    write_zeros(p, t.ordinates, comment="round trip")
    again = load_zeros(p)
    assert np.array_equal(again.ordinates, t.ordinates)


def test_bundled_table():
    t = load_zeros(DATA)
    assert len(t) == 10_000
    assert t.count_upto(100) == 29
    assert 14 < t.ordinates[0] < 15


@pytest.fixture(scope="module")
def small(tmp_path_factory):
    d = tmp_path_factory.mktemp("zeros")
    src = load_zeros(DATA).head(40)
    p = d / "z40.txt"
    write_zeros(p, src.ordinates)
    return tabulate_zeta_prime(load_zeros(p))


def test_tabulation_postconditions(small):
    g1 = small.ordinates[0]
    assert abs(zeta(complex(0.5, g1)).value) <= 1e-9
    assert abs(small.zeta_prime[0]) > 1e-6
    assert small.refined.all()


def test_cache_written_and_reused(small, monkeypatch):
    cpath = cache_path_for(small.source)
    assert cpath.exists()
    head = cpath.read_text().splitlines()[0]
    assert head == f"# source-sha256: {small.checksum}"

    import riesz_psi.zeros_db as zdb

    def boom(*a, **k):
        raise AssertionError("recomputed despite cache")

    monkeypatch.setattr(zdb, "refine_zero", boom)
    again = tabulate_zeta_prime(load_zeros(small.source))
    assert np.array_equal(again.zeta_prime, small.zeta_prime)
    assert np.array_equal(again.ordinates, small.ordinates)


def test_cache_reverifies(small):
    for i in (0, 17, 39):
        fresh = zeta_prime(complex(0.5, small.ordinates[i]))
        assert abs(fresh.value - small.zeta_prime[i]) <= fresh.err + small.zeta_prime_err[i]


def test_stale_cache_ignored(tmp_path):
    p = tmp_path / "z.txt"
    write_zeros(p, load_zeros(DATA).head(3).ordinates)
    t = tabulate_zeta_prime(load_zeros(p))
    # change the source; the old cache no longer matches the checksum
    write_zeros(p, load_zeros(DATA).head(4).ordinates)
    t2 = tabulate_zeta_prime(load_zeros(p))
    assert len(t2) == 4
    assert np.array_equal(t2.zeta_prime[:3], t.zeta_prime)


def test_simplicity_violation():
    t = ZeroTable(np.array([14.134725141734693]), zeta_prime=np.array([1e-8 + 0j]), zeta_prime_err=np.array([0.0]))
    from riesz_psi.zeros_db import _check_simple

    with pytest.raises(NonSimpleZeroError) as info:
        _check_simple(t.ordinates, t.zeta_prime, 1e-6)
    assert info.value.gamma == pytest.approx(14.1347, abs=1e-3)


def test_midpoints(small):
    g = small.ordinates
    assert midpoint_height(small, 0) == g[0] / 2
    assert midpoint_height(small, 3) == (g[2] + g[3]) / 2
    assert g[-1] < midpoint_height(small, len(small)) < g[-1] + (g[-1] - g[-2])
    assert select_height(small, 22.0) == (g[1] + g[2]) / 2


def test_j_lambda_examples(small):
    assert j_lambda(small, 0.5, 10.0) == 0
    # mpmath: sum over the 29 zeros below 100 of 1/|zeta'(rho)|
    assert j_lambda(small, 0.5, 100.0) == pytest.approx(16.753826438907811, rel=1e-9)
    assert j_lambda(small, 0.0, 100.0) == 29


def test_j_lambda_errors(small):
    with pytest.raises(SizeError, match="coverage"):
        j_lambda(small, 0.5, 1e6)
    with pytest.raises(DomainError):
        j_lambda(small, 1.5, 50.0)


def test_j_lambda_piecewise_constant(small):
    g = small.ordinates
    eps = 1e-9
    for i in (0, 5, 20):
        below = j_lambda(small, 0.5, g[i] - eps)
        at = j_lambda(small, 0.5, g[i])
        assert at - below == pytest.approx(1 / abs(small.zeta_prime[i]), rel=1e-12)
        assert j_lambda(small, 0.5, (g[i] + g[i + 1]) / 2) == at


def test_j_curve_monotone_and_slope(small):
    grid = np.linspace(20, small.max_ordinate, 12)
    J = j_lambda_curve(small, 0.5, grid)
    assert np.all(np.diff(J) >= 0)
    fit = loglog_slope(grid, J)
    assert 0.5 < fit.slope < 2


def test_tail_diagnostic(small):
    r2 = theorem2_tail_diagnostic(small, 2, 0.05, step=10.0)
    r3 = theorem2_tail_diagnostic(small, 3, 0.05, step=10.0)
    assert r2.nondecreasing
    assert np.all(r3.increments <= r2.increments + 1e-300)
    empty = theorem2_tail_diagnostic(small, 2, 0.05, grid=[5.0, 10.0])
    assert np.all(empty.partial_sums == 0)
    with pytest.raises(DomainError):
        theorem2_tail_diagnostic(small, 1, 0.05)
