"""Critical-line zero tables: ingestion, zeta' tabulation with a persistent
cache, the discrete moments J_{-lambda}(T) and a tail-convergence diagnostic.

Zeros file format: optional '#' comment lines, then one ordinate per line as
a decimal literal with at least 9 fractional digits, strictly increasing.

Cache file (``<source>.zeta_prime.tsv``): '#' header lines carrying the
source checksum, then ``gamma<TAB>re<TAB>im<TAB>err`` rows written with
shortest round-trip floats.
"""
from __future__ import annotations

import hashlib
import logging
import math
import os
import re
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, NonSimpleZeroError, RieszPsiError, SizeError, ZeroFileError
from .zeta_eval import DEFAULT_PARAMS, SIMPLICITY_THRESHOLD, EvalParams, refine_zero, zeta_prime

log = logging.getLogger(__name__)

ORDINATE_RE = re.compile(r"^\d+\.\d{9,}$")
CACHE_SUFFIX = ".zeta_prime.tsv"
WRITE_DIGITS = 12


class TabulationError(RieszPsiError):
    """A refinement or zeta' evaluation failed for one ordinate."""

    def __init__(self, message, gamma):
        super().__init__(message)
        self.gamma = gamma


@dataclass(frozen=True, eq=False)
class ZeroTable:
    ordinates: np.ndarray
    zeta_prime: Optional[np.ndarray] = None  # complex zeta'(1/2 + i gamma)
    zeta_prime_err: Optional[np.ndarray] = None
    refined: Optional[np.ndarray] = None
    source: Optional[str] = None
    checksum: Optional[str] = None

    def __post_init__(self):
        g = np.asarray(self.ordinates, dtype=np.float64)
        if g.ndim != 1 or (g.size and np.any(np.diff(g) <= 0)):
            raise ZeroFileError("ordinates must be strictly increasing")
        object.__setattr__(self, "ordinates", g)
        if self.refined is None:
            object.__setattr__(self, "refined", np.zeros(g.size, dtype=bool))

    def __len__(self):
        return self.ordinates.size

    @property
    def tabulated(self) -> bool:
        return self.zeta_prime is not None

    @property
    def max_ordinate(self) -> float:
        return float(self.ordinates[-1]) if len(self) else 0.0

    def count_upto(self, T: float) -> int:
        """Number of ordinates gamma with 0 < gamma <= T."""
        return int(np.searchsorted(self.ordinates, T, side="right"))

    def head(self, count: int) -> "ZeroTable":
        count = int(count)
        if count > len(self):
            raise SizeError(f"table has {len(self)} zeros, {count} requested")
        cut = lambda a: None if a is None else a[:count]
        return ZeroTable(
            self.ordinates[:count],
            cut(self.zeta_prime),
            cut(self.zeta_prime_err),
            cut(self.refined),
            self.source,
            self.checksum,
        )

    def require_tabulated(self):
        if not self.tabulated:
            raise DomainError("zero table has no zeta' values; run tabulate_zeta_prime first")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def load_zeros(path) -> ZeroTable:
    """Parse a zeros file; raises ZeroFileError with the 1-based line number."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ZeroFileError(f"cannot read zeros file: {exc}", path=str(path)) from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    values = []
    prev = 0.0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            raise ZeroFileError(f"{path}:{lineno}: blank line", line=lineno, path=str(path))
        if not ORDINATE_RE.match(line):
            raise ZeroFileError(
                f"{path}:{lineno}: expected a decimal with >= 9 fractional digits, got {line!r}",
                line=lineno,
                path=str(path),
            )
        g = float(line)
        if g <= 14.0:
            raise ZeroFileError(f"{path}:{lineno}: ordinate {line} below the first zero", line=lineno, path=str(path))
        if g <= prev:
            raise ZeroFileError(f"{path}:{lineno}: ordinates not strictly increasing", line=lineno, path=str(path))
        values.append(g)
        prev = g
    if not values:
        raise ZeroFileError(f"{path}: no ordinates", path=str(path))
    return ZeroTable(np.array(values), source=str(path), checksum=_sha256(path))


def write_zeros(path, ordinates: Sequence[float], comment: Optional[str] = None) -> None:
    with open(path, "w") as fh:
        if comment:
            for c in comment.splitlines():
                fh.write(f"# {c}\n")
        for g in ordinates:
            fh.write(f"{g:.{WRITE_DIGITS}f}\n")


def cache_path_for(source) -> Path:
    return Path(str(source) + CACHE_SUFFIX)


def _read_cache(path: Path, checksum: str):
    if not path.exists():
        return None
    rows = []
    ok = False
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                if line.strip() == f"# source-sha256: {checksum}":
                    ok = True
                continue
            rows.append(line.rstrip("\n").split("\t"))
    if not ok:
        return None
    try:
        g = np.array([float(r[0]) for r in rows])
        zp = np.array([complex(float(r[1]), float(r[2])) for r in rows])
        err = np.array([float(r[3]) for r in rows])
    except (ValueError, IndexError):
        log.warning("ignoring unreadable zeta' cache %s", path)
        return None
    return g, zp, err


def _write_cache(path: Path, checksum: str, gammas, zps, errs) -> None:
    directory = path.parent
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(f"# source-sha256: {checksum}\n")
            fh.write("# gamma\tre_zeta_prime\tim_zeta_prime\terr\n")
            for g, z, e in zip(gammas, zps, errs):
                z = complex(z)
                fh.write(f"{float(g)!r}\t{z.real!r}\t{z.imag!r}\t{float(e)!r}\n")
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def tabulate_zeta_prime(
    table: ZeroTable,
    params: EvalParams = DEFAULT_PARAMS,
    *,
    count: Optional[int] = None,
    use_cache: bool = True,
    refine_tol: float = 1e-9,
    simplicity_threshold: float = SIMPLICITY_THRESHOLD,
) -> ZeroTable:
    """Refine each ordinate and attach zeta'(1/2 + i gamma).

    With ``use_cache`` and a known source file, results are read from (or
    written to) the cache next to it; a cache whose checksum does not match
    the source is ignored and rewritten.
    """
    if count is not None:
        table = table.head(count)
    n = len(table)
    cpath = cache_path_for(table.source) if (use_cache and table.source and table.checksum) else None
    done = 0
    gammas = np.empty(n)
    zps = np.empty(n, dtype=complex)
    errs = np.empty(n)
    if cpath is not None:
        cached = _read_cache(cpath, table.checksum)
        if cached is not None:
            if cached[0].size >= n:
                g, zp, err = (a[:n] for a in cached)
                _check_simple(g, zp, simplicity_threshold)
                return replace(table, ordinates=g, zeta_prime=zp, zeta_prime_err=err, refined=np.ones(n, bool))
            done = cached[0].size  # resume after the cached prefix
            gammas[:done], zps[:done], errs[:done] = cached

    for i in range(done, n):
        g0 = table.ordinates[i]
        try:
            g = refine_zero(float(g0), params, tol=refine_tol, simplicity_threshold=simplicity_threshold)
            d = zeta_prime(complex(0.5, g), params)
        except RieszPsiError as exc:
            raise TabulationError(f"gamma = {g0}: {exc}", gamma=float(g0)) from exc
        gammas[i], zps[i], errs[i] = g, d.value, d.err
    _check_simple(gammas, zps, simplicity_threshold)
    if cpath is not None and n > done:
        try:
            _write_cache(cpath, table.checksum, gammas, zps, errs)
        except OSError as exc:
            log.warning("could not write zeta' cache %s: %s", cpath, exc)
    return replace(table, ordinates=gammas, zeta_prime=zps, zeta_prime_err=errs, refined=np.ones(n, bool))


def _check_simple(gammas, zps, threshold):
    small = np.flatnonzero(np.abs(zps) < threshold)
    if small.size:
        g = float(gammas[small[0]])
        raise NonSimpleZeroError(f"|zeta'(1/2 + i*{g})| below simplicity threshold {threshold}", gamma=g)


def midpoint_height(table: ZeroTable, count: int) -> float:
    """Contour height T lying between gamma_count and gamma_{count+1}.

    count = 0 gives gamma_1 / 2. When count is the whole table the next
    ordinate is unknown, and T is placed half the last gap above gamma_count.
    """
    g = table.ordinates
    if count < 0 or count > len(table):
        raise SizeError(f"zero count {count} outside 0..{len(table)}")
    if count == 0:
        return 0.5 * float(g[0])
    if count < len(table):
        return 0.5 * float(g[count - 1] + g[count])
    gap = float(g[-1] - g[-2]) if len(table) > 1 else 0.5
    return float(g[-1]) + 0.5 * gap


def select_height(table: ZeroTable, T_request: float) -> float:
    """Midpoint between the ordinates bracketing ``T_request``."""
    return midpoint_height(table, table.count_upto(T_request))


def j_lambda(table: ZeroTable, lam: float, T: float) -> float:
    """J_{-lambda}(T) = sum_{0 < gamma <= T} |zeta'(1/2 + i gamma)|^(-2 lambda)."""
    if not lam < 1.5:
        raise DomainError(f"lambda must be < 3/2, got {lam}")
    if T > table.max_ordinate:
        raise SizeError(f"T = {T} beyond table coverage (max ordinate {table.max_ordinate})")
    cnt = table.count_upto(T)
    if lam == 0:
        return float(cnt)
    table.require_tabulated()
    mags = np.abs(table.zeta_prime[:cnt])
    return math.fsum((mags ** (-2.0 * lam)).tolist())


def j_lambda_curve(table: ZeroTable, lam: float, T_grid: Sequence[float]) -> np.ndarray:
    """J_{-lambda} on a grid, by one cumulative pass."""
    T_grid = np.asarray(T_grid, dtype=float)
    if T_grid.size and T_grid.max() > table.max_ordinate:
        raise SizeError(f"T = {T_grid.max()} beyond table coverage (max ordinate {table.max_ordinate})")
    if not lam < 1.5:
        raise DomainError(f"lambda must be < 3/2, got {lam}")
    counts = np.searchsorted(table.ordinates, T_grid, side="right")
    if lam == 0:
        return counts.astype(float)
    table.require_tabulated()
    terms = np.abs(table.zeta_prime) ** (-2.0 * lam)
    return np.array([math.fsum(terms[:c].tolist()) for c in counts])


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    stderr: float


def loglog_slope(T_grid, values) -> SlopeFit:
    """Least-squares slope of log(values) against log(T)."""
    from scipy import stats

    T_grid = np.asarray(T_grid, float)
    values = np.asarray(values, float)
    keep = values > 0
    if keep.sum() < 3:
        raise SizeError("need at least three positive points for a log-log fit")
    res = stats.linregress(np.log(T_grid[keep]), np.log(values[keep]))
    return SlopeFit(float(res.slope), float(res.intercept), float(res.stderr))


@dataclass(frozen=True)
class TailDiagnostic:
    k: int
    epsilon: float
    grid: np.ndarray
    partial_sums: np.ndarray
    increments: np.ndarray
    head_increment: float
    tail_increment: float

    @property
    def nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.partial_sums) >= 0))

    @property
    def decay_ratio(self) -> float:
        if self.tail_increment == 0:
            return math.inf if self.head_increment > 0 else math.nan
        return self.head_increment / self.tail_increment

    @property
    def decaying(self) -> bool:
        return self.nondecreasing and self.decay_ratio >= 10


def theorem2_tail_diagnostic(
    table: ZeroTable,
    k: int,
    epsilon: float,
    grid: Optional[Sequence[float]] = None,
    step: float = 50.0,
) -> TailDiagnostic:
    """Partial sums of sum_{gamma <= T} gamma^(-(k - 1/2) + eps) / |zeta'(rho)|.

    ``increments`` are the per-cell growths on the grid. The head increment
    averages the cells that hold the first ten ordinates, the tail increment
    the cells holding the last tenth of the table.
    """
    if k < 2:
        raise DomainError("the convergence diagnostic needs k >= 2")
    table.require_tabulated()
    if grid is None:
        grid = np.arange(step, table.max_ordinate + step, step)
        grid = np.minimum(grid, table.max_ordinate)
        grid = np.unique(grid)
    grid = np.asarray(grid, dtype=float)
    g = table.ordinates
    terms = g ** (-(k - 0.5) + epsilon) / np.abs(table.zeta_prime)
    counts = np.searchsorted(g, grid, side="right")
    partial = np.array([math.fsum(terms[:c].tolist()) for c in counts])
    increments = np.diff(np.concatenate([[0.0], partial]))

    head_increment = tail_increment = 0.0
    if len(table) >= 10 and grid.size:
        cell_of = np.searchsorted(grid, g, side="left")  # cell index holding each zero
        head_cells = np.unique(cell_of[:10])
        head_cells = head_cells[head_cells < grid.size]
        tail_start = int(math.floor(0.9 * len(table)))
        tail_cells = np.unique(cell_of[tail_start:])
        tail_cells = tail_cells[tail_cells < grid.size]
        if head_cells.size:
            head_increment = float(np.mean(increments[head_cells]))
        if tail_cells.size:
            tail_increment = float(np.mean(increments[tail_cells]))
    return TailDiagnostic(k, epsilon, grid, partial, increments, head_increment, tail_increment)
