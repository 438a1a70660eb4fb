"""Wald test of a vanishing tetrad with singularity-aware p-values.

The tetrad of a covariance matrix Theta at columns (i, j, k, l) is the
off-diagonal subdeterminant

    gamma = theta_ik * theta_jl - theta_il * theta_jk,

which vanishes under a one-factor model.  Its Wald statistic is

    T = n * gamma_hat^2 / (grad^T Sigma_C grad),

where the gradient runs over the pair order C = (ik, il, jk, jl) and
Sigma_C is the Gaussian fourth-moment covariance of the sample covariances
restricted to C.  At a regular null point T is asymptotically chi-square-1;
when all four cross covariances vanish the limit is the tetrad singular law
(R^2*U^2/4), which is stochastically smaller, so the chi-square-1 cut stays
conservative.  Both tail probabilities are always reported and a gradient
heuristic flags which regime the data resemble; the hint never changes the
p-values.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ParseError
from .laws import chi2_sf, tetrad_singular_cdf

__all__ = [
    "DataMatrix",
    "TetradIndex",
    "WaldReport",
    "empirical_covariance",
    "tetrad_stat",
    "asymptotic_v_normal",
    "wald_tetrad_test",
    "all_tetrads",
    "load_data_csv",
]


@dataclass(frozen=True)
class DataMatrix:
    """n observations of p >= 4 jointly measured variables."""

    values: np.ndarray
    columns: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("data must be a 2-d array")
        n, p = values.shape
        if p < 4:
            raise ValueError(f"need at least 4 columns, got {p}")
        if n < p + 1:
            raise ValueError(f"need at least p + 1 = {p + 1} rows, got {n}")
        if not np.all(np.isfinite(values)):
            raise ValueError("data contains non-finite entries")
        if self.columns is not None and len(self.columns) != p:
            raise ValueError("column name count does not match data width")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class TetradIndex:
    """Four distinct zero-based column indices (i, j, k, l)."""

    i: int
    j: int
    k: int
    l: int

    def __post_init__(self):
        idx = (self.i, self.j, self.k, self.l)
        if len(set(idx)) != 4:
            raise ValueError(f"tetrad indices must be distinct, got {idx}")
        if min(idx) < 0:
            raise ValueError(f"tetrad indices must be nonnegative, got {idx}")

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Covariance pairs in the gradient order C = (ik, il, jk, jl)."""
        return (
            (self.i, self.k),
            (self.i, self.l),
            (self.j, self.k),
            (self.j, self.l),
        )


@dataclass(frozen=True)
class WaldReport:
    gamma_hat: float
    t_stat: float
    p_regular: float
    p_singular: float
    gradient_norm: float
    regime_hint: str  # "regular" or "near_singular"


def empirical_covariance(data: DataMatrix | np.ndarray) -> np.ndarray:
    """Mean-centered second moment with divisor n (not n - 1)."""
    values = data.values if isinstance(data, DataMatrix) else np.asarray(data, float)
    if values.ndim != 2 or values.shape[0] < 2:
        raise ValueError("need a 2-d array with at least two rows")
    if not np.all(np.isfinite(values)):
        raise ValueError("data contains non-finite entries")
    centered = values - values.mean(axis=0)
    return centered.T @ centered / values.shape[0]


def tetrad_stat(theta: np.ndarray, idx: TetradIndex) -> tuple[float, np.ndarray]:
    """Tetrad value and its exact gradient over the pairs C = (ik, il, jk, jl)."""
    theta = np.asarray(theta, dtype=float)
    i, j, k, l = idx.i, idx.j, idx.k, idx.l
    gamma = theta[i, k] * theta[j, l] - theta[i, l] * theta[j, k]
    grad = np.array([theta[j, l], -theta[j, k], -theta[i, l], theta[i, k]])
    return float(gamma), grad


def asymptotic_v_normal(theta: np.ndarray, pairs) -> np.ndarray:
    """Gaussian fourth-moment covariance of sample covariances.

    Entry for row pair (a, b) and column pair (c, d) is
    theta_ac * theta_bd + theta_ad * theta_bc.
    """
    theta = np.asarray(theta, dtype=float)
    if np.abs(theta - theta.T).max() > 1e-10 * max(np.abs(theta).max(), 1e-300):
        raise ValueError("theta must be symmetric")
    pairs = list(pairs)
    m = len(pairs)
    v = np.empty((m, m))
    for r, (a, b) in enumerate(pairs):
        for s, (c, d) in enumerate(pairs):
            v[r, s] = theta[a, c] * theta[b, d] + theta[a, d] * theta[b, c]
    return v


def wald_tetrad_test(data: DataMatrix, idx: TetradIndex) -> WaldReport:
    """Tetrad Wald statistic with both the regular and the singular p-value."""
    if max(idx.i, idx.j, idx.k, idx.l) >= data.p:
        raise ValueError(
            f"tetrad indices {idx} out of range for p={data.p} columns"
        )
    n = data.n
    if n <= 4:
        raise ValueError("need more than 4 observations")
    theta = empirical_covariance(data)
    gamma, grad = tetrad_stat(theta, idx)
    vmat = asymptotic_v_normal(theta, idx.pairs)
    denom = float(grad @ vmat @ grad)
    if denom <= 0.0 or not np.isfinite(denom):
        raise ValueError(
            "estimated asymptotic variance is not positive; the empirical "
            "covariance is degenerate, collect more data"
        )
    t_stat = n * gamma**2 / denom
    grad_sq = float(grad @ grad)
    threshold = 4.0 * float(np.diag(vmat).max()) * np.sqrt(np.log(n) / n)
    return WaldReport(
        gamma_hat=gamma,
        t_stat=float(t_stat),
        p_regular=float(chi2_sf(t_stat, 1)),
        p_singular=float(1.0 - tetrad_singular_cdf(t_stat)),
        gradient_norm=float(np.sqrt(grad_sq)),
        regime_hint="near_singular" if grad_sq < threshold else "regular",
    )


def all_tetrads(p: int):
    """Every tetrad index on p columns: each 4-subset in its 3 pairings."""
    for a, b, c, d in combinations(range(p), 4):
        yield TetradIndex(a, b, c, d)
        yield TetradIndex(a, c, b, d)
        yield TetradIndex(a, d, b, c)


def _looks_like_header(row: list[str]) -> bool:
    for tok in row:
        try:
            float(tok)
        except ValueError:
            return True
    return False


def load_data_csv(path) -> DataMatrix:
    """Read a CSV data matrix; a non-numeric first row is taken as a header."""
    with open(path, encoding="utf-8", newline="") as fh:
        return _parse_data_csv(fh, path=str(path))


def parse_data_csv(text: str, path: str = "<input>") -> DataMatrix:
    return _parse_data_csv(io.StringIO(text), path=path)


def _parse_data_csv(fh, path: str) -> DataMatrix:
    reader = csv.reader(fh)
    rows: list[list[float]] = []
    columns: tuple[str, ...] | None = None
    width = None
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not tok.strip() for tok in row):
            continue
        row = [tok.strip() for tok in row]
        if width is None and _looks_like_header(row):
            columns = tuple(row)
            width = len(row)
            continue
        if width is None:
            width = len(row)
        if len(row) != width:
            raise ParseError(
                f"row has {len(row)} fields, expected {width}", path, lineno
            )
        try:
            rows.append([float(tok) for tok in row])
        except ValueError as exc:
            raise ParseError(f"bad numeric field: {exc}", path, lineno) from None
    if not rows:
        raise ParseError("no data rows found", path)
    try:
        return DataMatrix(values=np.array(rows), columns=columns)
    except ValueError as exc:
        raise ParseError(str(exc), path) from exc
