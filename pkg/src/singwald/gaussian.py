"""Validated covariance matrices and reproducible multivariate normal draws.

Randomness contract
-------------------
All samplers in this package derive their streams from the counter-based
Philox-4x64 generator with a two-word key ``(seed, stream)``.  Normal
variates come from numpy's ziggurat implementation.  Identical
``(seed, stream, n)`` triples therefore reproduce draws bit for bit within
one build of the package; distinct stream indices give statistically
independent streams, which is how concurrent batches stay deterministic
regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError
from .poly import QuadraticForm

__all__ = [
    "CovarianceMatrix",
    "MvnSampler",
    "make_generator",
    "validate_covariance",
    "factor",
    "sample_mvn",
    "eigenvalues_of_product",
    "load_matrix",
    "parse_matrix",
]

# Eigenvalues below this fraction of the largest one count as zero when
# detecting rank.
RANK_RTOL = 1e-10
# Most negative eigenvalue tolerated, as a fraction of the largest.
_PSD_RTOL = 1e-8
_SYM_ATOL = 1e-10


def make_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by ``(seed, stream)``."""
    mask = (1 << 64) - 1
    return np.random.Generator(np.random.Philox(key=[seed & mask, stream & mask]))


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric positive-semidefinite matrix with positive diagonal.

    Construct through :func:`validate_covariance`, which symmetrizes the
    input exactly and detects the rank from the eigenvalue spectrum.
    """

    sigma: np.ndarray = field(repr=False)
    rank: int

    @property
    def k(self) -> int:
        return self.sigma.shape[0]

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.k


def validate_covariance(m) -> CovarianceMatrix:
    """Check symmetry, positive semidefiniteness, and the diagonal sign.

    The input is symmetrized as ``(m + m^T)/2`` once its asymmetry is within
    the absolute tolerance 1e-10; eigenvalues more negative than
    ``-1e-8 * max_eigenvalue`` are rejected.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"covariance must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("covariance contains non-finite entries")
    asym = np.abs(m - m.T).max()
    if asym > _SYM_ATOL:
        raise ValueError(f"matrix is asymmetric: max |m - m^T| = {asym:g}")
    sym = (m + m.T) / 2.0
    diag = np.diag(sym)
    if np.any(diag <= 0):
        raise ValueError(f"diagonal entries must be strictly positive, got {diag}")
    eigvals = np.linalg.eigvalsh(sym)
    top = eigvals[-1]
    if top <= 0:
        raise ValueError("matrix has no positive eigenvalue")
    if eigvals[0] < -_PSD_RTOL * top:
        raise ValueError(
            f"matrix is not positive semidefinite: eigenvalue {eigvals[0]:g}"
        )
    rank = int(np.sum(eigvals > RANK_RTOL * top))
    sym.flags.writeable = False
    return CovarianceMatrix(sigma=sym, rank=rank)


@dataclass(frozen=True)
class MvnSampler:
    """Zero-mean normal sampler backed by a square-root factor B, BB^T = Sigma.

    The factor has one column per retained eigenvalue, so rank-deficient
    covariances sample on their support without any degenerate noise.
    """

    factor_b: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return self.factor_b.shape[0]

    @property
    def m(self) -> int:
        return self.factor_b.shape[1]

    @classmethod
    def from_factor(cls, b) -> "MvnSampler":
        b = np.asarray(b, dtype=float)
        if b.ndim != 2:
            raise ValueError("factor must be a 2-d array")
        b = b.copy()
        b.flags.writeable = False
        return cls(factor_b=b)

    def standard_draws(self, n: int, seed: int, stream: int = 0) -> np.ndarray:
        """The underlying (n, m) standard normal block, for coupled sampling."""
        rng = make_generator(seed, stream)
        return rng.standard_normal((n, self.m))

    def sample(self, n: int, seed: int, stream: int = 0) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be at least 1")
        return self.standard_draws(n, seed, stream) @ self.factor_b.T


def factor(sigma: CovarianceMatrix) -> MvnSampler:
    """Square-root factorization via the symmetric eigendecomposition.

    Columns corresponding to eigenvalues below the rank threshold are
    dropped, so the factor is k x rank(Sigma).
    """
    eigvals, vecs = np.linalg.eigh(sigma.sigma)
    top = eigvals[-1]
    keep = eigvals > RANK_RTOL * top
    b = vecs[:, keep] * np.sqrt(np.maximum(eigvals[keep], 0.0))
    recon = np.abs(b @ b.T - sigma.sigma).max()
    cap = 1e-8 * np.abs(sigma.sigma).max()
    if recon > cap:
        raise ValueError(f"factorization failed: reconstruction error {recon:g}")
    return MvnSampler.from_factor(b)


def sample_mvn(sampler: MvnSampler, n: int, seed: int) -> np.ndarray:
    """n i.i.d. rows from N(0, BB^T); deterministic in (seed, n)."""
    return sampler.sample(n, seed)


def eigenvalues_of_product(a: QuadraticForm, sigma: CovarianceMatrix) -> np.ndarray:
    """Eigenvalues of A*Sigma, sorted descending.

    Computed as the eigenvalues of the symmetric matrix B^T A B where
    Sigma = BB^T, which makes them provably real.  For a rank-deficient
    Sigma the k - rank(Sigma) structural zeros are omitted: the returned
    vector has rank(Sigma) entries.
    """
    if a.k != sigma.k:
        raise ValueError(
            f"dimension mismatch: form is {a.k}x{a.k}, covariance {sigma.k}x{sigma.k}"
        )
    b = factor(sigma).factor_b
    lams = np.linalg.eigvalsh(b.T @ a.a @ b)
    return np.sort(lams)[::-1]


def parse_matrix(text: str, path: str = "<input>") -> np.ndarray:
    """Parse the matrix text format: a line with k, then k rows; `#` comments."""
    rows: list[list[float]] = []
    k = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if k is None:
            try:
                k = int(line)
            except ValueError:
                raise ParseError(
                    f"expected the dimension k on the first line, got {line!r}",
                    path,
                    lineno,
                ) from None
            if k < 1:
                raise ParseError(f"dimension must be positive, got {k}", path, lineno)
            continue
        try:
            row = [float(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"bad matrix row {line!r}", path, lineno) from None
        if len(row) != k:
            raise ParseError(
                f"row has {len(row)} entries, expected {k}", path, lineno
            )
        rows.append(row)
        if len(rows) > k:
            raise ParseError(f"more than {k} rows", path, lineno)
    if k is None:
        raise ParseError("empty matrix file", path)
    if len(rows) != k:
        raise ParseError(f"found {len(rows)} rows, expected {k}", path)
    return np.array(rows)


def load_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read(), path=str(path))
