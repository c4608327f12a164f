"""Eigendecompositions, eigenvector-count selection and the blind swap scan."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, NumericDomainError
from .signals import CovarianceEstimate

SYMMETRY_TOL = 1e-9
RANK_TOL = 1e-10
SCAN_MODES = ("self_swap", "paper_literal")


def _as_matrix(c) -> np.ndarray:
    if isinstance(c, CovarianceEstimate):
        c = c.matrix
    return np.asarray(c, dtype=float)


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Orthonormal eigenvectors (columns) with eigenvalues in descending order."""

    vectors: np.ndarray
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so that each column's largest-magnitude entry is positive.

    Ties in magnitude go to the lowest row index.
    """
    v = np.array(vectors, dtype=float)
    lead = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[lead, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def eig_sym(c) -> EigenBasis:
    """Full eigendecomposition of a symmetric matrix.

    Eigenvalues are sorted descending; equal values keep ascending order of
    the solver's output index, and the sign rule of
    :func:`apply_sign_convention` fixes each column.
    """
    a = _as_matrix(c)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidArgumentError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL * scale:
        raise InvalidArgumentError("matrix is not symmetric")
    try:
        w, v = np.linalg.eigh(0.5 * (a + a.T))
    except np.linalg.LinAlgError as exc:
        raise NumericDomainError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(-w, kind="stable")
    return EigenBasis(apply_sign_convention(v[:, order]), w[order])


def numerical_rank(values: Sequence[float], tol: float = RANK_TOL) -> int:
    """Count of eigenvalues above ``tol`` times the largest one."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 0
    top = float(np.max(v))
    if top <= 0:
        return 0
    return int(np.count_nonzero(v > tol * top))


def select_k(values1: Sequence[float], values2: Sequence[float], varsigma: float,
             rank_cap1: int | None = None, rank_cap2: int | None = None) -> int:
    """Line search for the number of leading eigenvectors.

    Starting from ``K = 1``, stop as soon as
    ``min_i (lam_K^(i) - lam_{K+1}^(i)) / sqrt(K) <= varsigma``; otherwise
    increment. The walk never exceeds ``min(rank_cap1, rank_cap2)``, and
    eigenvalues past the end of a list count as zero.
    """
    l1 = np.asarray(values1, dtype=float)
    l2 = np.asarray(values2, dtype=float)
    if l1.size == 0 or l2.size == 0:
        raise InvalidArgumentError("eigenvalue lists must be non-empty")
    if not varsigma > 0:
        raise InvalidArgumentError("varsigma must be positive")
    if rank_cap1 is None:
        rank_cap1 = numerical_rank(l1)
    if rank_cap2 is None:
        rank_cap2 = numerical_rank(l2)
    cap = max(1, min(rank_cap1, rank_cap2, l1.size, l2.size))

    def lam(vals, k):  # 1-based, zero beyond the list
        return vals[k - 1] if k <= vals.size else 0.0

    k = 1
    while k <= cap:
        gap = min(lam(l1, k) - lam(l1, k + 1), lam(l2, k) - lam(l2, k + 1)) / np.sqrt(k)
        if gap <= varsigma:
            break
        k += 1
    return min(k, cap)


@dataclass(frozen=True, eq=False)
class SelectedBasis:
    """Entrywise absolute value of the ``K`` leading eigenvectors."""

    abs_vectors: np.ndarray
    source_values: np.ndarray

    @property
    def K(self) -> int:
        return self.abs_vectors.shape[1]

    @property
    def n(self) -> int:
        return self.abs_vectors.shape[0]


def abs_basis(basis: EigenBasis, k: int) -> SelectedBasis:
    if not 1 <= k <= basis.n:
        raise InvalidArgumentError(f"K={k} outside [1, {basis.n}]")
    return SelectedBasis(np.abs(basis.vectors[:, :k]), basis.values[:k].copy())


@dataclass(frozen=True)
class BlindVerdict:
    """Outcome of the blind swap scan.

    ``offending`` lists ``(graph, a, b)`` triples: in ``self_swap`` mode the
    swaps of graph 1 or 2 whose distance is within ``eps``; in
    ``paper_literal`` mode (``graph == 0``) the swaps violating the bound.
    """

    identifiable: bool
    mode: str
    eps: float
    min_distance: float
    offending: tuple[tuple[int, int, int], ...] = ()

    @property
    def label(self) -> str:
        return "identifiable" if self.identifiable else "ambiguous"


def self_swap_distances(b: SelectedBasis) -> np.ndarray:
    """``D[a, b] = ||U - P_ab^T U||_F`` for every transposition.

    Only rows ``a`` and ``b`` move, so ``D[a, b] = sqrt(2) ||U_a - U_b||``.
    """
    u = b.abs_vectors
    sq = np.sum(u * u, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * u @ u.T
    d = np.sqrt(2.0 * np.maximum(d2, 0.0))
    np.fill_diagonal(d, 0.0)
    return d


def cross_swap_distances(b1: SelectedBasis, b2: SelectedBasis) -> np.ndarray:
    """``D[a, b] = ||U2 - P_ab^T U1||_F`` for every transposition ``(a, b)``."""
    u1, u2 = b1.abs_vectors, b2.abs_vectors
    s1, s2 = np.sum(u1 * u1, axis=1), np.sum(u2 * u2, axis=1)
    # R[i, j] = ||U2_i - U1_j||^2
    r = np.maximum(s2[:, None] + s1[None, :] - 2.0 * u2 @ u1.T, 0.0)
    base = float(np.trace(r))
    diag = np.diag(r)
    total = base - diag[:, None] - diag[None, :] + r + r.T
    d = np.sqrt(np.maximum(total, 0.0))
    np.fill_diagonal(d, np.sqrt(max(base, 0.0)))
    return d


def identifiability_blind(b1: SelectedBasis, b2: SelectedBasis, eps: float,
                          mode: str = "self_swap") -> BlindVerdict:
    """Swap scan on the absolute sample eigenbases.

    ``self_swap`` flags the problem as ambiguous when some transposition of
    either graph moves its basis by at most ``eps``. ``paper_literal``
    declares it identifiable when ``||U2 - P^T U1||_F <= eps`` for every
    transposition ``P``.
    """
    if mode not in SCAN_MODES:
        raise InvalidArgumentError(f"unknown scan mode {mode!r}")
    if b1.abs_vectors.shape != b2.abs_vectors.shape:
        raise InvalidArgumentError("bases must have the same n and K")
    if not eps > 0:
        raise InvalidArgumentError("eps must be positive")
    n = b1.n
    iu = np.triu_indices(n, 1)
    if mode == "self_swap":
        offending = []
        min_d = np.inf
        for gi, b in ((1, b1), (2, b2)):
            d = self_swap_distances(b)[iu]
            if d.size:
                min_d = min(min_d, float(d.min()))
            hits = np.nonzero(d <= eps)[0]
            offending.extend((gi, int(iu[0][h]), int(iu[1][h])) for h in hits)
        return BlindVerdict(not offending, mode, float(eps), float(min_d), tuple(offending))
    d = cross_swap_distances(b1, b2)[iu]
    bad = np.nonzero(d > eps)[0]
    offending = tuple((0, int(iu[0][h]), int(iu[1][h])) for h in bad)
    min_d = float(d.min()) if d.size else np.inf
    return BlindVerdict(not offending, mode, float(eps), min_d, offending)
