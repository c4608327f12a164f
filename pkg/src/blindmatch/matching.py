"""Linear assignment solvers and the spectral / blind matching pipelines."""
from __future__ import annotations

import heapq
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InsufficientDataError, InvalidArgumentError
from .graphs import Permutation, disagreement, is_identifiable_known
from .signals import CovarianceEstimate, SignalBatch, sample_covariance
from .spectral import (SCAN_MODES, abs_basis, eig_sym, identifiability_blind,
                       numerical_rank, select_k)

SOLVERS = ("hungarian", "greedy", "auto")
AUTO_GREEDY_FROM = 100


def _check_profit(profit) -> np.ndarray:
    g = np.asarray(profit, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
        raise InvalidArgumentError(f"profit matrix must be square and non-empty, got {g.shape}")
    if not np.all(np.isfinite(g)):
        raise InvalidArgumentError("profit matrix has non-finite entries")
    return g


def assignment_objective(profit, p: Permutation) -> float:
    """``tr(P^T G) = sum_k G[k, pi(k)]``."""
    g = np.asarray(profit, dtype=float)
    return float(np.sum(g[np.arange(p.n), p.array]))


def hungarian(profit) -> Permutation:
    """Exact maximum-profit assignment (scipy's shortest augmenting path)."""
    g = _check_profit(profit)
    rows, cols = linear_sum_assignment(g, maximize=True)
    return Permutation(tuple(cols[np.argsort(rows)].tolist()))


def greedy_assign(profit) -> Permutation:
    """Repeatedly take the largest uncovered entry and strike its row and column.

    Each row is sorted once; a heap holds every open row's best candidate and
    stale candidates (covered columns) are skipped lazily, giving
    O(n^2 log n) overall. Ties go to the smallest row, then column.
    """
    g = _check_profit(profit)
    n = g.shape[0]
    order = np.lexsort((np.broadcast_to(np.arange(n), g.shape), -g), axis=1)
    pointer = [0] * n
    heap = [(-g[i, order[i, 0]], i, int(order[i, 0])) for i in range(n)]
    heapq.heapify(heap)
    col_taken = np.zeros(n, dtype=bool)
    match = [-1] * n
    while heap:
        _, i, j = heapq.heappop(heap)
        if col_taken[j]:
            pointer[i] += 1
            nj = int(order[i, pointer[i]])
            heapq.heappush(heap, (-g[i, nj], i, nj))
            continue
        match[i] = j
        col_taken[j] = True
    return Permutation(tuple(match))


def solve_assignment(profit, solver: str = "auto") -> tuple[Permutation, str]:
    """Dispatch to a solver; ``auto`` picks greedy for n >= 100."""
    if solver not in SOLVERS:
        raise InvalidArgumentError(f"unknown solver {solver!r}")
    n = np.shape(profit)[0]
    if solver == "auto":
        solver = "greedy" if n >= AUTO_GREEDY_FROM else "hungarian"
    fn = hungarian if solver == "hungarian" else greedy_assign
    return fn(profit), solver


def fraction_correct(p_hat: Permutation, p_star: Permutation) -> float:
    """Share of nodes mapped to their true counterpart."""
    if p_hat.n != p_star.n:
        raise InvalidArgumentError("permutation sizes differ")
    return float(np.mean(p_hat.array == p_star.array))


@dataclass
class MatchReport:
    permutation: Permutation
    objective: float
    solver: str
    k_used: int
    identifiability: str
    disagreement: float | None = None
    fraction_correct: float | None = None
    wall_times: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["permutation"] = list(self.permutation.map)
        return d


def spectral_match_known(l1, l2, solver: str = "hungarian",
                         p_star: Permutation | None = None) -> MatchReport:
    """Error-free spectral matching with both Laplacians known.

    Solves ``max_P tr(P^T |V1| |V2|^T)`` over the full eigenbases, with
    eigenvalues in descending order in both graphs.
    """
    l1, l2 = np.asarray(l1, dtype=float), np.asarray(l2, dtype=float)
    if l1.shape != l2.shape:
        raise InvalidArgumentError("Laplacians must have equal size")
    t0 = time.perf_counter()
    b1, b2 = eig_sym(l1), eig_sym(l2)
    for i, b in ((1, b1), (2, b2)):
        gaps = -np.diff(b.values)
        if gaps.size and gaps.min() <= 1e-9 * max(1.0, abs(b.values[0])):
            warnings.warn(f"Laplacian {i} has repeated eigenvalues; spectral matching may be ambiguous",
                          RuntimeWarning, stacklevel=2)
    t1 = time.perf_counter()
    g = np.abs(b1.vectors) @ np.abs(b2.vectors).T
    p_hat, used = solve_assignment(g, solver)
    t2 = time.perf_counter()
    return MatchReport(
        permutation=p_hat,
        objective=assignment_objective(g, p_hat),
        solver=used,
        k_used=l1.shape[0],
        identifiability=is_identifiable_known(l1, l2).value,
        disagreement=disagreement(l1, l2, p_hat),
        fraction_correct=None if p_star is None else fraction_correct(p_hat, p_star),
        wall_times={"eig": t1 - t0, "assign": t2 - t1},
    )


@dataclass(frozen=True)
class BlindParams:
    """Blind matching knobs; ``None`` eps/varsigma resolve to n/20 and (10n)^-2."""

    eps: float | None = None
    varsigma: float | None = None
    solver: str = "auto"
    identifiability_mode: str = "self_swap"
    k_override: int | None = None

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise InvalidArgumentError(f"unknown solver {self.solver!r}")
        if self.identifiability_mode not in SCAN_MODES:
            raise InvalidArgumentError(f"unknown identifiability mode {self.identifiability_mode!r}")

    def resolved(self, n: int) -> tuple[float, float]:
        eps = n / 20 if self.eps is None else self.eps
        varsigma = (10 * n) ** -2.0 if self.varsigma is None else self.varsigma
        return eps, varsigma


def blind_match_covariances(c1, c2, params: BlindParams = BlindParams(),
                            p_star: Permutation | None = None,
                            laplacians: tuple | None = None) -> MatchReport:
    """Blind matching from two (sample or exact) covariance matrices."""
    m1 = c1.matrix if isinstance(c1, CovarianceEstimate) else np.asarray(c1, dtype=float)
    m2 = c2.matrix if isinstance(c2, CovarianceEstimate) else np.asarray(c2, dtype=float)
    if m1.shape != m2.shape:
        raise InvalidArgumentError(f"covariance sizes differ: {m1.shape} vs {m2.shape}")
    n = m1.shape[0]
    eps, varsigma = params.resolved(n)
    times = {}
    t = time.perf_counter()
    e1, e2 = eig_sym(m1), eig_sym(m2)
    times["eig"] = time.perf_counter() - t

    t = time.perf_counter()
    if params.k_override is not None:
        k = int(params.k_override)
    else:
        k = select_k(e1.values, e2.values, varsigma, numerical_rank(e1.values), numerical_rank(e2.values))
    u1, u2 = abs_basis(e1, k), abs_basis(e2, k)
    times["select_k"] = time.perf_counter() - t

    t = time.perf_counter()
    verdict = identifiability_blind(u1, u2, eps, params.identifiability_mode)
    times["identify"] = time.perf_counter() - t

    t = time.perf_counter()
    g = u1.abs_vectors @ u2.abs_vectors.T
    p_hat, used = solve_assignment(g, params.solver)
    times["assign"] = time.perf_counter() - t

    dis = None
    if laplacians is not None:
        dis = disagreement(laplacians[0], laplacians[1], p_hat)
    return MatchReport(
        permutation=p_hat,
        objective=assignment_objective(g, p_hat),
        solver=used,
        k_used=k,
        identifiability=verdict.label,
        disagreement=dis,
        fraction_correct=None if p_star is None else fraction_correct(p_hat, p_star),
        wall_times=times,
        details={"eps": eps, "varsigma": varsigma, "scan_mode": verdict.mode,
                 "scan_min_distance": verdict.min_distance,
                 "scan_offending": len(verdict.offending)},
    )


def blind_match(batch1: SignalBatch, batch2: SignalBatch, params: BlindParams = BlindParams(),
                p_star: Permutation | None = None, laplacians: tuple | None = None) -> MatchReport:
    """Match two graphs from their filtered signals alone.

    Computes both sample covariances, their eigenbases, picks K by line search
    (unless ``params.k_override`` is set), runs the swap scan and solves the
    assignment over ``|U1_K| |U2_K|^T``. An ambiguous scan is reported in the
    result rather than aborting.
    """
    if batch1.n != batch2.n:
        raise InvalidArgumentError(f"signal dimensions differ: {batch1.n} vs {batch2.n}")
    if min(batch1.M, batch2.M) < 2:
        raise InsufficientDataError("need at least 2 samples per graph")
    t = time.perf_counter()
    c1, c2 = sample_covariance(batch1), sample_covariance(batch2)
    cov_time = time.perf_counter() - t
    report = blind_match_covariances(c1, c2, params, p_star, laplacians)
    report.wall_times = {"covariance": cov_time, **report.wall_times}
    return report
