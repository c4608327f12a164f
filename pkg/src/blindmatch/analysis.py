"""Spectral diagnostics, matching-error bounds and inequality verifiers.

The universal constants in the concentration bounds are unknown; they are
taken as user parameters (default 1.0), so the evaluated bounds describe
shape and monotonicity rather than calibrated probabilities.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidArgumentError, NumericDomainError
from .graphs import Permutation
from .matching import fraction_correct  # noqa: F401  (re-exported metric)
from .signals import CovarianceEstimate, SignalBatch
from .spectral import EigenBasis, SelectedBasis

INEQUALITY_SLACK = 1e-9


# -- spectral quantities -----------------------------------------------------

def spectral_gaps(values) -> np.ndarray:
    """``delta_k = min(lam_k - lam_{k+1}, lam_{k-1} - lam_k)`` with infinite ends.

    ``values`` must be sorted descending. A single eigenvalue has gap ``inf``.
    """
    v = np.asarray(values, dtype=float)
    padded = np.concatenate(([np.inf], v, [-np.inf]))
    below = padded[1:-1] - padded[2:]
    above = padded[:-2] - padded[1:-1]
    return np.minimum(below, above)


def effective_rank(c) -> float:
    """``tr(C) / ||C||_2`` for a positive semidefinite matrix."""
    m = c.matrix if isinstance(c, CovarianceEstimate) else np.asarray(c, dtype=float)
    top = float(np.max(np.abs(np.linalg.eigvalsh(m))))
    if top == 0:
        raise NumericDomainError("effective rank of the zero matrix is undefined")
    return float(np.trace(m)) / top


def spectral_norm(m) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    m = np.asarray(m, dtype=float)
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (m + m.T)))))


def kappa_estimate(batch: SignalBatch, basis: EigenBasis) -> np.ndarray:
    """Empirical ``mean_m ||y_m y_m^T v_k||^2 - lam_k`` for every ``k``.

    An estimate of the fourth-moment constant in the eigenvalue
    concentration bound, not its population value.
    """
    y = batch.samples
    proj = y @ basis.vectors                   # (M, n): y_m^T v_k
    norms = np.sum(y * y, axis=1)[:, None]     # ||y_m||^2
    return np.mean(norms * proj**2, axis=0) - basis.values


@dataclass(frozen=True, eq=False)
class SpectralDiagnostics:
    K: int
    gaps1: np.ndarray
    gaps2: np.ndarray
    delta_min_k: float
    delta_norms: tuple[float, float]
    effective_ranks: tuple[float, float]
    kappa_hat: tuple | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gaps1"] = self.gaps1.tolist()
        d["gaps2"] = self.gaps2.tolist()
        if self.kappa_hat is not None:
            d["kappa_hat"] = [np.asarray(k).tolist() for k in self.kappa_hat]
        return d


def spectral_diagnostics(true1: EigenBasis, true2: EigenBasis,
                         est1: CovarianceEstimate, est2: CovarianceEstimate, k: int,
                         batches: tuple[SignalBatch, SignalBatch] | None = None) -> SpectralDiagnostics:
    """Gaps, ``delta_min,K``, ``||C_hat - C||_2`` and effective ranks for both graphs."""
    if true1.n != true2.n or est1.n != true1.n or est2.n != true2.n:
        raise InvalidArgumentError("inconsistent matrix sizes")
    if not 1 <= k <= true1.n:
        raise InvalidArgumentError(f"K={k} outside [1, {true1.n}]")
    g1, g2 = spectral_gaps(true1.values), spectral_gaps(true2.values)
    dnorms = tuple(spectral_norm(e.matrix - t.reconstruct()) for t, e in ((true1, est1), (true2, est2)))
    ranks = tuple(float(np.sum(t.values) / np.max(np.abs(t.values))) for t in (true1, true2))
    kappa = None
    if batches is not None:
        kappa = (kappa_estimate(batches[0], true1), kappa_estimate(batches[1], true2))
    return SpectralDiagnostics(
        K=k, gaps1=g1, gaps2=g2,
        delta_min_k=float(min(g1[:k].min(), g2[:k].min())),
        delta_norms=dnorms, effective_ranks=ranks, kappa_hat=kappa,
    )


def eigenvalues_aligned(est_values, true_values) -> np.ndarray:
    """Per-index test ``|lam_hat_k - lam_k| < delta_k / 2``."""
    est, tru = np.asarray(est_values, dtype=float), np.asarray(true_values, dtype=float)
    return np.abs(est - tru) < spectral_gaps(tru) / 2


def alignment_probability_bound(kappa: float, m: int, gap: float, sigma2: float) -> float:
    """Lower bound ``1 - 4 kappa / (M (delta - 2 sigma^2)^2)`` on eigenvalue alignment."""
    if sigma2 > gap / 2:
        raise NumericDomainError("noise variance exceeds half the spectral gap")
    if gap - 2 * sigma2 == 0:
        return float("-inf")
    return 1.0 - 4.0 * kappa / (m * (gap - 2.0 * sigma2) ** 2)


def covariance_deviation_bound(sigma2: float, r: float, n: int, m: int, t: float,
                               c_const: float = 1.0) -> float:
    """``sigma^2 + sqrt(C r ln(n/t) / M)``: high-probability cap on ``||Delta||_2``."""
    if not 0 < t < n:
        raise InvalidArgumentError("need 0 < t < n")
    return sigma2 + float(np.sqrt(c_const * r * np.log(n / t) / m))


# -- leakage margin ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LeakageProfile:
    c: np.ndarray
    l: np.ndarray
    rho: float

    def to_dict(self) -> dict:
        return {"c": self.c.tolist(), "l": self.l.tolist(), "rho": self.rho}


def _abs_cols(b) -> np.ndarray:
    return b.abs_vectors if isinstance(b, SelectedBasis) else np.abs(np.asarray(b, dtype=float))


def leakage_profile(vbar1, vbar2, p_star: Permutation, literal: bool = False) -> LeakageProfile:
    """Correct-match entries ``c_j``, best wrong entries ``l_j`` and ``rho``.

    Column ``j`` of ``G = |V1_K| |V2_K|^T`` belongs to node ``j`` of graph 2,
    whose true counterpart is row ``pi*^{-1}(j)``; ``l_j`` is the column
    maximum over all other rows. With ``literal=True`` the excluded row is
    ``j`` itself instead. Feeding sample bases gives the blind surrogate.
    """
    u1, u2 = _abs_cols(vbar1), _abs_cols(vbar2)
    if u1.shape != u2.shape or u1.shape[0] != p_star.n:
        raise InvalidArgumentError("bases and permutation must agree in n and K")
    n = p_star.n
    g = u1 @ u2.T
    cols = np.arange(n)
    true_rows = p_star.inverse().array
    c = g[true_rows, cols]
    masked = g.copy()
    masked[cols if literal else true_rows, cols] = -np.inf
    l = masked.max(axis=0) if n > 1 else np.zeros(1)
    return LeakageProfile(c, l, float(np.min(c - l)))


# -- bound evaluators --------------------------------------------------------

@dataclass(frozen=True)
class BoundParams:
    """Unknown constants of the error-probability bound (user supplied)."""

    c_const: float = 1.0
    m0: int = 1

    def __post_init__(self):
        if not (self.c_const > 0 and self.m0 > 0):
            raise InvalidArgumentError("bound constants must be positive")


def noise_ceiling(rho: float, delta_min_k: float, k: int) -> float:
    """``rho delta^2 / (16 K + 8 sqrt(2K) delta)``; non-positive when ``rho <= 0``."""
    if k < 1:
        raise InvalidArgumentError("K must be at least 1")
    if delta_min_k < 0:
        raise InvalidArgumentError("spectral gap must be non-negative")
    if delta_min_k == 0:
        return 0.0
    return rho * delta_min_k**2 / (16 * k + 8 * np.sqrt(2 * k) * delta_min_k)


def gap_bound_value(delta1: float, delta2: float, delta_min_k: float, k: int, n: int) -> float:
    """Upper bound on ``K - tr(P_hat^T |V1_K| |V2_K|^T)`` from the perturbation norms."""
    if not delta_min_k > 0:
        raise NumericDomainError("minimum spectral gap must be positive")
    linear = 2 * n * np.sqrt(2 * k) / delta_min_k * (delta1 + delta2)
    quadratic = 4 * k / delta_min_k**2 * (delta1**2 + delta2**2 + 2 * (n + 1) * delta1 * delta2)
    return float(linear + quadratic)


def optimality_gap_bound(diag: SpectralDiagnostics, k: int | None = None, n: int | None = None) -> float:
    k = diag.K if k is None else k
    n = diag.gaps1.size if n is None else n
    return gap_bound_value(diag.delta_norms[0], diag.delta_norms[1], diag.delta_min_k, k, n)


def realized_optimality_gap(p_hat: Permutation, vbar1, vbar2) -> float:
    """``K - tr(P_hat^T |V1_K| |V2_K|^T)`` on exact (population) bases."""
    u1, u2 = _abs_cols(vbar1), _abs_cols(vbar2)
    k = u1.shape[1]
    return float(k - np.sum(u1 * u2[p_hat.array]))


def error_probability_bound(m: int, n: int, sigma2: float, sigma_bar2: float,
                            params: BoundParams = BoundParams(), clip: bool = True) -> float:
    """``2n exp(-(M / (n C)) (sigma_bar^2 - sigma^2)^2)``, clipped to [0, 1] by default."""
    if sigma2 > sigma_bar2:
        raise NumericDomainError(
            f"noise condition violated: sigma^2={sigma2} exceeds the ceiling {sigma_bar2}")
    if m < params.m0:
        raise NumericDomainError(f"sample condition violated: M={m} < M0={params.m0}")
    value = 2 * n * np.exp(-(m / (n * params.c_const)) * (sigma_bar2 - sigma2) ** 2)
    return float(min(1.0, max(0.0, value))) if clip else float(value)


# -- inequality verifiers ----------------------------------------------------

def sin_angle(u, v) -> float:
    """``sin`` of the angle between two vectors, as ``||(I - v v^T) u||``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    return float(min(1.0, np.linalg.norm(u - v * (v @ u))))


def _cols(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def _align_signs(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    s = np.sign(np.sum(u * v, axis=0))
    s[s == 0] = 1.0
    return u * s


def _sines(u, v) -> np.ndarray:
    return np.array([sin_angle(u[:, k], v[:, k]) for k in range(u.shape[1])])


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool


def verify_lemma3(u1, u2, v1, v2, p_star: Permutation) -> InequalityCheck:
    """``K - sum_k |u1_k^T P* u2_k| <= sum_k (sin(u1_k, v1_k) + sin(u2_k, v2_k))^2``.

    Sample columns are sign-aligned with their population columns first.
    """
    v1, v2 = _cols(v1), _cols(v2)
    u1, u2 = _align_signs(_cols(u1), v1), _align_signs(_cols(u2), v2)
    k = u1.shape[1]
    lhs = k - float(np.sum(np.abs(np.sum(u1 * u2[p_star.array], axis=0))))
    rhs = float(np.sum((_sines(u1, v1) + _sines(u2, v2)) ** 2))
    return InequalityCheck(lhs, rhs, lhs <= rhs + INEQUALITY_SLACK)


def verify_lemma4(u1, u2, v1, v2, p_star: Permutation | None = None) -> InequalityCheck:
    """Max-norm of the profit perturbation against the summed sine terms.

    ``||U1 U2^T - V1 V2^T||_max <= 2 a b + sqrt(2) (a + b)`` on absolute
    bases, with ``a^2, b^2`` the summed squared sines of graphs 1 and 2.
    ``p_star`` is accepted for signature symmetry with :func:`verify_lemma3`.
    """
    u1, u2, v1, v2 = (_cols(x) for x in (u1, u2, v1, v2))
    e = np.abs(u1) @ np.abs(u2).T - np.abs(v1) @ np.abs(v2).T
    lhs = float(np.max(np.abs(e)))
    a = float(np.sqrt(np.sum(_sines(u1, v1) ** 2)))
    b = float(np.sqrt(np.sum(_sines(u2, v2) ** 2)))
    rhs = 2 * a * b + np.sqrt(2) * (a + b)
    return InequalityCheck(lhs, float(rhs), lhs <= rhs + INEQUALITY_SLACK)


@dataclass(frozen=True)
class DavisKahanCheck:
    sin_angle: float
    bound: float
    holds: bool


def davis_kahan_check(u_k, v_k, delta_norm: float, gap_k: float) -> DavisKahanCheck:
    """``sin(u_k, v_k) <= 2 ||Delta||_2 / delta_k``."""
    if not gap_k > 0:
        raise NumericDomainError("spectral gap must be positive")
    s = sin_angle(u_k, v_k)
    bound = 2.0 * delta_norm / gap_k
    return DavisKahanCheck(s, bound, s <= bound + INEQUALITY_SLACK)


@dataclass(frozen=True)
class UnionBoundCheck:
    p_sum: float
    p_x: float
    p_y: float
    stderr: float
    holds: bool


def lemma6_check(x, y, t: float, zeta: float, n_se: float = 3.0) -> UnionBoundCheck:
    """Empirical ``Pr(x + y >= t) <= Pr(x >= zeta t) + Pr(y >= (1 - zeta) t)``."""
    if not 0 <= zeta <= 1:
        raise InvalidArgumentError("zeta must lie in [0, 1]")
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    m = x.size
    p_sum = float(np.mean(x + y >= t))
    p_x = float(np.mean(x >= zeta * t))
    p_y = float(np.mean(y >= (1 - zeta) * t))
    se = float(np.sqrt(sum(p * (1 - p) for p in (p_sum, p_x, p_y)) / m))
    return UnionBoundCheck(p_sum, p_x, p_y, se, p_sum <= p_x + p_y + n_se * se)
