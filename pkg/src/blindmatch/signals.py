"""Graph filters, filtered-signal synthesis and covariance estimation."""
from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, NumericDomainError

FILTER_KINDS = ("polynomial", "resolvent", "power", "arma")
EXCITATIONS = ("standard_normal", "rademacher")

# samples per RNG block; fixing it makes output independent of worker count
BLOCK_SIZE = 16384

_POLE_TOL = 1e-12


@dataclass(frozen=True)
class GraphFilter:
    """Spectral transfer function of a graph filter.

    ``kind`` selects the family; ``params`` holds its coefficients:

    * ``polynomial``: ``(h_0, ..., h_{T-1})`` with response ``sum_t h_t g^t``
    * ``resolvent``: ``(alpha,)`` for ``(I + alpha L)^{-1}``
    * ``power``: ``(alpha, T)`` for ``(I - alpha L)^T``
    * ``arma``: ``(alpha1, alpha2)`` for ``alpha1 (I - alpha2 (I - L))^{-1}``
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise InvalidArgumentError(f"unknown filter kind {self.kind!r}")
        params = tuple(float(x) for x in self.params)
        expected = {"resolvent": 1, "power": 2, "arma": 2}.get(self.kind)
        if expected is not None and len(params) != expected:
            raise InvalidArgumentError(f"{self.kind} takes {expected} parameter(s), got {len(params)}")
        if self.kind == "polynomial" and not params:
            raise InvalidArgumentError("polynomial filter needs at least one coefficient")
        if self.kind == "power" and (params[1] < 0 or params[1] != int(params[1])):
            raise InvalidArgumentError("power filter order must be a non-negative integer")
        object.__setattr__(self, "params", params)

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> GraphFilter:
        return cls("polynomial", tuple(coeffs))

    @classmethod
    def resolvent(cls, alpha: float) -> GraphFilter:
        return cls("resolvent", (alpha,))

    @classmethod
    def power(cls, alpha: float, order: int) -> GraphFilter:
        return cls("power", (alpha, order))

    @classmethod
    def arma(cls, alpha1: float, alpha2: float) -> GraphFilter:
        return cls("arma", (alpha1, alpha2))

    @classmethod
    def parse(cls, text: str) -> GraphFilter:
        """Parse ``"resolvent(0.1)"``-style specs (inverse of :meth:`spec`)."""
        m = re.fullmatch(r"\s*([a-z]+)\s*\(([^()]*)\)\s*", text)
        if not m:
            raise InvalidArgumentError(f"cannot parse filter spec {text!r}")
        try:
            args = tuple(float(x) for x in m.group(2).split(",") if x.strip())
        except ValueError:
            raise InvalidArgumentError(f"non-numeric filter parameter in {text!r}") from None
        return cls(m.group(1), args)

    def spec(self) -> str:
        args = ", ".join(repr(int(p)) if self.kind == "power" and i == 1 else repr(p)
                         for i, p in enumerate(self.params))
        return f"{self.kind}({args})"

    def response(self, gammas) -> np.ndarray:
        g = np.asarray(gammas, dtype=float)
        p = self.params
        if self.kind == "polynomial":
            out = np.zeros_like(g)
            for h in reversed(p):
                out = out * g + h
            return out
        if self.kind == "power":
            return (1.0 - p[0] * g) ** int(p[1])
        if self.kind == "resolvent":
            denom = 1.0 + p[0] * g
            scale = 1.0
        else:
            denom = 1.0 - p[1] * (1.0 - g)
            scale = p[0]
        if np.any(np.abs(denom) <= _POLE_TOL):
            raise NumericDomainError(f"{self.spec()} has a pole on the given spectrum")
        return scale / denom


def frequency_response(f: GraphFilter, gammas) -> np.ndarray:
    """Elementwise transfer values ``h(gamma)``, in input order."""
    return f.response(gammas)


def _sym_eig(lap: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lap = np.asarray(lap, dtype=float)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise InvalidArgumentError("expected a square matrix")
    return np.linalg.eigh(lap)


def _spectral_apply(lap: np.ndarray, values_fn) -> np.ndarray:
    gammas, vecs = _sym_eig(lap)
    out = (vecs * values_fn(gammas)) @ vecs.T
    return 0.5 * (out + out.T)


def filter_matrix(lap: np.ndarray, f: GraphFilter) -> np.ndarray:
    """``H(L) = V diag(h(gamma)) V^T`` for ``L = V diag(gamma) V^T``."""
    return _spectral_apply(lap, f.response)


@dataclass(frozen=True)
class SignalModel:
    filter: GraphFilter
    sigma2: float = 0.0
    excitation: str = "standard_normal"

    def __post_init__(self):
        if self.sigma2 < 0:
            raise InvalidArgumentError("noise variance must be non-negative")
        if self.excitation not in EXCITATIONS:
            raise InvalidArgumentError(f"unknown excitation {self.excitation!r}")


@dataclass(frozen=True, eq=False)
class SignalBatch:
    """``M x n`` matrix whose row ``m`` is the observation ``y_m``."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 1:
            raise InvalidArgumentError(f"samples must be a non-empty M x n matrix, got {s.shape}")
        if not np.all(np.isfinite(s)):
            raise InvalidArgumentError("samples must be finite")
        object.__setattr__(self, "samples", s)

    @property
    def M(self) -> int:
        return self.samples.shape[0]

    @property
    def n(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True, eq=False)
class CovarianceEstimate:
    """Symmetric covariance matrix; ``m_used`` is ``None`` for exact covariances."""

    matrix: np.ndarray
    m_used: int | None = field(default=None)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _block_seed(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, block)))


def _draw_block(h, model: SignalModel, seed: int, block: int, rows: int) -> np.ndarray:
    n = h.shape[0]
    ex = _block_seed(seed, 0, block)
    if model.excitation == "standard_normal":
        x = ex.standard_normal((rows, n))
    else:
        x = 2.0 * ex.integers(0, 2, size=(rows, n)) - 1.0
    y = x @ h  # h is symmetric, so each row is (H x_m)^T
    if model.sigma2 > 0:
        y += np.sqrt(model.sigma2) * _block_seed(seed, 1, block).standard_normal((rows, n))
    return y


def generate_signals(lap: np.ndarray, model: SignalModel, m: int, seed: int,
                     workers: int = 1) -> SignalBatch:
    """Draw ``y_m = H(L) x_m + w_m`` for ``m = 1..M``.

    Excitation and noise come from separate sub-streams per block of
    ``BLOCK_SIZE`` samples, so changing ``sigma2`` leaves the excitation
    untouched and the output does not depend on ``workers``.
    """
    if m < 1:
        raise InvalidArgumentError("M must be at least 1")
    if seed is None or int(seed) < 0:
        raise InvalidArgumentError("seed must be a non-negative integer")
    h = filter_matrix(lap, model.filter)
    starts = list(range(0, m, BLOCK_SIZE))
    jobs = [(b, min(BLOCK_SIZE, m - s)) for b, s in enumerate(starts)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda j: _draw_block(h, model, int(seed), *j), jobs))
    else:
        blocks = [_draw_block(h, model, int(seed), *j) for j in jobs]
    return SignalBatch(np.vstack(blocks))


def sample_covariance(batch: SignalBatch | np.ndarray) -> CovarianceEstimate:
    """``(1/M) sum_m y_m y_m^T`` without mean removal, exactly symmetric."""
    y = batch.samples if isinstance(batch, SignalBatch) else np.asarray(batch, dtype=float)
    if y.ndim != 2 or y.shape[0] < 1:
        raise InvalidArgumentError("need at least one sample")
    c = (y.T @ y) / y.shape[0]
    upper = np.triu(c)
    return CovarianceEstimate(upper + np.triu(c, 1).T, m_used=y.shape[0])


def true_covariance(lap: np.ndarray, f: GraphFilter) -> CovarianceEstimate:
    """Noiseless covariance ``H(L) H(L)^T = V diag(h^2) V^T``."""
    return CovarianceEstimate(_spectral_apply(lap, lambda g: f.response(g) ** 2))
