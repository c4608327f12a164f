"""Graph representation, random generators, Laplacians and permutations.

Permutations follow the matrix convention ``P[k, l] = 1`` iff ``pi(k) = l``:
node ``k`` of the first graph corresponds to node ``pi(k)`` of the second,
and relabeling a graph by ``P`` gives the adjacency ``P.T @ A @ P``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidArgumentError

# relative tolerance below which a swap disagreement counts as zero
IDENTIFIABILITY_TOL = 1e-9


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph stored as a dense symmetric weight matrix.

    Signed weights are admitted so that Gaussian Wigner "graphs" fit the
    same type; the generators for unweighted families only emit 0/1.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] == 0:
            raise InvalidArgumentError(f"weights must be a non-empty square matrix, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InvalidArgumentError("weights must be finite")
        if not np.array_equal(w, w.T):
            raise InvalidArgumentError("weights must be symmetric")
        if np.any(np.diag(w) != 0):
            raise InvalidArgumentError("weights must have a zero diagonal")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights, 1)))

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield ``(u, v, w)`` with ``u < v`` for every nonzero weight."""
        rows, cols = np.nonzero(np.triu(self.weights, 1))
        for u, v in zip(rows.tolist(), cols.tolist()):
            yield u, v, float(self.weights[u, v])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[tuple]) -> Graph:
        w = np.zeros((n, n))
        for e in edges:
            u, v = int(e[0]), int(e[1])
            weight = float(e[2]) if len(e) > 2 else 1.0
            w[u, v] = w[v, u] = weight
        return cls(w)


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``{0, ..., n-1}``; ``map[k]`` is the image of ``k``."""

    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.map)
        if sorted(m) != list(range(len(m))):
            raise InvalidArgumentError("permutation map must be a bijection on 0..n-1")
        object.__setattr__(self, "map", m)

    @property
    def n(self) -> int:
        return len(self.map)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.map, dtype=np.intp)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def swap(cls, n: int, a: int, b: int) -> Permutation:
        m = list(range(n))
        m[a], m[b] = m[b], m[a]
        return cls(tuple(m))

    @classmethod
    def random(cls, n: int, seed=None) -> Permutation:
        return cls(tuple(_rng(seed).permutation(n).tolist()))

    @classmethod
    def from_matrix(cls, p: np.ndarray) -> Permutation:
        p = np.asarray(p)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or not np.all((p == 0) | (p == 1)):
            raise InvalidArgumentError("not a 0/1 square matrix")
        if not (np.all(p.sum(0) == 1) and np.all(p.sum(1) == 1)):
            raise InvalidArgumentError("not a permutation matrix")
        return cls(tuple(np.argmax(p, axis=1).tolist()))

    def matrix(self) -> np.ndarray:
        p = np.zeros((self.n, self.n))
        p[np.arange(self.n), self.array] = 1.0
        return p

    def inverse(self) -> Permutation:
        inv = np.empty(self.n, dtype=np.intp)
        inv[self.array] = np.arange(self.n)
        return Permutation(tuple(inv.tolist()))

    def compose(self, other: Permutation) -> Permutation:
        """Return ``self ∘ other``, i.e. ``k -> self(other(k))``."""
        if other.n != self.n:
            raise InvalidArgumentError("permutation sizes differ")
        return Permutation(tuple(self.array[other.array].tolist()))

    def relabel(self, m: np.ndarray) -> np.ndarray:
        """Return ``P.T @ m @ P`` without forming ``P``."""
        m = np.asarray(m)
        if m.shape != (self.n, self.n):
            raise InvalidArgumentError(f"matrix shape {m.shape} does not match permutation size {self.n}")
        inv = self.inverse().array
        return m[np.ix_(inv, inv)]

    def __len__(self):
        return self.n


# -- generators ---------------------------------------------------------------

def gen_er(n: int, p: float, seed=None) -> Graph:
    """Erdős–Rényi graph: every unordered pair is an edge with probability ``p``."""
    if n <= 0:
        raise InvalidArgumentError("n must be positive")
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError("p must lie in [0, 1]")
    draws = _rng(seed).random((n, n))
    a = np.triu((draws < p).astype(float), 1)
    return Graph(a + a.T)


def gen_ba(n: int, m0: int, m_attach: int, seed=None) -> Graph:
    """Barabási–Albert preferential attachment graph.

    The seed component is ``m0`` isolated nodes. The first new node links to
    all of them, and every later node links to ``m_attach`` distinct existing
    nodes drawn with probability proportional to their current degree. The
    result has ``m0 + (n - m0 - 1) * m_attach`` edges when ``n > m0``.
    """
    if not (m0 >= m_attach >= 1 and n >= m0):
        raise InvalidArgumentError("need m0 >= m_attach >= 1 and n >= m0")
    rng = _rng(seed)
    a = np.zeros((n, n))
    deg = np.zeros(n)
    if n > m0:
        a[m0, :m0] = a[:m0, m0] = 1.0
        deg[:m0] += 1
        deg[m0] = m0
    for new in range(m0 + 1, n):
        weights = deg[:new] / deg[:new].sum()
        targets = rng.choice(new, size=m_attach, replace=False, p=weights)
        a[new, targets] = a[targets, new] = 1.0
        deg[targets] += 1
        deg[new] = m_attach
    return Graph(a)


def wigner_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Symmetric matrix with i.i.d. N(0, 1) off-diagonal entries and zero diagonal."""
    z = np.triu(rng.standard_normal((n, n)), 1)
    return z + z.T


@dataclass(frozen=True)
class WignerPairConfig:
    n: int
    beta: float
    seed: int = 0

    def __post_init__(self):
        if self.n <= 0:
            raise InvalidArgumentError("n must be positive")
        if not 0.0 < self.beta < 1.0:
            raise InvalidArgumentError("beta must lie in (0, 1)")


def gen_wigner_pair(cfg: WignerPairConfig) -> tuple[Graph, Graph, Permutation]:
    """Correlated Gaussian Wigner pair ``A2 = P*^T (sqrt(1-b^2) A1 + b Z) P*``.

    Draw order from ``default_rng(cfg.seed)``: ``A1``, then ``Z``, then the
    permutation, so callers can replay the draws.
    """
    rng = np.random.default_rng(cfg.seed)
    a1 = wigner_matrix(cfg.n, rng)
    z = wigner_matrix(cfg.n, rng)
    perm = Permutation(tuple(rng.permutation(cfg.n).tolist()))
    mixed = np.sqrt(1.0 - cfg.beta**2) * a1 + cfg.beta * z
    return Graph(a1), Graph(perm.relabel(mixed)), perm


def edge_sample(g: Graph, q: float, seed=None) -> Graph:
    """Keep each edge of ``g`` independently with probability ``q``."""
    if not 0.0 <= q <= 1.0:
        raise InvalidArgumentError("q must lie in [0, 1]")
    rows, cols = np.nonzero(np.triu(g.weights, 1))
    keep = _rng(seed).random(rows.size) < q
    w = np.zeros_like(g.weights)
    r, c = rows[keep], cols[keep]
    w[r, c] = g.weights[r, c]
    w[c, r] = g.weights[r, c]
    return Graph(w)


# -- Laplacian, relabeling, disagreement ----------------------------------------

def laplacian(g: Graph | np.ndarray) -> np.ndarray:
    """``L = diag(A 1) - A``."""
    a = g.weights if isinstance(g, Graph) else np.asarray(g, dtype=float)
    return np.diag(a.sum(axis=1)) - a


def permute_graph(g: Graph, p: Permutation) -> Graph:
    if p.n != g.n:
        raise InvalidArgumentError(f"permutation size {p.n} != graph size {g.n}")
    return Graph(p.relabel(g.weights))


def disagreement(l1: np.ndarray, l2: np.ndarray, p: Permutation) -> float:
    """``||L2 - P^T L1 P||_F^2``."""
    l1, l2 = np.asarray(l1, dtype=float), np.asarray(l2, dtype=float)
    if l1.shape != l2.shape or l1.shape != (p.n, p.n):
        raise InvalidArgumentError("Laplacian and permutation sizes must match")
    d = l2 - p.relabel(l1)
    return float(np.sum(d * d))


def swap_disagreements(lap: np.ndarray) -> np.ndarray:
    """Matrix ``D[a, b] = dis_{G->G}(swap(a, b))`` for all pairs, in O(n^3).

    Swapping ``a`` and ``b`` only moves rows/columns ``a`` and ``b``, so
    ``dis = 4 * sum_{k != a,b} (L[a,k] - L[b,k])^2 + 2 (L[a,a] - L[b,b])^2``.
    The diagonal of the result is zero.
    """
    lap = np.asarray(lap, dtype=float)
    sq = np.sum(lap * lap, axis=1)
    row_dist = sq[:, None] + sq[None, :] - 2.0 * lap @ lap.T
    d = np.diag(lap)
    # remove the k = a and k = b terms from the full row distance
    own = (d[:, None] - lap) ** 2 + (lap - d[None, :]) ** 2
    off = np.maximum(row_dist - own, 0.0)
    out = 4.0 * off + 2.0 * (d[:, None] - d[None, :]) ** 2
    np.fill_diagonal(out, 0.0)
    return out


def symmetric_swaps(lap: np.ndarray, tol: float = IDENTIFIABILITY_TOL) -> list[tuple[int, int]]:
    """Transpositions ``(a, b)``, ``a < b``, that leave the graph unchanged."""
    lap = np.asarray(lap, dtype=float)
    scale = float(np.sum(lap * lap))
    d = swap_disagreements(lap)
    a, b = np.nonzero(np.triu(d <= tol * scale, 1))
    return list(zip(a.tolist(), b.tolist()))


class KnownVerdict(str, Enum):
    IDENTIFIABLE = "identifiable"
    SYMMETRIC_G1 = "symmetric_g1"
    SYMMETRIC_G2 = "symmetric_g2"


def is_identifiable_known(l1: np.ndarray, l2: np.ndarray, tol: float = IDENTIFIABILITY_TOL) -> KnownVerdict:
    """Swap scan over both Laplacians.

    A graph is declared symmetric when some transposition gives a
    disagreement below ``tol * ||L||_F^2``. A positive swap scan certifies a
    nontrivial automorphism; a clean scan does not exclude automorphisms
    made only of longer cycles (the path on 4 nodes is the smallest case),
    see :func:`has_nontrivial_automorphism` for an exhaustive check.
    """
    if symmetric_swaps(l1, tol):
        return KnownVerdict.SYMMETRIC_G1
    if symmetric_swaps(l2, tol):
        return KnownVerdict.SYMMETRIC_G2
    return KnownVerdict.IDENTIFIABLE


def has_nontrivial_automorphism(lap: np.ndarray, max_n: int = 9) -> bool:
    """Exhaustive search over all ``n!`` permutations (small graphs only)."""
    lap = np.asarray(lap, dtype=float)
    n = lap.shape[0]
    if n > max_n:
        raise InvalidArgumentError(f"exhaustive search refused for n={n} > {max_n}")
    for perm in itertools.permutations(range(n)):
        if perm == tuple(range(n)):
            continue
        idx = np.argsort(perm)
        if np.array_equal(lap[np.ix_(idx, idx)], lap):
            return True
    return False
