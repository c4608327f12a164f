"""On-disk formats: edge lists, signal batches, CSV exports.

Edge list: whitespace-separated ``u v [w]`` per line, ``#`` comments, and an
optional ``% base=0|1`` header directive (default base 0).

Signal batch: 8-byte magic ``BMSIGNAL``, little-endian uint64 ``n`` and ``M``,
then ``M * n`` little-endian float64 values in row-major order.
"""
from __future__ import annotations

import csv
import os
import struct
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError
from .graphs import Graph, Permutation

SIGNAL_MAGIC = b"BMSIGNAL"
_HEADER = struct.Struct("<8sQQ")


def load_edge_list(path, relabel: bool = False) -> Graph:
    """Read an undirected graph from an edge-list file.

    Duplicate edges collapse with the last weight winning. With ``relabel``,
    arbitrary integer ids are compacted to ``0..n-1`` in sorted order (useful
    for SNAP-style exports with sparse ids); otherwise ``n`` is the largest id
    plus one after the base shift.
    """
    base = 0
    nodes_hint = None
    edges: dict[tuple[int, int], float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("%"):
                for token in line[1:].split():
                    key, _, value = token.partition("=")
                    if key == "base" and value in ("0", "1"):
                        base = int(value)
                    elif key == "nodes" and value.isdigit():
                        nodes_hint = int(value)
                    else:
                        raise FormatError(f"unknown header directive {token!r}", lineno)
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise FormatError(f"expected 'u v [w]', got {line!r}", lineno)
            try:
                u, v = int(parts[0]) - base, int(parts[1]) - base
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
            if u < 0 or v < 0:
                raise FormatError(f"node id below base {base}", lineno)
            if u == v:
                raise DataError(f"line {lineno}: self-loop on node {u + base}")
            if not np.isfinite(w):
                raise FormatError("non-finite weight", lineno)
            edges[(min(u, v), max(u, v))] = w

    if relabel:
        ids = sorted({x for e in edges for x in e})
        index = {x: i for i, x in enumerate(ids)}
        edges = {(index[u], index[v]): w for (u, v), w in edges.items()}
        n = len(ids)
    else:
        n = 1 + max((max(e) for e in edges), default=-1)
    if nodes_hint is not None:
        if nodes_hint < n:
            raise DataError(f"header declares {nodes_hint} nodes but ids reach {n - 1}")
        n = nodes_hint
    if n == 0:
        raise DataError("edge list contains no edges")
    return Graph.from_edges(n, [(u, v, w) for (u, v), w in edges.items()])


def save_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"% base=0 nodes={g.n}\n")
        for u, v, w in g.edges():
            if w == 1.0:
                fh.write(f"{u} {v}\n")
            else:
                fh.write(f"{u} {v} {w!r}\n")


def save_signals(samples: np.ndarray, path) -> None:
    samples = np.ascontiguousarray(samples, dtype="<f8")
    m, n = samples.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SIGNAL_MAGIC, n, m))
        fh.write(samples.tobytes(order="C"))


def load_signals(path) -> np.ndarray:
    """Return the ``M x n`` sample matrix stored at ``path``."""
    size = os.path.getsize(path)
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise FormatError(f"{path}: truncated header")
        magic, n, m = _HEADER.unpack(head)
        if magic != SIGNAL_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}")
        if size != _HEADER.size + 8 * n * m:
            raise FormatError(f"{path}: expected {n * m} values, file size {size}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    return data.reshape(m, n).astype(float)


def save_matrix_csv(matrix: np.ndarray, path) -> None:
    np.savetxt(path, np.asarray(matrix), delimiter=",", fmt="%.17g")


def load_matrix_csv(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=","))


def save_vector_csv(values, path, header: str = "value") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", header])
        for i, v in enumerate(np.asarray(values).tolist()):
            writer.writerow([i, repr(float(v))])


def save_permutation_csv(p: Permutation, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "matched"])
        for k, v in enumerate(p.map):
            writer.writerow([k, v])


def load_permutation_csv(path) -> Permutation:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["source", "matched"]:
        raise FormatError(f"{path}: missing 'source,matched' header", 1)
    mapping: dict[int, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            mapping[int(row[0])] = int(row[1])
        except (ValueError, IndexError):
            raise FormatError(f"bad row {row!r}", lineno) from None
    n = len(mapping)
    if sorted(mapping) != list(range(n)):
        raise DataError(f"{path}: source column is not 0..{n - 1}")
    return Permutation(tuple(mapping[k] for k in range(n)))


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
