"""Monte Carlo trial runner and sweep aggregation.

Every trial owns a seed derived from ``(config seed, grid index, trial
index)``, so results do not depend on the execution order or worker count.
"""
from __future__ import annotations

import csv
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import AXES, ExperimentConfig
from .formats import load_edge_list
from .graphs import (Graph, Permutation, WignerPairConfig, edge_sample, gen_ba, gen_er,
                     gen_wigner_pair, laplacian, permute_graph)
from .matching import BlindParams, blind_match, spectral_match_known
from .signals import GraphFilter, SignalBatch, SignalModel, generate_signals

# sub-stream indices below a trial's seed key
_GRAPH, _PERM, _SIG1, _SIG2, _SAMPLE2 = range(5)


def derive_seed(seed: int, *key: int) -> int:
    """Deterministic 64-bit seed for a position in the trial tree."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@lru_cache(maxsize=4)
def _dataset(path: str, relabel: bool) -> Graph:
    return load_edge_list(path, relabel=relabel)


@dataclass(frozen=True, eq=False)
class Instance:
    g1: Graph
    g2: Graph
    p_star: Permutation
    filter1: GraphFilter
    filter2: GraphFilter
    sigma2: float
    m: int

    @property
    def laplacians(self) -> tuple[np.ndarray, np.ndarray]:
        return laplacian(self.g1), laplacian(self.g2)


def build_instance(cfg: ExperimentConfig, point: dict, seed: int, *key: int) -> Instance:
    """Graph pair, ground truth and filters for one trial."""
    n = point["n"]
    gseed = derive_seed(seed, *key, _GRAPH)
    pseed = derive_seed(seed, *key, _PERM)
    if cfg.graph == "wigner":
        g1, g2, p_star = gen_wigner_pair(WignerPairConfig(n, point["beta"], gseed))
    else:
        if cfg.graph in ("er", "ba"):
            p_star = Permutation.random(n, pseed)
            if cfg.graph == "er":
                g1 = gen_er(n, cfg.p, gseed)
            else:
                g1 = gen_ba(n, cfg.m0, cfg.m_attach, gseed)
            g2 = permute_graph(g1, p_star)
        else:
            base = _dataset(str(cfg.dataset_path), cfg.relabel)
            p_star = Permutation.random(base.n, pseed)
            g1 = edge_sample(base, cfg.sample_q, gseed)
            g2 = permute_graph(edge_sample(base, cfg.sample_q, derive_seed(seed, *key, _SAMPLE2)), p_star)
    f1, f2 = cfg.filters_for(point["alpha"])
    return Instance(g1, g2, p_star, f1, f2, float(point["sigma2"]), int(point["m_samples"]))


def draw_signals(cfg: ExperimentConfig, inst: Instance, seed: int, *key: int) -> tuple[SignalBatch, SignalBatch]:
    l1, l2 = inst.laplacians
    b1 = generate_signals(l1, SignalModel(inst.filter1, inst.sigma2, cfg.excitation), inst.m,
                          derive_seed(seed, *key, _SIG1))
    b2 = generate_signals(l2, SignalModel(inst.filter2, inst.sigma2, cfg.excitation), inst.m,
                          derive_seed(seed, *key, _SIG2))
    return b1, b2


def blind_params(cfg: ExperimentConfig) -> BlindParams:
    return BlindParams(
        eps=None if cfg.eps == "default" else float(cfg.eps),
        varsigma=None if cfg.varsigma == "default" else float(cfg.varsigma),
        solver=cfg.solver,
        identifiability_mode=cfg.identifiability_mode,
    )


def run_trial(cfg: ExperimentConfig, grid_index: int, trial: int) -> dict:
    """Run one Monte Carlo trial and return a flat JSON-ready record."""
    point = cfg.grid()[grid_index]
    t0 = time.perf_counter()
    inst = build_instance(cfg, point, cfg.seed, grid_index, trial)
    b1, b2 = draw_signals(cfg, inst, cfg.seed, grid_index, trial)
    l1, l2 = inst.laplacians
    report = blind_match(b1, b2, blind_params(cfg), p_star=inst.p_star, laplacians=(l1, l2))
    axis = cfg.sweep_axis
    record = {
        "grid_index": grid_index,
        "trial": trial,
        "axis": axis,
        "axis_value": None if axis is None else point[AXES[axis]],
        "n": point["n"],
        "m_samples": inst.m,
        "sigma2": inst.sigma2,
        "filter1": inst.filter1.spec(),
        "filter2": inst.filter2.spec(),
        "fraction_correct": report.fraction_correct,
        "disagreement": report.disagreement,
        "identifiable": report.identifiability == "identifiable",
        "k_used": report.k_used,
        "objective": report.objective,
        "solver": report.solver,
        "time_assign": report.wall_times["assign"],
    }
    if cfg.baseline:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RuntimeWarning)
            base = spectral_match_known(l1, l2, "hungarian", p_star=inst.p_star)
        record["baseline_fraction_correct"] = base.fraction_correct
        record["baseline_disagreement"] = base.disagreement
        record["baseline_repeated_eigenvalues"] = bool(caught)
    record["time_total"] = time.perf_counter() - t0
    return record


def _run_job(args) -> dict:
    cfg, g, t = args
    return run_trial(cfg, g, t)


def run_sweep(cfg: ExperimentConfig, threads: int = 1, progress=None) -> list[dict]:
    """All trials of all grid points, ordered by ``(grid_index, trial)``."""
    jobs = [(cfg, g, t) for g in range(len(cfg.grid())) for t in range(cfg.trials)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_job, jobs))
    else:
        records = []
        for job in jobs:
            records.append(_run_job(job))
            if progress:
                progress(records[-1])
    return sorted(records, key=lambda r: (r["grid_index"], r["trial"]))


def _mean_std(values) -> tuple[float, float]:
    v = np.asarray([x for x in values if x is not None], dtype=float)
    if v.size == 0:
        return float("nan"), float("nan")
    return float(np.mean(v)), float(np.std(v, ddof=1)) if v.size > 1 else 0.0


SWEEP_COLUMNS = (
    "axis", "axis_value", "n", "m_samples", "sigma2", "trials",
    "fraction_correct_mean", "fraction_correct_std",
    "disagreement_mean", "disagreement_std",
    "identifiability_rate", "k_mean", "time_assign_mean",
    "baseline_fraction_correct_mean",
)


def aggregate(records: list[dict]) -> list[dict]:
    """One summary row per grid point; statistics over trials in trial order."""
    rows = []
    by_grid: dict[int, list[dict]] = {}
    for r in sorted(records, key=lambda r: (r["grid_index"], r["trial"])):
        by_grid.setdefault(r["grid_index"], []).append(r)
    for g in sorted(by_grid):
        recs = by_grid[g]
        fc = _mean_std(r["fraction_correct"] for r in recs)
        dis = _mean_std(r["disagreement"] for r in recs)
        rows.append({
            "axis": recs[0]["axis"],
            "axis_value": recs[0]["axis_value"],
            "n": recs[0]["n"],
            "m_samples": recs[0]["m_samples"],
            "sigma2": recs[0]["sigma2"],
            "trials": len(recs),
            "fraction_correct_mean": fc[0],
            "fraction_correct_std": fc[1],
            "disagreement_mean": dis[0],
            "disagreement_std": dis[1],
            "identifiability_rate": float(np.mean([r["identifiable"] for r in recs])),
            "k_mean": float(np.mean([r["k_used"] for r in recs])),
            "time_assign_mean": float(np.mean([r["time_assign"] for r in recs])),
            "baseline_fraction_correct_mean": _mean_std(r.get("baseline_fraction_correct") for r in recs)[0],
        })
    return rows


def write_records(records: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r, sort_keys=True) + "\n")


def read_records(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_sweep_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
