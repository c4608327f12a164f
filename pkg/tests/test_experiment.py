import csv
import math

import numpy as np
import pytest

from blindmatch.config import ExperimentConfig
from blindmatch.experiment import (aggregate, build_instance, derive_seed, read_records, run_sweep,
                                   run_trial, write_records, write_sweep_csv)
from blindmatch.graphs import laplacian

from conftest import DATA_DIR

SMALL = dict(n=12, m_samples=2000, trials=3, seed=4)


class TestSeeds:
    def test_distinct_and_stable(self):
        seeds = {derive_seed(0, g, t, i) for g in range(3) for t in range(3) for i in range(5)}
        assert len(seeds) == 45
        assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)


class TestInstances:
    @pytest.mark.parametrize("graph", ["er", "ba", "wigner"])
    def test_models(self, graph):
        cfg = ExperimentConfig(graph=graph, **SMALL)
        inst = build_instance(cfg, cfg.grid()[0], cfg.seed, 0, 0)
        assert inst.g1.n == 12
        l1, l2 = inst.laplacians
        if graph != "wigner":
            np.testing.assert_array_equal(l2, inst.p_star.relabel(l1))

    def test_dataset(self):
        cfg = ExperimentConfig(graph="dataset", dataset_path=str(DATA_DIR / "tiny_social.edges"),
                               sample_q=1.0, **{k: v for k, v in SMALL.items() if k != "n"})
        inst = build_instance(cfg, cfg.grid()[0], cfg.seed, 0, 0)
        assert inst.g1.n == 12 and inst.g1.edge_count == 18
        np.testing.assert_array_equal(laplacian(inst.g2), inst.p_star.relabel(laplacian(inst.g1)))


class TestSweep:
    def test_trial_record(self):
        r = run_trial(ExperimentConfig(**SMALL), 0, 1)
        assert r["trial"] == 1 and 0 <= r["fraction_correct"] <= 1
        assert r["baseline_fraction_correct"] is not None

    def test_parallel_matches_serial(self):
        cfg = ExperimentConfig(sigma2=[0.01, 0.1], sweep_axis="sigma2", **SMALL)
        strip = lambda recs: [{k: v for k, v in r.items() if not k.startswith("time")} for r in recs]
        serial = run_sweep(cfg, threads=1)
        parallel = run_sweep(cfg, threads=2)
        assert strip(serial) == strip(parallel)
        assert len(aggregate(serial)) == 2

    def test_aggregate_matches_records(self, tmp_path):
        cfg = ExperimentConfig(m_samples=[500, 5000], sweep_axis="M", **{k: v for k, v in SMALL.items() if k != "m_samples"})
        records = run_sweep(cfg)
        write_records(records, tmp_path / "t.jsonl")
        back = read_records(tmp_path / "t.jsonl")
        rows = aggregate(back)
        write_sweep_csv(rows, tmp_path / "s.csv")
        with open(tmp_path / "s.csv") as fh:
            table = list(csv.DictReader(fh))
        assert len(table) == len(cfg.grid())
        for row, g in zip(table, range(len(cfg.grid()))):
            fc = [r["fraction_correct"] for r in back if r["grid_index"] == g]
            assert float(row["fraction_correct_mean"]) == pytest.approx(math.fsum(fc) / len(fc), abs=1e-12)
            assert float(row["fraction_correct_std"]) == pytest.approx(np.std(fc, ddof=1), abs=1e-12)
            assert int(row["trials"]) == 3
