import numpy as np
import pytest

from blindmatch import Graph, Permutation, gen_er
from blindmatch.errors import DataError, FormatError
from blindmatch.formats import (load_edge_list, load_matrix_csv, load_permutation_csv, load_signals,
                                save_edge_list, save_matrix_csv, save_permutation_csv, save_signals)

from conftest import DATA_DIR


def write(tmp_path, text, name="g.edges"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestEdgeList:
    def test_path(self, tmp_path):
        g = load_edge_list(write(tmp_path, "0 1\n1 2\n"))
        assert g.n == 3 and g.edge_count == 2

    def test_one_based_and_comments(self, tmp_path):
        g = load_edge_list(write(tmp_path, "% base=1\n# comment\n1 2  # trailing\n2 3 2.5\n"))
        assert g.n == 3
        assert g.weights[1, 2] == 2.5

    def test_last_weight_wins(self, tmp_path):
        g = load_edge_list(write(tmp_path, "0 1 2\n1 0 3\n"))
        assert g.weights[0, 1] == 3.0

    def test_self_loop(self, tmp_path):
        with pytest.raises(DataError):
            load_edge_list(write(tmp_path, "0 0\n"))

    def test_bad_line_reports_number(self, tmp_path):
        with pytest.raises(FormatError, match="line 2"):
            load_edge_list(write(tmp_path, "0 1\n0 x\n"))

    def test_unknown_directive(self, tmp_path):
        with pytest.raises(FormatError, match="line 1"):
            load_edge_list(write(tmp_path, "% base=2\n0 1\n"))

    def test_empty(self, tmp_path):
        with pytest.raises(DataError):
            load_edge_list(write(tmp_path, "# nothing\n"))

    def test_relabel_sparse_ids(self, tmp_path):
        g = load_edge_list(write(tmp_path, "10 20\n20 35\n"), relabel=True)
        assert g.n == 3 and g.edge_count == 2

    def test_roundtrip_keeps_isolated_nodes(self, tmp_path):
        g = Graph.from_edges(6, [(0, 1), (2, 3, 0.25)])
        p = tmp_path / "rt.edges"
        save_edge_list(g, p)
        assert load_edge_list(p) == g

    def test_roundtrip_signed_weights(self, tmp_path, rng):
        z = np.triu(rng.standard_normal((7, 7)), 1)
        g = Graph(z + z.T)
        save_edge_list(g, tmp_path / "w.edges")
        assert load_edge_list(tmp_path / "w.edges") == g

    def test_fixture(self):
        g = load_edge_list(DATA_DIR / "tiny_social.edges")
        assert g.n == 12 and g.edge_count == 18


class TestSignals:
    def test_roundtrip(self, tmp_path, rng):
        y = rng.standard_normal((13, 4))
        save_signals(y, tmp_path / "s.bin")
        np.testing.assert_array_equal(load_signals(tmp_path / "s.bin"), y)
        assert (tmp_path / "s.bin").stat().st_size == 24 + 8 * 13 * 4

    def test_truncated(self, tmp_path, rng):
        save_signals(rng.standard_normal((5, 3)), tmp_path / "s.bin")
        data = (tmp_path / "s.bin").read_bytes()
        (tmp_path / "s.bin").write_bytes(data[:-8])
        with pytest.raises(FormatError):
            load_signals(tmp_path / "s.bin")

    def test_bad_magic(self, tmp_path):
        (tmp_path / "s.bin").write_bytes(b"NOTMAGIC" + bytes(16))
        with pytest.raises(FormatError):
            load_signals(tmp_path / "s.bin")


class TestCsv:
    def test_permutation_roundtrip(self, tmp_path):
        p = Permutation.random(9, 2)
        save_permutation_csv(p, tmp_path / "p.csv")
        assert load_permutation_csv(tmp_path / "p.csv") == p

    def test_permutation_bad_header(self, tmp_path):
        (tmp_path / "p.csv").write_text("a,b\n0,0\n")
        with pytest.raises(FormatError):
            load_permutation_csv(tmp_path / "p.csv")

    def test_matrix_roundtrip(self, tmp_path):
        m = gen_er(5, 0.5, 1).weights * np.pi
        save_matrix_csv(m, tmp_path / "m.csv")
        np.testing.assert_array_equal(load_matrix_csv(tmp_path / "m.csv"), m)
