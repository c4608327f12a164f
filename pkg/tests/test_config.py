import pytest

from blindmatch.config import ExperimentConfig, load_config, parse_config_text
from blindmatch.errors import ConfigError


class TestParse:
    def test_defaults(self):
        cfg = parse_config_text("")
        assert cfg == ExperimentConfig()
        assert cfg.trials == 50 and cfg.sigma2 == 0.01

    def test_values_and_comments(self):
        cfg = parse_config_text("graph = ba  # preferential\nn = 40\nfilter1 = power(0.05, 2)\n"
                                "m_samples = [1e3, 1e4]\nsweep_axis = M\nbaseline = False\n")
        assert cfg.graph == "ba" and cfg.n == 40
        assert cfg.m_samples == [1000, 10000] and isinstance(cfg.m_samples[0], int)
        assert cfg.baseline is False

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="line 2: unknown key 'nodes'"):
            parse_config_text("n = 10\nnodes = 5\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("n = 10\nn = 12\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config_text("graph er\n")

    def test_file(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("seed = 9\n")
        assert load_config(p).seed == 9
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.cfg")

    def test_text_roundtrip(self):
        cfg = ExperimentConfig(graph="wigner", beta=[0.1, 0.2], sweep_axis="beta", eps=0.5, dataset_path=None)
        assert parse_config_text(cfg.to_text()) == cfg


class TestValidation:
    @pytest.mark.parametrize("text, field", [
        ("graph = tree", "graph"),
        ("trials = 0", "trials"),
        ("n = [10, 20]", "n"),
        ("sweep_axis = M\nm_samples = []", "m_samples"),
        ("sweep_axis = K", "sweep_axis"),
        ("solver = simplex", "solver"),
        ("identifiability_mode = strict", "identifiability_mode"),
        ("eps = -1", "eps"),
        ("beta = 1.5", "beta"),
        ("filter1 = lowpass(1)", "filter1"),
        ("graph = dataset", "dataset_path"),
        ("seed = -3", "seed"),
        ("relabel = 1", "relabel"),
        ("m0 = 2\nm_attach = 3", "m0"),
        ("filter1 = power(0.1, 2)\nalpha = 0.1", "alpha"),
    ])
    def test_field_level_messages(self, text, field):
        with pytest.raises(ConfigError, match=f"^{field}:"):
            parse_config_text(text)


class TestGrid:
    def test_single_point(self):
        grid = ExperimentConfig().grid()
        assert len(grid) == 1 and grid[0]["m_samples"] == 100_000

    def test_sweep(self):
        cfg = ExperimentConfig(sigma2=[0.01, 0.1, 0.3], sweep_axis="sigma2")
        assert [p["sigma2"] for p in cfg.grid()] == [0.01, 0.1, 0.3]

    def test_auto_m(self):
        cfg = ExperimentConfig(n=[10, 20], sweep_axis="n", auto_m=True)
        assert [p["m_samples"] for p in cfg.grid()] == [17270, 44936]

    def test_alpha_filters(self):
        cfg = ExperimentConfig(alpha=[0.0, 0.2], sweep_axis="alpha")
        f1, f2 = cfg.filters_for(0.2)
        assert f1.params == (0.1,) and f2.params == (pytest.approx(0.3),)

    def test_hash_stable_and_sensitive(self):
        a, b = ExperimentConfig(seed=1), ExperimentConfig(seed=1)
        assert a.config_hash() == b.config_hash()
        assert a.config_hash() != ExperimentConfig(seed=2).config_hash()

    def test_overrides(self):
        cfg = ExperimentConfig().with_overrides(seed=5, solver=None)
        assert cfg.seed == 5 and cfg.solver == "auto"
        with pytest.raises(ConfigError):
            ExperimentConfig().with_overrides(trials=0)
