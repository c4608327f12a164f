import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blindmatch import (GraphFilter, SignalBatch, SignalModel, gen_er, generate_signals, laplacian,
                        sample_covariance, true_covariance)
from blindmatch.errors import InvalidArgumentError, NumericDomainError
from blindmatch.signals import BLOCK_SIZE, filter_matrix, frequency_response

from conftest import path_graph


def fsum_covariance(y):
    # independent accumulator: exactly rounded sums per entry
    m, n = y.shape
    c = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            c[i, j] = math.fsum(y[:, i] * y[:, j]) / m
    return c


class TestGraphFilter:
    def test_parse_roundtrip(self):
        for f in (GraphFilter.resolvent(0.1), GraphFilter.power(0.1, 2), GraphFilter.arma(0.5, 0.2),
                  GraphFilter.polynomial([1.0, 0.5, 0.25])):
            assert GraphFilter.parse(f.spec()) == f

    def test_parse_errors(self):
        for text in ("resolvent", "resolvent(a)", "foo(1)", "power(0.1, 1.5)", "resolvent(1, 2)"):
            with pytest.raises(InvalidArgumentError):
                GraphFilter.parse(text)

    def test_responses(self):
        assert frequency_response(GraphFilter.resolvent(0.1), [0.0])[0] == 1.0
        assert frequency_response(GraphFilter.resolvent(0.1), [10.0])[0] == pytest.approx(0.5)
        assert frequency_response(GraphFilter.power(0.1, 2), [0.0])[0] == 1.0
        assert frequency_response(GraphFilter.arma(2.0, 0.5), [1.0])[0] == pytest.approx(2.0)
        np.testing.assert_allclose(frequency_response(GraphFilter.polynomial([1, 2, 3]), [0, 1, 2]),
                                   [1, 6, 17])

    def test_pole(self):
        with pytest.raises(NumericDomainError):
            frequency_response(GraphFilter.resolvent(-0.5), [2.0])
        with pytest.raises(NumericDomainError):
            filter_matrix(laplacian(path_graph()), GraphFilter.resolvent(-1 / 3))


class TestFilterMatrix:
    def test_resolvent_zero_laplacian(self):
        np.testing.assert_allclose(filter_matrix(np.zeros((4, 4)), GraphFilter.resolvent(0.1)), np.eye(4),
                                   atol=1e-15)

    def test_polynomial_on_path(self):
        lap = laplacian(path_graph())
        h = filter_matrix(lap, GraphFilter.polynomial([1, 1]))
        np.testing.assert_allclose(h, np.eye(3) + lap, atol=1e-12)
        np.testing.assert_allclose(np.linalg.eigvalsh(h), [1, 2, 4], atol=1e-12)

    def test_resolvent_on_path(self):
        h = filter_matrix(laplacian(path_graph()), GraphFilter.resolvent(0.3))
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(h)), np.sort([1, 1 / 1.3, 1 / 1.9]), atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 9), st.lists(st.floats(-2, 2), min_size=1, max_size=4), st.integers(0, 2**31))
    def test_polynomial_matches_horner(self, n, coeffs, seed):
        lap = laplacian(gen_er(n, 0.5, seed))
        direct = np.zeros((n, n))
        for h in reversed(coeffs):
            direct = direct @ lap + h * np.eye(n)
        got = filter_matrix(lap, GraphFilter.polynomial(coeffs))
        scale = max(1.0, np.linalg.norm(direct))
        assert np.linalg.norm(got - direct) <= 1e-9 * scale

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 15), st.floats(0.01, 2.0), st.integers(0, 2**31))
    def test_commutes_with_laplacian(self, n, alpha, seed):
        lap = laplacian(gen_er(n, 0.4, seed))
        h = filter_matrix(lap, GraphFilter.resolvent(alpha))
        assert np.linalg.norm(h @ lap - lap @ h) <= 1e-9 * np.linalg.norm(lap) * np.linalg.norm(h)


class TestTrueCovariance:
    def test_zero_laplacian(self):
        np.testing.assert_allclose(true_covariance(np.zeros((3, 3)), GraphFilter.resolvent(0.1)).matrix,
                                   np.eye(3), atol=1e-15)

    def test_path(self):
        c = true_covariance(laplacian(path_graph()), GraphFilter.resolvent(0.3)).matrix
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(c)), np.sort([1, 1 / 1.69, 1 / 3.61]), atol=1e-12)

    def test_shares_eigenvectors(self):
        lap = laplacian(gen_er(10, 0.5, 3))
        c = true_covariance(lap, GraphFilter.resolvent(0.2)).matrix
        assert np.linalg.norm(c @ lap - lap @ c) <= 1e-10 * np.linalg.norm(lap)


class TestGenerateSignals:
    def test_identity_filter_passthrough(self):
        model = SignalModel(GraphFilter.resolvent(0.1), 0.0)
        y = generate_signals(np.zeros((5, 5)), model, 100, seed=3).samples
        x = np.random.default_rng(np.random.SeedSequence(3, spawn_key=(0, 0))).standard_normal((100, 5))
        np.testing.assert_array_equal(y, x)

    def test_reproducible_and_worker_independent(self):
        lap = laplacian(gen_er(8, 0.5, 1))
        model = SignalModel(GraphFilter.resolvent(0.2), 0.05)
        m = 2 * BLOCK_SIZE + 17
        a = generate_signals(lap, model, m, 9).samples
        b = generate_signals(lap, model, m, 9, workers=3).samples
        np.testing.assert_array_equal(a, b)

    def test_noise_level_does_not_move_excitation(self):
        lap = laplacian(gen_er(6, 0.5, 1))
        f = GraphFilter.resolvent(0.2)
        y0 = generate_signals(lap, SignalModel(f, 0.0), 500, 4).samples
        y1 = generate_signals(lap, SignalModel(f, 0.1), 500, 4).samples
        w0 = generate_signals(np.zeros((6, 6)), SignalModel(f, 0.1), 500, 4).samples
        x0 = generate_signals(np.zeros((6, 6)), SignalModel(f, 0.0), 500, 4).samples
        np.testing.assert_allclose(y1 - y0, w0 - x0, atol=1e-12)

    def test_rademacher(self):
        y = generate_signals(np.zeros((4, 4)), SignalModel(GraphFilter.resolvent(0.1), 0, "rademacher"),
                             200, 1).samples
        assert set(np.unique(y)) == {-1.0, 1.0}

    def test_zero_mean(self):
        lap = laplacian(gen_er(20, 0.4, 2))
        f = GraphFilter.resolvent(0.1)
        m = 100_000
        y = generate_signals(lap, SignalModel(f, 0.01), m, 5).samples
        h = filter_matrix(lap, f)
        limit = 4 * np.sqrt((np.linalg.norm(h, 2) ** 2 + 0.01) / m)
        assert np.all(np.abs(y.mean(axis=0)) <= limit)

    def test_covariance_close_to_model(self):
        lap = laplacian(gen_er(50, 0.4, 7))
        f = GraphFilter.resolvent(0.1)
        y = generate_signals(lap, SignalModel(f, 0.01), 100_000, 1)
        h2 = true_covariance(lap, f).matrix
        err = np.linalg.norm(sample_covariance(y).matrix - h2 - 0.01 * np.eye(50), 2)
        assert err <= 0.05 * np.linalg.norm(h2, 2)

    def test_bad_arguments(self):
        model = SignalModel(GraphFilter.resolvent(0.1))
        with pytest.raises(InvalidArgumentError):
            generate_signals(np.zeros((2, 2)), model, 0, 1)
        with pytest.raises(InvalidArgumentError):
            SignalModel(GraphFilter.resolvent(0.1), -1.0)
        with pytest.raises(InvalidArgumentError):
            SignalBatch(np.array([[np.nan]]))


class TestSampleCovariance:
    def test_single_sample(self):
        np.testing.assert_array_equal(sample_covariance(np.array([[1.0, 0.0]])).matrix, [[1, 0], [0, 0]])

    def test_repeated_sample(self):
        y = np.array([1.0, -2.0, 0.5])
        c = sample_covariance(np.tile(y, (7, 1))).matrix
        np.testing.assert_allclose(c, np.outer(y, y), rtol=1e-15)

    def test_against_exact_sums(self, rng):
        y = rng.standard_normal((3000, 6)) * rng.uniform(0.1, 10, 6)
        c = sample_covariance(y)
        ref = fsum_covariance(y)
        assert np.max(np.abs(c.matrix - ref)) <= 1e-10 * np.max(np.abs(ref))
        assert c.m_used == 3000

    def test_exact_symmetry_and_psd(self, rng):
        c = sample_covariance(rng.standard_normal((50, 12))).matrix
        np.testing.assert_array_equal(c, c.T)
        w = np.linalg.eigvalsh(c)
        assert w.min() >= -1e-10 * w.max()
