"""Checks on real edge lists; skipped unless the files are supplied.

Put ``highschool.edges`` and/or ``facebook.edges`` in ``$BLINDMATCH_DATA``
(or ``tests/data``).
"""
import numpy as np
import pytest

from blindmatch import edge_sample, laplacian
from blindmatch.formats import load_edge_list
from blindmatch.graphs import symmetric_swaps

from conftest import dataset_path


def _load(name):
    path = dataset_path(name)
    if path is None:
        pytest.skip(f"{name} not available")
    return load_edge_list(path, relabel=True)


def test_highschool_shape_and_sampling():
    g = _load("highschool.edges")
    assert (g.n, g.edge_count) == (70, 366)
    kept = edge_sample(g, 0.98, 5).edge_count
    sd = np.sqrt(366 * 0.98 * 0.02)
    assert abs(kept - 366 * 0.98) <= 4 * sd


def test_facebook_shape():
    g = _load("facebook.edges")
    assert (g.n, g.edge_count) == (348, 2866)


def test_facebook_subsample_is_symmetric():
    g = _load("facebook.edges")
    assert symmetric_swaps(laplacian(edge_sample(g, 0.98, 0)))
