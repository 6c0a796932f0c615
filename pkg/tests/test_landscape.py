import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zzgril.bifiltration import GridPoint, build
from zzgril.errors import ParameterError
from zzgril.landscape import (
    RankCache,
    ZzGrilLandscape,
    delta_max,
    generalized_rank,
    landscape,
    sample_centers,
    zzgril_value,
)
from zzgril.oracle import random_instance
from zzgril.simplicial import LevelFiltration
from zzgril.worms import Staircase, Worm

seeds = st.integers(0, 2**32 - 1)


def static_vertex(T=3, L=4):
    f = LevelFiltration(L, {(0,): 1})
    return build([f] * T)


def test_static_vertex_rank_and_value():
    B = static_vertex()
    for d in range(4):
        assert generalized_rank(B, Worm.on(B, (2, 2), d), 0) == 1
    assert zzgril_value(B, (2, 2), 1, 0) == delta_max(B) == 5
    assert zzgril_value(B, (2, 2), 2, 0) == 0


def test_three_point_instance(tri):
    assert generalized_rank(tri, Staircase.rectangle(0, 2, 1, 3), 0) == 1
    assert generalized_rank(tri, Staircase.rectangle(0, 2, 1, 1), 0) == 3
    assert generalized_rank(tri, Staircase.rectangle(1, 2, 1, 2), 0) == 2


def test_parameter_errors(tri):
    with pytest.raises(ParameterError):
        zzgril_value(tri, (1, 1), 0, 0)
    with pytest.raises(ParameterError):
        zzgril_value(tri, (5, 1), 1, 0)
    with pytest.raises(ParameterError):
        generalized_rank(tri, Worm((0, 1), 1, 9, 9), 0)
    with pytest.raises(ParameterError):
        generalized_rank(tri, Worm.on(tri, (0, 1), 1), -1)


@given(seeds)
def test_rank_shrinks_as_worms_grow(seed):
    rng = np.random.default_rng(seed)
    B = random_instance(rng)
    cache = RankCache(B, 1)
    c = (int(rng.integers(B.width)), int(rng.integers(1, B.L + 1)))
    ranks = [cache.ranks(Worm.on(B, c, d)) for d in range(delta_max(B) + 1)]
    for a, b in zip(ranks, ranks[1:]):
        assert all(x >= y for x, y in zip(a, b))


@given(seeds)
def test_value_is_last_qualifying_width(seed):
    rng = np.random.default_rng(seed)
    B = random_instance(rng)
    cache = RankCache(B, 1)
    c = (int(rng.integers(B.width)), int(rng.integers(1, B.L + 1)))
    for p in (0, 1):
        ranks = [cache.rank(Worm.on(B, c, d), p) for d in range(delta_max(B) + 1)]
        for k in (1, 2, 3):
            expect = max((d for d, r in enumerate(ranks) if r >= k), default=0)
            assert zzgril_value(B, c, k, p, cache) == expect


def test_sample_centers():
    assert sample_centers(9, 5, 1, 1) == [GridPoint(4, 3)]
    six = sample_centers(60, 10)
    assert len(six) == 36 and len(set(six)) == 36
    assert sample_centers(4, 4, 2, 2) == [GridPoint(1, 2), GridPoint(2, 2), GridPoint(1, 3), GridPoint(2, 3)]
    assert sample_centers(4, 4, 2, 2) == sample_centers(4, 4, 2, 2)
    assert len(sample_centers(91, 8, count=10)) == 10
    with pytest.raises(ParameterError):
        sample_centers(3, 3, 6, 6)
    with pytest.raises(ParameterError):
        sample_centers(3, 3, 0, 1)


@given(st.integers(1, 40), st.integers(1, 12), st.integers(1, 6), st.integers(1, 6))
def test_sample_centers_in_grid(W, L, rows, cols):
    if rows > L or cols > W:
        return
    for x, y in sample_centers(W, L, rows, cols):
        assert 0 <= x < W and 1 <= y <= L


def test_empty_landscape(tri):
    land = landscape(tri, [])
    assert land.values == {}
    assert land.feature_vector().size == 0


@given(seeds)
def test_landscape_entries_match_direct_values(seed):
    rng = np.random.default_rng(seed)
    B = random_instance(rng)
    centers = sample_centers(B.width, B.L, 1, 1) + [GridPoint(0, 1)]
    land = landscape(B, centers, (1, 2), (0, 1))
    for (c, k, p), v in land.values.items():
        assert v == zzgril_value(B, c, k, p)
        assert 0 <= v <= delta_max(B)
        if k == 2:
            assert v <= land.value(c, 1, p)


def test_landscape_parallel_matches_serial():
    rng = np.random.default_rng(3)
    B = random_instance(rng, 4, 4, 6)
    centers = sample_centers(B.width, B.L, 2, 2) if B.L >= 2 and B.width >= 2 else [GridPoint(0, 1)]
    a = landscape(B, centers, jobs=1)
    b = landscape(B, centers, jobs=2)
    assert a.values == b.values and a.metadata == b.metadata


def test_serialization_roundtrip(tri):
    land = landscape(tri, sample_centers(tri.width, tri.L, 1, 1), (1, 2), (0, 1))
    again = ZzGrilLandscape.from_json(json.loads(json.dumps(land.to_json())))
    assert again.values == land.values
    assert again.metadata == land.metadata
    assert land.to_csv().splitlines()[0] == "cx,cy,k,degree,lambda"
    assert len(land.to_csv().splitlines()) == 5
    assert land.feature_names()[0] == "H0_k1_x1_y2"
    xs, ys, grid = land.heatmap(1, 0)
    assert grid.shape == (1, 1)


def test_feature_order_is_degree_k_center(tri):
    centers = [GridPoint(0, 1), GridPoint(2, 1)]
    land = landscape(tri, centers, (1, 2), (0, 1))
    names = land.feature_names()
    assert names[:4] == ["H0_k1_x0_y1", "H0_k1_x2_y1", "H0_k2_x0_y1", "H0_k2_x2_y1"]
    assert list(land.feature_vector()) == [land.values[c, k, p] for p in (0, 1) for k in (1, 2) for c in centers]
