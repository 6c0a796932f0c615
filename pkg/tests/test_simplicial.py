from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zzgril.errors import ParameterError, StructuralError
from zzgril.simplicial import (
    ABSENT,
    LevelFiltration,
    boundary_matrix,
    check_closed,
    facets,
    graph_clique_filtration,
    pairwise_distances,
    rips_level_filtration,
    simplex,
    sort_simplices,
    uniform_levels,
)


def full_complex(n, max_dim):
    return {s for k in range(1, max_dim + 2) for s in combinations(range(n), k)}


def test_simplex_validation():
    assert simplex([1, 3]) == (1, 3)
    with pytest.raises(ParameterError):
        simplex([3, 1])
    with pytest.raises(ParameterError):
        simplex([])
    with pytest.raises(ParameterError):
        simplex([1, 1])


def test_edge_boundary():
    m = boundary_matrix({(0,), (1,), (0, 1)}, 1)
    assert m.shape == (2, 1)
    assert m.to_dense().tolist() == [[1], [1]]


def test_hollow_triangle_boundary_rank():
    cx = {(0,), (1,), (2,), (0, 1), (1, 2), (0, 2)}
    m = boundary_matrix(cx, 1)
    assert m.shape == (3, 3)
    assert m.rank() == 2


def test_non_closed_complex_names_coface():
    with pytest.raises(StructuralError, match=r"\(0, 1\)"):
        boundary_matrix({(0,), (0, 1)}, 1)
    with pytest.raises(StructuralError):
        check_closed({(0, 1, 2), (0,), (1,), (2,)})


@given(st.integers(0, 2**20 - 1))
def test_boundary_of_boundary_vanishes(mask):
    pool = sorted(full_complex(6, 2), key=lambda s: (len(s), s))
    chosen = {s for i, s in enumerate(pool) if mask >> (i % 20) & 1}
    cx = set()
    for s in chosen:
        cx.update(s2 for k in range(1, len(s) + 1) for s2 in combinations(s, k))
    if not any(len(s) == 3 for s in cx):
        return
    assert (boundary_matrix(cx, 1) @ boundary_matrix(cx, 2)).is_zero()


def test_triangle_equal_weights_one_level():
    f = graph_clique_filtration([0, 1, 2], {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0}, 1, 2)
    assert f.births == {s: 1 for s in full_complex(3, 2)}


def test_path_graph_levels():
    f = graph_clique_filtration([0, 1, 2], {(0, 1): 0.0, (1, 2): 1.0}, 2, 1)
    assert f.births == {(0,): 1, (1,): 1, (2,): 1, (0, 1): 1, (1, 2): 2}


def test_clique_parameter_errors():
    with pytest.raises(ParameterError):
        graph_clique_filtration([0, 1], {(0, 1): 1.0}, 0)
    with pytest.raises(ParameterError):
        graph_clique_filtration([0, 1], {(0, 1): 1.0}, 2, max_dim=0)


@given(st.lists(st.floats(0, 1), min_size=10, max_size=10), st.integers(1, 5))
def test_clique_sublevels_are_thresholded_flag_complexes(ws, L):
    edges = list(combinations(range(5), 2))
    weights = dict(zip(edges, ws))
    f = graph_clique_filtration(range(5), weights, L, 2)
    rule = uniform_levels(min(ws), max(ws), L)
    for lvl in range(1, L + 1):
        keep = {e for e in edges if rule(weights[e]) <= lvl}
        flag = {(v,) for v in range(5)} | keep
        flag |= {t for t in combinations(range(5), 3) if all(e in keep for e in combinations(t, 2))}
        assert f.sublevel(lvl) == flag


def test_rips_single_point():
    f = rips_level_filtration([[1.0, 2.0]], 3)
    assert f.births == {(0,): 1}
    assert all(f.sublevel(l) == {(0,)} for l in (1, 2, 3))


def test_rips_edge_level_from_rule():
    f = rips_level_filtration([[0.0], [2.0]], 4, 1, lambda d: 1 if d == 0 else 3)
    assert f.birth((0, 1)) == 3


def test_rips_rejects_empty():
    with pytest.raises(ParameterError):
        rips_level_filtration([], 3)


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=4, max_size=4))
def test_rips_levels_match_thresholds(pts):
    L = 5
    f = rips_level_filtration(pts, L, 2)
    D = pairwise_distances(np.array(pts))
    iu = np.triu_indices(4, 1)
    rule = uniform_levels(float(D[iu].min()), float(D[iu].max()), L)
    for lvl in range(1, L + 1):
        edges = {e for e in combinations(range(4), 2) if rule(D[e]) <= lvl}
        expect = {(v,) for v in range(4)} | edges
        expect |= {t for t in combinations(range(4), 3) if all(e in edges for e in combinations(t, 2))}
        assert f.sublevel(lvl) == expect


@given(st.dictionaries(st.sampled_from(sorted(full_complex(4, 2))), st.integers(1, 4)))
def test_level_filtration_sublevels_closed(births):
    try:
        f = LevelFiltration(4, births)
    except StructuralError:
        return
    for lvl in range(1, 5):
        check_closed(f.sublevel(lvl))


def test_level_filtration_rejects_late_facet():
    with pytest.raises(StructuralError):
        LevelFiltration(3, {(0,): 2, (1,): 1, (0, 1): 1})
    with pytest.raises(ParameterError):
        LevelFiltration(2, {(0,): 3})


def test_clique_rule_and_canonical_order():
    f = graph_clique_filtration([0, 1, 2], {(0, 1): 0.0, (1, 2): 0.5, (0, 2): 1.0}, 3, 2)
    assert f.birth((0, 1, 2)) == max(f.birth(e) for e in facets((0, 1, 2)))
    assert f.birth((5,)) == ABSENT
    assert sort_simplices([(1, 2), (0,), (0, 1)]) == [(0,), (0, 1), (1, 2)]
