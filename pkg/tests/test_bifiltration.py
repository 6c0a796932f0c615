import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zzgril.bifiltration import GridPoint, QuasiZigzagBifiltration, build, leq
from zzgril.errors import ParameterError, StructuralError
from zzgril.oracle import explicit_union_build, random_filtrations
from zzgril.simplicial import ABSENT, LevelFiltration

seeds = st.integers(0, 2**32 - 1)


def random_case(seed, max_T=4, max_L=4, max_n=5):
    rng = np.random.default_rng(seed)
    T, L, n = (int(rng.integers(1, k + 1)) for k in (max_T, max_L, max_n))
    return rng, random_filtrations(rng, T, L, n, 2, float(rng.uniform(0.3, 0.9)))


def test_union_column_takes_earlier_birth():
    f1 = LevelFiltration(2, {(0,): 1, (1,): 1, (0, 1): 2})
    f2 = LevelFiltration(2, {(0,): 1, (1,): 1, (0, 1): 1})
    B = build([f1, f2])
    assert B.width == 3
    assert B.column_births(1)[B.index[(0, 1)]] == 1
    assert B.arrow_delta((0, 1), (1, 1)) == ([(0, 1)], [])


def test_one_sided_simplex_keeps_its_births():
    f1 = LevelFiltration(3, {(0,): 1, (1,): 1, (0, 1): 2})
    f2 = LevelFiltration(3, {(0,): 1, (1,): 1})
    B = build([f1, f2])
    i = B.index[(0, 1)]
    assert B.births[1, i] == ABSENT
    assert B.column_births(1)[i] == 2
    for y in (2, 3):
        assert B.arrow_delta((2, y), (1, y)) == ([(0, 1)], [])
    assert B.arrow_delta((2, 1), (1, 1)) == ([], [])


def test_build_errors():
    with pytest.raises(ParameterError):
        build([])
    with pytest.raises(ParameterError):
        build([LevelFiltration(2, {(0,): 1}), LevelFiltration(3, {(0,): 1})])
    with pytest.raises(ParameterError):
        build([LevelFiltration(2, {(0,): 1}), LevelFiltration(2, {(1,): 1})])
    with pytest.raises(StructuralError):
        QuasiZigzagBifiltration([(0,), (1,), (0, 1)], np.array([[2, 1, 1]]), 2)


@given(seeds)
def test_matches_explicit_unions(seed):
    _, fs = random_case(seed)
    B = build(fs)
    explicit = explicit_union_build(fs)
    assert set(explicit) == {GridPoint(x, y) for x in range(B.width) for y in range(1, B.L + 1)}
    for p, cx in explicit.items():
        assert B.complex_at(p) == cx


def test_even_column_top_is_input_complex(tri):
    for t in range(tri.T):
        assert tri.complex_at((2 * t, tri.L)) == frozenset(tri.filtration(t).births)
    assert tri.complex_at((1, 2)) == tri.complex_at((0, 2)) | tri.complex_at((2, 2))


def test_out_of_grid(tri):
    with pytest.raises(ParameterError):
        tri.complex_at((3, 1))
    with pytest.raises(ParameterError):
        tri.complex_at((0, 0))
    with pytest.raises(ParameterError):
        tri.arrow_delta((0, 1), (1, 2))


@given(seeds)
def test_forward_arrows_only_insert(seed):
    _, fs = random_case(seed)
    B = build(fs)
    for x in range(B.width):
        for y in range(1, B.L + 1):
            for q in ((x, y + 1), (x + 1, y), (x - 1, y)):
                if B.contains(q) and leq((x, y), q):
                    ins, dels = B.arrow_delta((x, y), q)
                    assert dels == []
                    assert B.arrow_delta(q, (x, y)) == ([], ins)


@given(seeds)
def test_vertical_delta_is_births_at_next_level(seed):
    _, fs = random_case(seed)
    B = build(fs)
    for x in range(B.width):
        col = B.column_births(x)
        for y in range(1, B.L):
            ins, _ = B.arrow_delta((x, y), (x, y + 1))
            assert set(ins) == {B.simplices[i] for i in np.flatnonzero(col == y + 1)}


@given(seeds)
def test_replaying_deltas_along_a_walk(seed):
    rng, fs = random_case(seed)
    B = build(fs)
    p = (int(rng.integers(B.width)), int(rng.integers(1, B.L + 1)))
    state = set(B.complex_at(p))
    for _ in range(12):
        x, y = p
        steps = [q for q in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)) if B.contains(q)]
        if not steps:
            break
        q = steps[int(rng.integers(len(steps)))]
        ins, dels = B.arrow_delta(p, q)
        state = (state - set(dels)) | set(ins)
        p = q
        assert state == B.complex_at(p)


def test_order_relation():
    assert leq((0, 1), (1, 1))
    assert leq((2, 1), (1, 3))
    assert not leq((1, 1), (0, 1))
    assert not leq((0, 1), (2, 1))
    assert not leq((0, 2), (0, 1))


@given(seeds)
def test_json_roundtrip(seed):
    _, fs = random_case(seed)
    B = build(fs)
    again = QuasiZigzagBifiltration.from_json(json.loads(B.dumps({"note": 1})))
    assert again == B
    assert again.dumps() == B.dumps()


def test_malformed_json():
    with pytest.raises(StructuralError):
        QuasiZigzagBifiltration.from_json({"format": "other"})
    with pytest.raises(StructuralError):
        QuasiZigzagBifiltration.from_json({"format": "zzgril-bifiltration/1", "T": 2, "L": 1, "columns": [[]]})


def test_odd_columns_are_not_stored(tri):
    assert tri.births.shape == (tri.T, len(tri.simplices))
