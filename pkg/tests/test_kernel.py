import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from zzgril._kernel import facet_table, zigzag_bars
from zzgril.landscape import RankCache
from zzgril.oracle import random_instance, random_zigzag
from zzgril.simplicial import sort_simplices
from zzgril.worms import Worm
from zzgril.zigzag import INSERT, compute_barcode

seeds = st.integers(0, 2**32 - 1)


@given(seeds)
def test_compiled_bars_match_python(seed):
    rng = np.random.default_rng(seed)
    ops = random_zigzag(rng, int(rng.integers(1, 7)), 40)
    universe = sort_simplices({s for _, s in ops})
    index = {s: i for i, s in enumerate(universe)}
    table, dims = facet_table(universe)
    kinds = np.array([k == INSERT for k, _ in ops], dtype=np.int8)
    sids = np.array([index[s] for _, s in ops], dtype=np.int64)
    got = sorted((int(p), int(b), int(d)) for p, b, d in zigzag_bars(kinds, sids, table, dims, len(universe))
                 if p <= 2)
    assert got == compute_barcode(ops, 2).as_list()


@given(seeds)
def test_compiled_ranks_match_python(seed):
    rng = np.random.default_rng(seed)
    B = random_instance(rng)
    fast, slow = RankCache(B, 1), RankCache(B, 1, compiled=False)
    for _ in range(10):
        c = (int(rng.integers(B.width)), int(rng.integers(1, B.L + 1)))
        w = Worm.on(B, c, int(rng.integers(0, 4)))
        assert fast.ranks(w) == slow.ranks(w)
