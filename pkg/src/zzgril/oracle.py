"""Slow, exact reference computations used to cross-check the fast paths.

Everything here works directly from definitions: homology as cycles modulo
boundaries, induced maps by pushing representatives forward, and the
generalized rank as the rank of the canonical map from the limit to the
colimit of a diagram of vector spaces.  Nothing in this module calls the
zigzag engine or the boundary-cap machinery.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from zzgril.bifiltration import GridPoint, QuasiZigzagBifiltration, leq
from zzgril.errors import ParameterError
from zzgril.f2 import Echelon, F2Matrix, bits, kernel, rank_of
from zzgril.simplicial import ABSENT, LevelFiltration, Simplex, facets, flag_births, sort_simplices


@dataclass
class HomologyBasis:
    """Cycle representatives of a basis of H_p, as bitsets over ``index``."""

    degree: int
    reps: list[int]
    index: dict[Simplex, int]
    _solver: Echelon

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coords(self, z: int) -> int:
        """Coordinates (bitset over ``reps``) of the class of cycle ``z``."""
        rem, tag = self._solver.reduce(z)
        if rem:
            raise ParameterError("chain is not a cycle of this complex")
        return tag

    def chain(self, simplices: Iterable[Simplex]) -> int:
        v = 0
        for s in simplices:
            v ^= 1 << self.index[s]
        return v


def _boundary_bits(s: Simplex, index: dict[Simplex, int]) -> int:
    v = 0
    for f in facets(s):
        v ^= 1 << index[f]
    return v


def _homology(cx: Iterable[Simplex], p: int, index: dict[Simplex, int]) -> HomologyBasis:
    cx = set(cx)
    p_simplices = sort_simplices(s for s in cx if len(s) == p + 1)
    q_simplices = sort_simplices(s for s in cx if len(s) == p + 2)
    bdry = [_boundary_bits(s, index) for s in p_simplices]
    cycles = []
    for combo in kernel(bdry):
        z = 0
        for j in bits(combo):
            z ^= 1 << index[p_simplices[j]]
        cycles.append(z)
    solver = Echelon()
    for s in q_simplices:
        solver.add(_boundary_bits(s, index))
    reps = []
    for z in cycles:
        if solver.add(z, 1 << len(reps)):
            reps.append(z)
    return HomologyBasis(p, reps, index, solver)


def homology(complex_: Iterable[Simplex], p: int) -> HomologyBasis:
    """Basis of H_p(complex) over F2."""
    cx = set(complex_)
    index = {s: i for i, s in enumerate(sort_simplices(cx))}
    return _homology(cx, p, index)


def induced_map(K: Iterable[Simplex], K2: Iterable[Simplex], p: int) -> F2Matrix:
    """Matrix of H_p(K) -> H_p(K2) for an inclusion K ⊆ K2, in the :func:`homology` bases."""
    K, K2 = set(K), set(K2)
    if not K <= K2:
        raise ParameterError("first complex is not contained in the second")
    index = {s: i for i, s in enumerate(sort_simplices(K2))}
    src = _homology(K, p, index)
    dst = _homology(K2, p, index)
    return F2Matrix(dst.dim, src.dim, [dst.coords(z) for z in src.reps])


def diagram_rank(dims: Sequence[int], arrows: Sequence[tuple[int, int, F2Matrix]]) -> int:
    """Rank of the canonical limit-to-colimit map of a connected diagram.

    ``dims[a]`` is the dimension of the space at node ``a``; each arrow
    ``(a, b, M)`` is a linear map from node ``a`` to node ``b``.  The arrows
    must generate the relations of the diagram.
    """
    n = len(dims)
    if n == 0:
        return 0
    offsets = np.concatenate([[0], np.cumsum(dims)]).tolist()
    arrow_off = [0]
    for a, b, _ in arrows:
        arrow_off.append(arrow_off[-1] + dims[b])

    def embed(node: int, v: int) -> int:
        return v << offsets[node]

    # limit: kernel of v -> (M v_a + v_b) over all arrows
    columns = []
    for a in range(n):
        for i in range(dims[a]):
            col = 0
            for k, (s, t, m) in enumerate(arrows):
                if s == a:
                    col ^= m.columns[i] << arrow_off[k]
                if t == a:
                    col ^= (1 << i) << arrow_off[k]
            columns.append(col)
    limit = kernel(columns)

    # colimit relations: iota_b(M u) + iota_a(u)
    relations = []
    for a, b, m in arrows:
        for i in range(dims[a]):
            relations.append(embed(b, m.columns[i]) ^ embed(a, 1 << i))
    # in a connected diagram every component of a compatible family has the same class
    mask = ((1 << dims[0]) - 1) << offsets[0]
    images = [v & mask for v in limit]
    r0 = rank_of(relations)
    return rank_of(relations + images) - r0


def _connected(points: Sequence[GridPoint], edges: Iterable[tuple[int, int]]) -> bool:
    adj: dict[int, list[int]] = {i: [] for i in range(len(points))}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    todo = deque([0])
    while todo:
        a = todo.popleft()
        for b in adj[a]:
            if b not in seen:
                seen.add(b)
                todo.append(b)
    return len(seen) == len(points)


def cover_relations(points: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Covering pairs (a, b), a < b, of the quasi-zigzag order restricted to ``points``."""
    n = len(points)
    less = [[a != b and leq(points[a], points[b]) for b in range(n)] for a in range(n)]
    out = []
    for a in range(n):
        for b in range(n):
            if less[a][b] and not any(less[a][c] and less[c][b] for c in range(n)):
                out.append((a, b))
    return out


class ModuleOracle:
    """Homology spaces and induced maps of a bi-filtration, cached per grid point."""

    def __init__(self, B: QuasiZigzagBifiltration, degree: int):
        self.B = B
        self.degree = degree
        self._h: dict[tuple[int, int], HomologyBasis] = {}
        self._m: dict[tuple, F2Matrix] = {}

    def space(self, p: tuple[int, int]) -> HomologyBasis:
        p = tuple(p)
        h = self._h.get(p)
        if h is None:
            h = _homology(self.B.complex_at(p), self.degree, self.B.index)
            self._h[p] = h
        return h

    def map(self, p: tuple[int, int], q: tuple[int, int]) -> F2Matrix:
        key = (tuple(p), tuple(q))
        m = self._m.get(key)
        if m is None:
            if not leq(p, q):
                raise ParameterError(f"{p} is not below {q}")
            src, dst = self.space(p), self.space(q)
            m = F2Matrix(dst.dim, src.dim, [dst.coords(z) for z in src.reps])
            self._m[key] = m
        return m

    def rank(self, sub: Iterable[tuple[int, int]]) -> int:
        points = sorted({GridPoint(*p) for p in sub})
        if not points:
            raise ParameterError("empty subposet")
        for p in points:
            if not self.B.contains(p):
                raise ParameterError(f"point {tuple(p)} outside the grid")
        covers = cover_relations(points)
        if not _connected(points, covers):
            raise ParameterError("subposet is not connected")
        dims = [self.space(p).dim for p in points]
        arrows = [(a, b, self.map(points[a], points[b])) for a, b in covers]
        return diagram_rank(dims, arrows)


def brute_rank(B: QuasiZigzagBifiltration, sub: Iterable[tuple[int, int]], p: int,
               oracle: ModuleOracle | None = None) -> int:
    """Generalized rank of H_p of ``B`` over the subposet ``sub``, from the definition."""
    oracle = oracle or ModuleOracle(B, p)
    return oracle.rank(sub)


def explicit_union_build(filtrations: Sequence[LevelFiltration]) -> dict[GridPoint, frozenset[Simplex]]:
    """Every complex of the grid, with union columns materialized as set unions."""
    if not filtrations:
        raise ParameterError("need at least one filtration")
    L = filtrations[0].levels
    if any(f.levels != L for f in filtrations):
        raise ParameterError("all filtrations must have the same number of levels")
    out: dict[GridPoint, frozenset[Simplex]] = {}
    T = len(filtrations)
    for y in range(1, L + 1):
        sub = [f.sublevel(y) for f in filtrations]
        for t in range(T):
            out[GridPoint(2 * t, y)] = sub[t]
            if t + 1 < T:
                out[GridPoint(2 * t + 1, y)] = sub[t] | sub[t + 1]
    return out


def worm_points(center: tuple[int, int], width: int, grid_width: int, levels: int) -> frozenset[GridPoint]:
    """Worm members by direct enumeration of the three squares."""
    px, py = center
    d = width
    pts = set()
    for cx, cy in ((px - d, py + d), (px, py), (px + d, py - d)):
        for x in range(cx - d, cx + d + 1):
            for y in range(cy - d, cy + d + 1):
                if 0 <= x < grid_width and 1 <= y <= levels:
                    pts.add(GridPoint(x, y))
    return frozenset(pts)


def erosion_distance_finite(
    B1: QuasiZigzagBifiltration,
    B2: QuasiZigzagBifiltration,
    centers: Iterable[tuple[int, int]],
    degree: int,
    rank: Callable[[QuasiZigzagBifiltration, frozenset, int], int] | None = None,
) -> int:
    """Smallest ``eps`` with rk1(w_d) >= rk2(w_{d+eps}) and vice versa at the given centers.

    Only widths whose worms fit inside the grid are compared.
    """
    if (B1.width, B1.L) != (B2.width, B2.L):
        raise ParameterError("bi-filtrations do not share a grid")
    from zzgril.worms import max_interior_width

    if rank is None:
        caches = {id(B1): ModuleOracle(B1, degree), id(B2): ModuleOracle(B2, degree)}

        def rank(B, pts, p):
            return caches[id(B)].rank(pts)

    tables = []
    for c in centers:
        top = max_interior_width(c, B1.width, B1.L)
        if top < 0 or not B1.contains(c):
            raise ParameterError(f"center {tuple(c)} is not interior")
        r1 = [rank(B1, worm_points(c, d, B1.width, B1.L), degree) for d in range(top + 1)]
        r2 = [rank(B2, worm_points(c, d, B1.width, B1.L), degree) for d in range(top + 1)]
        tables.append((r1, r2))
    bound = max((len(r1) for r1, _ in tables), default=0)
    for eps in range(bound + 1):
        if all(
            r1[d] >= r2[d + eps] and r2[d] >= r1[d + eps]
            for r1, r2 in tables
            for d in range(len(r1) - eps)
        ):
            return eps
    return bound


def standard_barcode(simplices: Sequence[Simplex], max_degree: int = 1) -> list[tuple[int, int, int]]:
    """Persistence of an insert-only filtration by dense mod-2 reduction.

    Simplex ``i`` enters at node ``i + 1``; returns sorted (degree, birth, death)
    with closed node intervals.
    """
    n = len(simplices)
    pos = {s: i for i, s in enumerate(simplices)}
    D = np.zeros((n, n), dtype=np.uint8)
    for j, s in enumerate(simplices):
        for f in facets(s):
            D[pos[f], j] = 1
    low_of: dict[int, int] = {}
    lows = np.full(n, -1)
    for j in range(n):
        while True:
            nz = np.flatnonzero(D[:, j])
            if len(nz) == 0:
                break
            low = int(nz[-1])
            k = low_of.get(low)
            if k is None:
                low_of[low] = j
                lows[j] = low
                break
            D[:, j] ^= D[:, k]
    out = []
    killed = set(low_of)
    for j in range(n):
        if lows[j] >= 0:
            i = int(lows[j])
            p = len(simplices[i]) - 1
            if p <= max_degree and i + 1 <= j:
                out.append((p, i + 1, j))
        elif j not in killed:
            p = len(simplices[j]) - 1
            if p <= max_degree:
                out.append((p, j + 1, n))
    return sorted(out)


def zigzag_barcode_brute(states: Sequence[frozenset[Simplex]], max_degree: int = 1) -> list[tuple[int, int, int]]:
    """Zigzag barcode from ranks over every node segment, by inclusion-exclusion.

    ``states[i]`` is the complex at node ``i + 1``; consecutive states must be nested.
    """
    N = len(states)
    universe = sort_simplices(set().union(*states)) if states else []
    index = {s: i for i, s in enumerate(universe)}
    out = []
    for p in range(max_degree + 1):
        hs = [_homology(S, p, index) for S in states]
        maps = []
        for k in range(N - 1):
            a, b = states[k], states[k + 1]
            if a <= b:
                maps.append((k, k + 1, F2Matrix(hs[k + 1].dim, hs[k].dim, [hs[k + 1].coords(z) for z in hs[k].reps])))
            elif b <= a:
                maps.append((k + 1, k, F2Matrix(hs[k].dim, hs[k + 1].dim, [hs[k].coords(z) for z in hs[k + 1].reps])))
            else:
                raise ParameterError(f"states {k + 1} and {k + 2} are not nested")
        rk = {}
        for i in range(N):
            for j in range(i, N):
                dims = [hs[k].dim for k in range(i, j + 1)]
                arrows = [(a - i, b - i, m) for a, b, m in maps[i:j]]
                rk[i, j] = diagram_rank(dims, arrows)

        def r(i: int, j: int) -> int:
            return rk.get((i, j), 0) if 0 <= i <= j < N else 0

        for i in range(N):
            for j in range(i, N):
                mult = r(i, j) - r(i - 1, j) - r(i, j + 1) + r(i - 1, j + 1)
                out.extend([(p, i + 1, j + 1)] * mult)
    return sorted(out)


def components(complex_: Iterable[Simplex]) -> int:
    """Connected components by union-find over the 1-skeleton."""
    cx = list(complex_)
    parent = {s[0]: s[0] for s in cx if len(s) == 1}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    count = len(parent)
    for s in cx:
        if len(s) == 2:
            a, b = find(s[0]), find(s[1])
            if a != b:
                parent[a] = b
                count -= 1
    return count


def random_filtrations(rng: np.random.Generator, T: int, L: int, n_vertices: int, max_dim: int = 2,
                       p_edge: float = 0.7) -> list[LevelFiltration]:
    """Random flag filtrations on a shared vertex set (test instances)."""
    out = []
    for _ in range(T):
        el = np.full((n_vertices, n_vertices), ABSENT, dtype=np.int64)
        for i, j in combinations(range(n_vertices), 2):
            if rng.random() < p_edge:
                el[i, j] = el[j, i] = int(rng.integers(1, L + 1))
        simplices, births = flag_births(el, max_dim)
        out.append(LevelFiltration(L, {s: int(b) for s, b in zip(simplices, births) if b != ABSENT}))
    return out


def random_bifiltration(rng: np.random.Generator, T: int, L: int, n_vertices: int, max_dim: int = 2,
                        p_edge: float = 0.7) -> QuasiZigzagBifiltration:
    from zzgril.bifiltration import build

    return build(random_filtrations(rng, T, L, n_vertices, max_dim, p_edge))


def random_zigzag(rng: np.random.Generator, n_vertices: int = 5, max_ops: int = 40, max_dim: int = 2,
                  p_insert: float = 0.65):
    """Random legal zigzag filtration on at most ``n_vertices`` vertices, closed to the empty complex.

    Returns the op list; its length never exceeds ``max_ops``.
    """
    from zzgril.zigzag import DELETE, INSERT

    pool = [s for k in range(1, max_dim + 2) for s in combinations(range(n_vertices), k)]
    cur: set[Simplex] = set()
    ops: list[tuple[str, Simplex]] = []
    while True:
        addable = [s for s in pool if s not in cur and all(f in cur for f in facets(s))]
        removable = [s for s in cur if not any(len(t) == len(s) + 1 and set(s) < set(t) for t in cur)]
        # leave room to tear everything down
        room = max_ops - len(ops) - len(cur)
        if room <= 0 or (not addable and not removable):
            break
        if addable and room >= 2 and (not removable or rng.random() < p_insert):
            s = addable[int(rng.integers(len(addable)))]
            cur.add(s)
            ops.append((INSERT, s))
        elif removable:
            s = removable[int(rng.integers(len(removable)))]
            cur.discard(s)
            ops.append((DELETE, s))
        else:
            break
    for s in sort_simplices(cur)[::-1]:
        ops.append((DELETE, s))
    return ops


def distinct_worms(B: QuasiZigzagBifiltration):
    """Every distinct clipped worm on the grid of ``B``, as (center, width, member set)."""
    seen = set()
    for x in range(B.width):
        for y in range(1, B.L + 1):
            for d in range(max(B.width, B.L) + 1):
                m = worm_points((x, y), d, B.width, B.L)
                if m not in seen:
                    seen.add(m)
                    yield GridPoint(x, y), d, m


def cross_check(B: QuasiZigzagBifiltration, degrees: Sequence[int] = (0, 1)) -> tuple[int, list[dict]]:
    """Compare fast worm ranks with the oracle on every distinct worm.

    Returns (number of comparisons, mismatches).
    """
    from zzgril.landscape import RankCache
    from zzgril.worms import Worm

    fast = RankCache(B, max(degrees))
    slow = {p: ModuleOracle(B, p) for p in degrees}
    checks, bad = 0, []
    for c, d, pts in distinct_worms(B):
        w = Worm.on(B, c, d)
        if w.members() != pts:
            bad.append({"center": list(c), "width": d, "error": "worm geometry differs"})
            continue
        ranks = fast.ranks(w)
        for p in degrees:
            expected = slow[p].rank(pts)
            checks += 1
            if ranks[p] != expected:
                bad.append({"center": list(c), "width": d, "degree": p, "fast": ranks[p], "oracle": expected})
    return checks, bad


def random_instance(rng: np.random.Generator, max_T: int = 4, max_L: int = 4, max_vertices: int = 6,
                    max_dim: int = 2) -> QuasiZigzagBifiltration:
    """Random small flag bi-filtration with sizes drawn up to the given bounds."""
    T = int(rng.integers(1, max_T + 1))
    L = int(rng.integers(1, max_L + 1))
    n = int(rng.integers(1, max_vertices + 1))
    return random_bifiltration(rng, T, L, n, max_dim, p_edge=float(rng.uniform(0.3, 0.9)))
