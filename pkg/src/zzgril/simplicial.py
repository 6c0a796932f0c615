"""Simplices, level filtrations and F2 boundary matrices.

A simplex is a plain tuple of strictly increasing non-negative vertex ids.
Whenever simplices are listed in bulk they follow the canonical order
``(dimension, lexicographic vertex sequence)``, which puts every face
before its cofaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from zzgril.errors import ParameterError, StructuralError
from zzgril.f2 import F2Matrix

Simplex = tuple[int, ...]

# Birth sentinel for simplices missing from a filtration; compares above every level.
ABSENT = np.iinfo(np.int64).max


def simplex(vertices: Iterable[int]) -> Simplex:
    """Validate and return ``vertices`` as a canonical simplex tuple."""
    s = tuple(int(v) for v in vertices)
    if not s:
        raise ParameterError("a simplex needs at least one vertex")
    if s[0] < 0:
        raise ParameterError(f"negative vertex id in {s}")
    if any(a >= b for a, b in zip(s, s[1:])):
        raise ParameterError(f"simplex vertices must be strictly increasing: {s}")
    return s


def dim(s: Simplex) -> int:
    return len(s) - 1


def facets(s: Simplex) -> list[Simplex]:
    if len(s) == 1:
        return []
    return [s[:i] + s[i + 1:] for i in range(len(s))]


def canonical_key(s: Simplex) -> tuple[int, Simplex]:
    return len(s), s


def sort_simplices(simplices: Iterable[Simplex]) -> list[Simplex]:
    return sorted(simplices, key=canonical_key)


def check_closed(complex_: Iterable[Simplex]) -> None:
    """Raise StructuralError naming the first simplex with a missing facet."""
    cx = set(complex_)
    for s in sort_simplices(cx):
        for f in facets(s):
            if f not in cx:
                raise StructuralError(f"simplex {s} is present but its facet {f} is not")


def boundary_matrix(complex_: Iterable[Simplex], degree: int) -> F2Matrix:
    """Matrix of the degree-``degree`` boundary map over F2.

    Rows are the (degree-1)-simplices and columns the degree-simplices, both
    in lexicographic order.
    """
    if degree < 0:
        raise ParameterError("degree must be non-negative")
    cx = set(complex_)
    check_closed(cx)
    cols = sorted(s for s in cx if len(s) == degree + 1)
    rows = sorted(s for s in cx if len(s) == degree)
    row_index = {s: i for i, s in enumerate(rows)}
    columns = []
    for s in cols:
        v = 0
        for f in facets(s):
            v ^= 1 << row_index[f]
        columns.append(v)
    return F2Matrix(len(rows), len(cols), columns)


def uniform_levels(lo: float, hi: float, levels: int) -> Callable[[float], int]:
    """Uniform binning of [lo, hi] into ``levels`` bins; bin edges belong to the lower bin.

    ``lo`` maps to level 1, ``hi`` to ``levels``; values are clamped into range.
    """
    if levels < 1:
        raise ParameterError("levels must be >= 1")
    span = hi - lo

    def rule(value: float) -> int:
        if span <= 0:
            return 1
        lvl = math.ceil((value - lo) / span * levels - 1e-9)
        return min(max(lvl, 1), levels)

    return rule


def uniform_levels_array(values: np.ndarray, lo: float, hi: float, levels: int) -> np.ndarray:
    """Vectorized :func:`uniform_levels` (NaN entries become ABSENT)."""
    values = np.asarray(values, dtype=float)
    out = np.full(values.shape, ABSENT, dtype=np.int64)
    ok = ~np.isnan(values)
    if hi - lo <= 0:
        out[ok] = 1
        return out
    lvl = np.ceil((values[ok] - lo) / (hi - lo) * levels - 1e-9)
    out[ok] = np.clip(lvl, 1, levels).astype(np.int64)
    return out


@dataclass(frozen=True)
class LevelFiltration:
    """Birth levels in ``1..levels`` for the simplices of a filtered complex.

    Simplices missing from ``births`` are absent at every level.
    """

    levels: int
    births: Mapping[Simplex, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.levels < 1:
            raise ParameterError("levels must be >= 1")
        births = {simplex(s): int(b) for s, b in self.births.items()}
        for s, b in births.items():
            if not 1 <= b <= self.levels:
                raise ParameterError(f"birth {b} of {s} outside 1..{self.levels}")
            for f in facets(s):
                fb = births.get(f)
                if fb is None:
                    raise StructuralError(f"simplex {s} is present but its facet {f} is not")
                if fb > b:
                    raise StructuralError(f"facet {f} born at {fb} after coface {s} at {b}")
        object.__setattr__(self, "births", births)

    @property
    def simplices(self) -> list[Simplex]:
        return sort_simplices(self.births)

    @property
    def vertices(self) -> list[int]:
        return sorted(s[0] for s in self.births if len(s) == 1)

    def birth(self, s: Simplex) -> int:
        return self.births.get(s, ABSENT)

    def sublevel(self, level: int) -> frozenset[Simplex]:
        return frozenset(s for s, b in self.births.items() if b <= level)


def flag_births(edge_levels: np.ndarray, max_dim: int) -> tuple[list[Simplex], np.ndarray]:
    """Birth levels of every clique simplex on ``m`` vertices, up to ``max_dim``.

    ``edge_levels`` is a symmetric ``m x m`` integer matrix (ABSENT for missing
    edges).  Vertices are born at level 1 and a higher simplex at the largest
    level among its edges.  Returns the canonical simplex list and births.
    """
    edge_levels = np.asarray(edge_levels, dtype=np.int64)
    m = edge_levels.shape[0]
    simplices: list[Simplex] = [(v,) for v in range(m)]
    parts = [np.ones(m, dtype=np.int64)]
    for k in range(2, max_dim + 2):
        if k > m:
            break
        combos = np.array(list(combinations(range(m), k)), dtype=np.int64)
        b = np.full(len(combos), 1, dtype=np.int64)
        for i, j in combinations(range(k), 2):
            b = np.maximum(b, edge_levels[combos[:, i], combos[:, j]])
        simplices.extend(map(tuple, combos.tolist()))
        parts.append(b)
    return simplices, np.concatenate(parts)


def _filtration_from_arrays(simplices: Sequence[Simplex], births: np.ndarray, levels: int) -> LevelFiltration:
    return LevelFiltration(levels, {s: int(b) for s, b in zip(simplices, births) if b != ABSENT})


def graph_clique_filtration(
    vertices: Iterable[int],
    weights: Mapping[tuple[int, int], float],
    levels: int,
    max_dim: int = 2,
    weight_to_level: Callable[[float], int] | None = None,
) -> LevelFiltration:
    """Flag-complex filtration of a weighted graph, discretized to ``levels`` levels.

    Vertices are born at level 1, an edge at ``weight_to_level(weight)`` and a
    clique at the largest level among its edges.  The default rule bins the
    observed weights uniformly.
    """
    if levels < 1:
        raise ParameterError("levels must be >= 1")
    if max_dim < 1:
        raise ParameterError("max_dim must be >= 1")
    verts = sorted(set(int(v) for v in vertices))
    if weight_to_level is None:
        ws = list(weights.values())
        weight_to_level = uniform_levels(min(ws), max(ws), levels) if ws else uniform_levels(0, 0, levels)
    pos = {v: i for i, v in enumerate(verts)}
    el = np.full((len(verts), len(verts)), ABSENT, dtype=np.int64)
    for (u, v), w in weights.items():
        if u == v or u not in pos or v not in pos:
            raise ParameterError(f"edge ({u}, {v}) is a loop or has an unknown endpoint")
        lvl = int(weight_to_level(w))
        if not 1 <= lvl <= levels:
            raise ParameterError(f"weight rule returned level {lvl} outside 1..{levels}")
        el[pos[u], pos[v]] = el[pos[v], pos[u]] = lvl
    simplices, births = flag_births(el, max_dim)
    relabel = [tuple(verts[i] for i in s) for s in simplices]
    return _filtration_from_arrays(relabel, births, levels)


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def rips_level_filtration(
    points,
    levels: int,
    max_dim: int = 2,
    radius_to_level: Callable[[float], int] | None = None,
) -> LevelFiltration:
    """Vietoris-Rips filtration of a point cloud, discretized to ``levels`` levels.

    A simplex is born at the level of its diameter; point ``i`` is vertex ``i``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if len(pts) == 0:
        raise ParameterError("point list is empty")
    if levels < 1:
        raise ParameterError("levels must be >= 1")
    if max_dim < 1:
        raise ParameterError("max_dim must be >= 1")
    d = pairwise_distances(pts)
    n = len(pts)
    iu = np.triu_indices(n, 1)
    if radius_to_level is None:
        vals = d[iu]
        radius_to_level = uniform_levels(vals.min(), vals.max(), levels) if len(vals) else uniform_levels(0, 0, levels)
    el = np.full((n, n), ABSENT, dtype=np.int64)
    for i, j in zip(*iu):
        lvl = int(radius_to_level(float(d[i, j])))
        if not 1 <= lvl <= levels:
            raise ParameterError(f"radius rule returned level {lvl} outside 1..{levels}")
        el[i, j] = el[j, i] = lvl
    simplices, births = flag_births(el, max_dim)
    return _filtration_from_arrays(simplices, births, levels)
