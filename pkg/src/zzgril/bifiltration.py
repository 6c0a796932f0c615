"""Quasi-zigzag bi-filtrations on a (2T-1) x L grid.

Column ``x`` of the grid holds a filtration along the scale axis ``y``
(levels ``1..L``).  Even columns are the input filtrations (time ``x // 2``);
odd columns are the unions of their two neighbours.  Only the even columns
are stored: a simplex is born in an odd column at the smaller of its births
in the adjacent even columns, which covers every way a simplex can appear on
a union arrow (earlier on the left, earlier on the right, or on one side only).

Poset order on grid points: ``(x, y) <= (x', y')`` iff ``y <= y'`` and either
``x == x'`` or ``x`` is even and ``|x - x'| == 1``.
"""

from __future__ import annotations

import json
from functools import cached_property
from typing import Any, NamedTuple, Sequence

import numpy as np

from zzgril.errors import ParameterError, StructuralError
from zzgril.simplicial import ABSENT, LevelFiltration, Simplex, facets, simplex, sort_simplices

FORMAT = "zzgril-bifiltration/1"


class GridPoint(NamedTuple):
    x: int
    y: int


def leq(p: tuple[int, int], q: tuple[int, int]) -> bool:
    """Quasi-zigzag order on grid points."""
    if p[1] > q[1]:
        return False
    return p[0] == q[0] or (p[0] % 2 == 0 and abs(p[0] - q[0]) == 1)


class QuasiZigzagBifiltration:
    """Births of every simplex in each of the ``T`` input filtrations.

    ``births[t, i]`` is the level at which ``simplices[i]`` enters the
    filtration at time ``t`` (ABSENT if never).
    """

    def __init__(self, simplices: Sequence[Simplex], births: np.ndarray, levels: int, *, validate: bool = True):
        births = np.asarray(births, dtype=np.int64)
        if births.ndim != 2 or births.shape[1] != len(simplices):
            raise ParameterError("births must have shape (T, number of simplices)")
        if births.shape[0] < 1:
            raise ParameterError("need at least one time step")
        if levels < 1:
            raise ParameterError("levels must be >= 1")
        simplices = [simplex(s) for s in simplices]
        order = sorted(range(len(simplices)), key=lambda i: (len(simplices[i]), simplices[i]))
        keep = [i for i in order if (births[:, i] != ABSENT).any()]
        self.simplices: list[Simplex] = [simplices[i] for i in keep]
        self.births = np.ascontiguousarray(births[:, keep])
        self.births.setflags(write=False)
        self.T = births.shape[0]
        self.L = int(levels)
        self.index = {s: i for i, s in enumerate(self.simplices)}
        if len(self.index) != len(self.simplices):
            raise ParameterError("duplicate simplices")
        if validate:
            self._validate()
        self._column_cache: dict[int, np.ndarray] = {}

    def _validate(self) -> None:
        b = self.births
        present = b != ABSENT
        if ((b < 1) & present).any() or ((b > self.L) & present).any():
            raise ParameterError(f"birth levels must lie in 1..{self.L}")
        for i, s in enumerate(self.simplices):
            for f in facets(s):
                j = self.index.get(f)
                if j is None:
                    raise StructuralError(f"simplex {s} is present but its facet {f} is never present")
                bad = np.flatnonzero(b[:, j] > b[:, i])
                if len(bad):
                    t = int(bad[0])
                    raise StructuralError(f"time {t}: facet {f} born after coface {s}")

    @property
    def width(self) -> int:
        return 2 * self.T - 1

    @property
    def height(self) -> int:
        return self.L

    @cached_property
    def vertices(self) -> list[int]:
        return [s[0] for s in self.simplices if len(s) == 1]

    @cached_property
    def facet_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Facet ids (-1 padded) and dimension of every simplex, for the compiled kernel."""
        from zzgril._kernel import facet_table

        return facet_table(self.simplices)

    def contains(self, p: tuple[int, int]) -> bool:
        return 0 <= p[0] < self.width and 1 <= p[1] <= self.L

    def _check(self, p: tuple[int, int]) -> None:
        if not self.contains(p):
            raise ParameterError(f"grid point {tuple(p)} outside [0, {self.width - 1}] x [1, {self.L}]")

    def column_births(self, x: int) -> np.ndarray:
        """Birth levels in column ``x``; odd columns are computed, never stored."""
        if not 0 <= x < self.width:
            raise ParameterError(f"column {x} outside [0, {self.width - 1}]")
        if x % 2 == 0:
            return self.births[x // 2]
        col = self._column_cache.get(x)
        if col is None:
            col = np.minimum(self.births[(x - 1) // 2], self.births[(x + 1) // 2])
            # bounded so derived columns never outweigh the stored ones
            if len(self._column_cache) >= self.T:
                self._column_cache.clear()
            self._column_cache[x] = col
        return col

    def mask(self, p: tuple[int, int]) -> np.ndarray:
        self._check(p)
        return self.column_births(p[0]) <= p[1]

    def complex_at(self, p: tuple[int, int]) -> frozenset[Simplex]:
        m = self.mask(p)
        return frozenset(self.simplices[i] for i in np.flatnonzero(m))

    def arrow_delta(self, frm: tuple[int, int], to: tuple[int, int]) -> tuple[list[Simplex], list[Simplex]]:
        """Simplices gained and lost on a single grid step, each face-before-coface."""
        self._check(frm)
        self._check(to)
        if abs(frm[0] - to[0]) + abs(frm[1] - to[1]) != 1:
            raise ParameterError(f"{tuple(frm)} and {tuple(to)} are not grid-adjacent")
        a, b = self.mask(frm), self.mask(to)
        inserted = [self.simplices[i] for i in np.flatnonzero(b & ~a)]
        deleted = [self.simplices[i] for i in np.flatnonzero(a & ~b)]
        return inserted, deleted

    def filtration(self, t: int) -> LevelFiltration:
        row = self.births[t]
        return LevelFiltration(self.L, {s: int(row[i]) for i, s in enumerate(self.simplices) if row[i] != ABSENT})

    def shifted(self, eps: int) -> "QuasiZigzagBifiltration":
        """Same data with every birth raised by ``eps`` levels on a grid of height ``L + eps``."""
        b = np.where(self.births == ABSENT, ABSENT, self.births + eps)
        return QuasiZigzagBifiltration(self.simplices, b, self.L + eps, validate=False)

    def padded(self, levels: int) -> "QuasiZigzagBifiltration":
        if levels < self.L:
            raise ParameterError("padding cannot reduce the number of levels")
        return QuasiZigzagBifiltration(self.simplices, self.births, levels, validate=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuasiZigzagBifiltration):
            return NotImplemented
        return (self.T, self.L, self.simplices) == (other.T, other.L, other.simplices) and np.array_equal(
            self.births, other.births
        )

    def __repr__(self) -> str:
        return f"QuasiZigzagBifiltration(T={self.T}, L={self.L}, simplices={len(self.simplices)})"

    def to_json(self, metadata: dict[str, Any] | None = None) -> dict[str, Any]:
        columns = []
        for t in range(self.T):
            row = self.births[t]
            columns.append([[list(s), int(row[i])] for i, s in enumerate(self.simplices) if row[i] != ABSENT])
        out: dict[str, Any] = {"format": FORMAT, "T": self.T, "L": self.L, "vertices": self.vertices, "columns": columns}
        if metadata is not None:
            out["metadata"] = metadata
        return out

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "QuasiZigzagBifiltration":
        try:
            if data.get("format") != FORMAT:
                raise StructuralError(f"unsupported bi-filtration format {data.get('format')!r}")
            T, L = int(data["T"]), int(data["L"])
            columns = data["columns"]
            if len(columns) != T:
                raise StructuralError(f"expected {T} columns, found {len(columns)}")
            filtrations = [LevelFiltration(L, {tuple(s): int(b) for s, b in col}) for col in columns]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParameterError):
                raise
            raise StructuralError(f"malformed bi-filtration JSON: {exc}") from exc
        return build(filtrations, vertices=data.get("vertices"))

    def dumps(self, metadata: dict[str, Any] | None = None) -> str:
        return json.dumps(self.to_json(metadata), separators=(",", ":"))


def build(filtrations: Sequence[LevelFiltration], vertices: Sequence[int] | None = None) -> QuasiZigzagBifiltration:
    """Assemble the bi-filtration of a sequence of level filtrations.

    All filtrations must share the number of levels and the vertex set.
    """
    if not filtrations:
        raise ParameterError("need at least one filtration")
    L = filtrations[0].levels
    if any(f.levels != L for f in filtrations):
        raise ParameterError("all filtrations must have the same number of levels")
    verts = set(filtrations[0].vertices)
    for t, f in enumerate(filtrations):
        if set(f.vertices) != verts:
            raise ParameterError(f"filtration {t} has a different vertex set")
    if vertices is not None and set(vertices) != verts:
        raise ParameterError("declared vertex list does not match the filtrations")
    universe = sort_simplices(set().union(*(f.births for f in filtrations)))
    births = np.full((len(filtrations), len(universe)), ABSENT, dtype=np.int64)
    for t, f in enumerate(filtrations):
        for i, s in enumerate(universe):
            b = f.births.get(s)
            if b is not None:
                births[t, i] = b
    return QuasiZigzagBifiltration(universe, births, L)
