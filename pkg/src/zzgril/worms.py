"""Worms, their extrema and boundary caps on the quasi-zigzag grid.

A worm of width ``d`` centred at ``p`` is the union of the three ``d``-squares
(Chebyshev balls) centred at ``p - (d, -d)``, ``p`` and ``p + (d, -d)``,
clipped to the grid.  Every column of a worm is a contiguous range of levels
and both the bottom and the top of those ranges are non-increasing from left
to right.  :class:`Staircase` captures exactly that shape; the boundary cap
and the zigzag filtration along it are defined for any such staircase.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from zzgril.bifiltration import GridPoint, QuasiZigzagBifiltration, leq
from zzgril.errors import ParameterError, StructuralError
from zzgril.zigzag import DELETE, INSERT, ZigzagFiltration


@dataclass(frozen=True)
class Staircase:
    """Columns ``x0 .. x0 + len(lo) - 1`` with levels ``lo[i] .. hi[i]``."""

    x0: int
    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.lo or len(self.lo) != len(self.hi):
            raise ParameterError("staircase needs matching, non-empty lo/hi columns")
        for i, (a, b) in enumerate(zip(self.lo, self.hi)):
            if a > b:
                raise ParameterError(f"column {self.x0 + i} is empty")
        for i in range(1, len(self.lo)):
            if self.lo[i] > self.lo[i - 1] or self.hi[i] > self.hi[i - 1]:
                raise ParameterError("staircase bounds must be non-increasing in x")
            if self.lo[i - 1] > self.hi[i]:
                raise ParameterError(f"columns {self.x0 + i - 1} and {self.x0 + i} do not overlap")

    @classmethod
    def from_points(cls, points) -> "Staircase":
        cols: dict[int, list[int]] = {}
        for x, y in points:
            cols.setdefault(x, []).append(y)
        xs = sorted(cols)
        if xs != list(range(xs[0], xs[-1] + 1)):
            raise ParameterError("point set has a gap between columns")
        lo, hi = [], []
        for x in xs:
            ys = sorted(cols[x])
            if ys != list(range(ys[0], ys[-1] + 1)):
                raise ParameterError(f"column {x} is not contiguous")
            lo.append(ys[0])
            hi.append(ys[-1])
        return cls(xs[0], tuple(lo), tuple(hi))

    @classmethod
    def rectangle(cls, x0: int, x1: int, y0: int, y1: int) -> "Staircase":
        n = x1 - x0 + 1
        return cls(x0, (y0,) * n, (y1,) * n)

    @property
    def x1(self) -> int:
        return self.x0 + len(self.lo) - 1

    def column(self, x: int) -> tuple[int, int] | None:
        i = x - self.x0
        if 0 <= i < len(self.lo):
            return self.lo[i], self.hi[i]
        return None

    def __contains__(self, p) -> bool:
        c = self.column(p[0])
        return c is not None and c[0] <= p[1] <= c[1]

    @cached_property
    def members(self) -> frozenset[GridPoint]:
        return frozenset(
            GridPoint(self.x0 + i, y) for i, (a, b) in enumerate(zip(self.lo, self.hi)) for y in range(a, b + 1)
        )

    def __len__(self) -> int:
        return sum(b - a + 1 for a, b in zip(self.lo, self.hi))

    def extrema(self) -> tuple[list[GridPoint], list[GridPoint]]:
        """Minimal and maximal points in the quasi-zigzag order, sorted by x."""
        minima, maxima = [], []
        for i, (a, b) in enumerate(zip(self.lo, self.hi)):
            x = self.x0 + i
            for y in range(a, b + 1):
                side = (x - 1, y) in self or (x + 1, y) in self
                if y == a and not (x % 2 == 1 and side):
                    minima.append(GridPoint(x, y))
                if y == b and not (x % 2 == 0 and side):
                    maxima.append(GridPoint(x, y))
        return minima, maxima

    def _walks(self) -> tuple[list[GridPoint], list[GridPoint]]:
        """Boundary walk omitting the left side, and the one omitting the right side."""
        lo, hi, x0 = self.lo, self.hi, self.x0
        n = len(lo)
        lower = [GridPoint(x0, lo[0])]
        for i in range(1, n):
            lower.append(GridPoint(x0 + i, lo[i - 1]))
            lower.extend(GridPoint(x0 + i, y) for y in range(lo[i - 1] - 1, lo[i] - 1, -1))
        right = [GridPoint(x0 + n - 1, y) for y in range(lo[-1] + 1, hi[-1] + 1)]
        upper = []
        for i in range(n - 2, -1, -1):
            upper.append(GridPoint(x0 + i, hi[i + 1]))
            upper.extend(GridPoint(x0 + i, y) for y in range(hi[i + 1] + 1, hi[i] + 1))
        left = [GridPoint(x0, y) for y in range(lo[0] + 1, hi[0] + 1)]
        omit_left = lower + right + upper
        top_right = [GridPoint(x0 + n - 1, hi[-1])]
        omit_right = _dedup(lower[::-1] + left + upper[::-1] + top_right)
        return _dedup(omit_left), omit_right

    def boundary_cap(self) -> list[GridPoint]:
        return list(_boundary_cap(self))

    def _cap(self) -> tuple[GridPoint, ...]:
        """Simple boundary path through every minimum and maximum.

        Walks the bottom edge left to right, climbs the right edge and returns
        along the top edge, trimmed to the stretch between the first extremum
        and the point where the last one is reached.  When that walk folds
        back on itself (worms one cell thick at the right end) the mirrored
        walk, which keeps the left edge instead, is used.
        """
        minima, maxima = self.extrema()
        targets = set(minima) | set(maxima)
        walks = self._walks()
        for walk in walks:
            path = _trim(walk, targets)
            if len(set(path)) == len(path):
                return tuple(path)
        # thin at both ends: skip revisited points, which leaves steps between
        # comparable (not necessarily adjacent) points
        for walk in walks:
            path = _trim(walk, targets)
            for short in (_first_visits(path), _first_visits(path[::-1])[::-1]):
                if all(leq(a, b) or leq(b, a) for a, b in zip(short, short[1:])):
                    return tuple(short)
        raise StructuralError(f"no boundary cap for {self}")


def _dedup(walk: list[GridPoint]) -> list[GridPoint]:
    out: list[GridPoint] = []
    for p in walk:
        if not out or out[-1] != p:
            out.append(p)
    return out


@lru_cache(maxsize=1 << 16)
def _boundary_cap(st: Staircase) -> tuple[GridPoint, ...]:
    return st._cap()


def _first_visits(path: list[GridPoint]) -> list[GridPoint]:
    seen: set[GridPoint] = set()
    out = []
    for p in path:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def _trim(walk: list[GridPoint], targets: set[GridPoint]) -> list[GridPoint]:
    start = next(i for i, p in enumerate(walk) if p in targets)
    seen: set[GridPoint] = set()
    for j in range(start, len(walk)):
        if walk[j] in targets:
            seen.add(walk[j])
            if len(seen) == len(targets):
                return walk[start:j + 1]
    raise StructuralError("boundary walk misses an extremum")


@dataclass(frozen=True)
class Worm:
    """Worm centred at ``center`` with width ``width`` on a ``grid_width x levels`` grid."""

    center: GridPoint
    width: int
    grid_width: int
    levels: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", GridPoint(*self.center))
        if self.width < 0:
            raise ParameterError("worm width must be non-negative")
        x, y = self.center
        if not (0 <= x < self.grid_width and 1 <= y <= self.levels):
            raise ParameterError(f"center {tuple(self.center)} outside the grid")

    @classmethod
    def on(cls, B: QuasiZigzagBifiltration, center, width: int) -> "Worm":
        return cls(GridPoint(*center), width, B.width, B.L)

    @cached_property
    def staircase(self) -> Staircase:
        px, py = self.center
        d = self.width
        xs = range(max(0, px - 2 * d), min(self.grid_width - 1, px + 2 * d) + 1)
        lo, hi = [], []
        for x in xs:
            # union of the three squares restricted to this column
            a, b = None, None
            for cx, cy in ((px - d, py + d), (px, py), (px + d, py - d)):
                if abs(x - cx) <= d:
                    a = cy - d if a is None else min(a, cy - d)
                    b = cy + d if b is None else max(b, cy + d)
            lo.append(max(a, 1))
            hi.append(min(b, self.levels))
        return Staircase(xs[0], tuple(lo), tuple(hi))

    @property
    def clipped(self) -> bool:
        px, py = self.center
        d = self.width
        return px - 2 * d < 0 or px + 2 * d > self.grid_width - 1 or py - 2 * d < 1 or py + 2 * d > self.levels

    def members(self) -> frozenset[GridPoint]:
        return self.staircase.members

    def extrema(self) -> tuple[list[GridPoint], list[GridPoint]]:
        return self.staircase.extrema()

    def boundary_cap(self) -> list[GridPoint]:
        return self.staircase.boundary_cap()


def members(w: Worm) -> frozenset[GridPoint]:
    return w.members()


def extrema(w: Worm | Staircase) -> tuple[list[GridPoint], list[GridPoint]]:
    return w.extrema()


def boundary_cap(w: Worm | Staircase) -> list[GridPoint]:
    return w.boundary_cap()


def max_interior_width(center, grid_width: int, levels: int) -> int:
    """Largest width whose worm at ``center`` fits in the grid without clipping (-1 if none)."""
    x, y = center
    return min(x, grid_width - 1 - x, y - 1, levels - y) // 2


def cap_arrays(B: QuasiZigzagBifiltration, cap: list[GridPoint]) -> tuple[np.ndarray, np.ndarray, tuple[int, int], bool]:
    """Zigzag ops along ``cap`` as (kinds, simplex ids, span, any_empty).

    ``kinds`` is 1 for an insertion and 0 for a deletion.  Each step deletes
    in descending simplex order and then inserts in ascending order, so faces
    always precede cofaces.  ``any_empty`` flags a cap point whose complex is
    empty (the rank over the cap is then zero).
    """
    from zzgril._kernel import cap_zigzag

    for p in cap:
        B._check(p)
    xs = np.fromiter((p[0] for p in cap), dtype=np.int64, count=len(cap))
    ys = np.fromiter((p[1] for p in cap), dtype=np.int64, count=len(cap))
    kinds, sids, n_first, n_middle, any_empty = cap_zigzag(B.births, xs, ys)
    return kinds, sids, (n_first, n_first + n_middle), bool(any_empty)


def cap_ops(B: QuasiZigzagBifiltration, cap: list[GridPoint]) -> tuple[list[tuple[str, int]], tuple[int, int], bool]:
    """Zigzag ops along ``cap`` as (kind, simplex index) pairs; see :func:`cap_arrays`."""
    kinds, sids, span, any_empty = cap_arrays(B, cap)
    ops = [(INSERT if k else DELETE, int(i)) for k, i in zip(kinds.tolist(), sids.tolist())]
    return ops, span, any_empty


def cap_filtration(B: QuasiZigzagBifiltration, cap: list[GridPoint]) -> tuple[ZigzagFiltration, tuple[int, int]]:
    """Closed zigzag filtration along ``cap`` and the node span of the cap complexes."""
    if not cap:
        raise ParameterError("empty cap")
    for p, q in zip(cap, cap[1:]):
        if not (leq(p, q) or leq(q, p)) or p == q:
            raise ParameterError(f"cap points {tuple(p)} and {tuple(q)} are not distinct comparable points")
    ops, span, _ = cap_ops(B, cap)
    return ZigzagFiltration((k, B.simplices[i]) for k, i in ops), span
