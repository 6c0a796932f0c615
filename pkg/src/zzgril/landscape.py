"""Generalized ranks over worms and the Zz-Gril landscape.

The rank of a bi-filtration's homology over a worm equals the rank over its
boundary cap, which in turn is the number of bars of the cap's zigzag
filtration that cover every cap node.  One barcode answers every degree, so
ranks are cached per cap.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from zzgril._kernel import full_bar_counts
from zzgril.bifiltration import GridPoint, QuasiZigzagBifiltration
from zzgril.errors import ParameterError
from zzgril.worms import Staircase, Worm, cap_arrays, cap_ops
from zzgril.zigzag import compute_barcode, count_full_bars

DEFAULT_KS = (1, 2)
DEFAULT_DEGREES = (0, 1)


class RankCache:
    """Ranks per boundary cap for one bi-filtration, all degrees up to ``max_degree``."""

    def __init__(self, B: QuasiZigzagBifiltration, max_degree: int = 1, compiled: bool = True):
        self.B = B
        self.max_degree = max_degree
        self.compiled = compiled
        self._ranks: dict[tuple, tuple[int, ...]] = {}

    def ranks(self, region: Worm | Staircase) -> tuple[int, ...]:
        if isinstance(region, Worm):
            if (region.grid_width, region.levels) != (self.B.width, self.B.L):
                raise ParameterError("worm was built for a different grid")
            region = region.staircase
        for p in ((region.x0, region.lo[0]), (region.x1, region.hi[-1])):
            self.B._check(p)
        cap = tuple(region.boundary_cap())
        out = self._ranks.get(cap)
        if out is None:
            out = self._compute(list(cap))
            self._ranks[cap] = out
        return out

    def _compute(self, cap: list[GridPoint]) -> tuple[int, ...]:
        if self.compiled:
            kinds, sids, span, any_empty = cap_arrays(self.B, cap)
            if any_empty:
                return (0,) * (self.max_degree + 1)
            table, dims = self.B.facet_table
            return full_bar_counts(kinds, sids, table, dims, span, self.max_degree)
        ops, span, any_empty = cap_ops(self.B, cap)
        if any_empty:
            return (0,) * (self.max_degree + 1)
        bc = compute_barcode([(k, self.B.simplices[i]) for k, i in ops], self.max_degree)
        return tuple(count_full_bars(bc, span, p) for p in range(self.max_degree + 1))

    def rank(self, region: Worm | Staircase, degree: int) -> int:
        if not 0 <= degree <= self.max_degree:
            raise ParameterError(f"degree {degree} outside 0..{self.max_degree}")
        return self.ranks(region)[degree]


def interval_ranks(B: QuasiZigzagBifiltration, region: Worm | Staircase, max_degree: int = 1) -> tuple[int, ...]:
    """Generalized ranks over a worm or staircase interval in degrees ``0..max_degree``."""
    return RankCache(B, max_degree).ranks(region)


def generalized_rank(B: QuasiZigzagBifiltration, w: Worm | Staircase, degree: int) -> int:
    if degree < 0:
        raise ParameterError("degree must be non-negative")
    return RankCache(B, degree).rank(w, degree)


def delta_max(B: QuasiZigzagBifiltration) -> int:
    return max(B.width, B.L)


def zzgril_value(
    B: QuasiZigzagBifiltration,
    center: tuple[int, int],
    k: int,
    degree: int,
    cache: RankCache | None = None,
    max_width: int | None = None,
) -> int:
    """Largest worm width at ``center`` whose rank is at least ``k`` (0 if none).

    Ranks shrink as worms grow, so the qualifying widths form a prefix and a
    binary search finds its end.  ``max_width`` caps the search (defaults to
    the larger grid dimension).
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    if not B.contains(center):
        raise ParameterError(f"center {tuple(center)} outside the grid")
    if cache is None:
        cache = RankCache(B, max(degree, 1))
    top = delta_max(B) if max_width is None else max_width

    def ok(d: int) -> bool:
        return cache.rank(Worm.on(B, center, d), degree) >= k

    if top < 0 or not ok(0):
        return 0
    lo, hi = 0, top
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def sample_centers(
    width: int, height: int, rows: int | None = None, cols: int | None = None, count: int | None = None
) -> list[GridPoint]:
    """Uniform ``rows x cols`` lattice of centers on a ``width x height`` grid, row-major.

    Levels run ``1..height``.  With ``count`` the lattice is the squarest
    one holding at least that many points, truncated to ``count``.
    """
    if count is not None:
        if rows is not None or cols is not None:
            raise ParameterError("give either count or rows x cols")
        if count < 1:
            raise ParameterError("count must be positive")
        rows = int(np.ceil(np.sqrt(count)))
        cols = int(np.ceil(count / rows))
        if rows > height or cols > width:
            cols, rows = min(width, count), int(np.ceil(count / min(width, count)))
    rows = 6 if rows is None else rows
    cols = rows if cols is None else cols
    if rows < 1 or cols < 1:
        raise ParameterError("rows and cols must be positive")
    if rows > height or cols > width:
        raise ParameterError(f"{rows}x{cols} centers do not fit a {width}x{height} grid")
    xs = [(i + 1) * width // (cols + 1) for i in range(cols)]
    ys = [1 + (j + 1) * height // (rows + 1) for j in range(rows)]
    out = [GridPoint(x, y) for y in ys for x in xs]
    if count is not None:
        if count > width * height:
            raise ParameterError(f"{count} centers do not fit a {width}x{height} grid")
        out = out[:count]
    return out


@dataclass
class ZzGrilLandscape:
    """Values of the landscape at every (center, k, degree)."""

    centers: list[GridPoint]
    ks: list[int]
    degrees: list[int]
    values: dict[tuple[GridPoint, int, int], int] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)

    def value(self, center: tuple[int, int], k: int, degree: int) -> int:
        return self.values[GridPoint(*center), k, degree]

    def feature_vector(self) -> np.ndarray:
        """Values flattened by degree, then k, then center (row-major)."""
        return np.array(
            [self.values[c, k, p] for p in self.degrees for k in self.ks for c in self.centers], dtype=np.int64
        )

    def feature_names(self) -> list[str]:
        return [f"H{p}_k{k}_x{c.x}_y{c.y}" for p in self.degrees for k in self.ks for c in self.centers]

    def heatmap(self, k: int, degree: int) -> tuple[list[int], list[int], np.ndarray]:
        """Values over the center lattice as (xs, ys, array[len(ys), len(xs)]); gaps are -1."""
        xs = sorted({c.x for c in self.centers})
        ys = sorted({c.y for c in self.centers})
        out = np.full((len(ys), len(xs)), -1, dtype=np.int64)
        for c in self.centers:
            out[ys.index(c.y), xs.index(c.x)] = self.values[c, k, degree]
        return xs, ys, out

    def entries(self) -> list[dict[str, int]]:
        return [
            {"cx": c.x, "cy": c.y, "k": k, "degree": p, "lambda": self.values[c, k, p]}
            for p in self.degrees
            for k in self.ks
            for c in self.centers
        ]

    def to_json(self) -> dict[str, Any]:
        meta = dict(self.metadata)
        meta.update(ks=list(self.ks), degrees=list(self.degrees), centers=[list(c) for c in self.centers])
        return {"metadata": meta, "entries": self.entries()}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "ZzGrilLandscape":
        meta = dict(data["metadata"])
        centers = [GridPoint(*c) for c in meta.pop("centers")]
        ks, degrees = meta.pop("ks"), meta.pop("degrees")
        values = {(GridPoint(e["cx"], e["cy"]), e["k"], e["degree"]): e["lambda"] for e in data["entries"]}
        return cls(centers, ks, degrees, values, meta)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, ["cx", "cy", "k", "degree", "lambda"], lineterminator="\n")
        w.writeheader()
        w.writerows(self.entries())
        return buf.getvalue()


def config_hash(config: dict[str, Any]) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True, default=str).encode()).hexdigest()[:16]


def _center_values(B: QuasiZigzagBifiltration, center: GridPoint, ks: Sequence[int], degrees: Sequence[int]):
    cache = RankCache(B, max(max(degrees), 1))
    return {(center, k, p): zzgril_value(B, center, k, p, cache) for p in degrees for k in ks}


_WORKER_B: QuasiZigzagBifiltration | None = None


def _init_worker(B: QuasiZigzagBifiltration) -> None:
    global _WORKER_B
    _WORKER_B = B


def _worker(args):
    center, ks, degrees = args
    return _center_values(_WORKER_B, center, ks, degrees)


def landscape(
    B: QuasiZigzagBifiltration,
    centers: Iterable[tuple[int, int]],
    ks: Sequence[int] = DEFAULT_KS,
    degrees: Sequence[int] = DEFAULT_DEGREES,
    jobs: int = 1,
) -> ZzGrilLandscape:
    """Landscape values over the cross product of centers, ks and degrees.

    With ``jobs > 1`` centers are spread over worker processes; results are
    merged by key, so the output does not depend on scheduling.
    """
    centers = [GridPoint(*c) for c in centers]
    ks, degrees = [int(k) for k in ks], [int(p) for p in degrees]
    for c in centers:
        if not B.contains(c):
            raise ParameterError(f"center {tuple(c)} outside the grid")
    if any(k < 1 for k in ks):
        raise ParameterError("every k must be >= 1")
    if any(p < 0 for p in degrees):
        raise ParameterError("degrees must be non-negative")
    meta = {"T": B.T, "L": B.L, "width": B.width, "delta_max": delta_max(B)}
    meta["config_hash"] = config_hash({"ks": ks, "degrees": degrees, "centers": centers, **meta})
    values: dict[tuple[GridPoint, int, int], int] = {}
    if centers and ks and degrees:
        if jobs > 1 and len(centers) > 1:
            with ProcessPoolExecutor(min(jobs, len(centers)), initializer=_init_worker, initargs=(B,)) as ex:
                for part in ex.map(_worker, [(c, ks, degrees) for c in centers]):
                    values.update(part)
        else:
            for c in centers:
                values.update(_center_values(B, c, ks, degrees))
    return ZzGrilLandscape(centers, ks, degrees, values, meta)
