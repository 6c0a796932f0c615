"""Barcodes of simplexwise zigzag filtrations over F2.

The filtration is first closed (torn down to the empty complex), then its
insertions and deletions are regrouped into an up-down filtration in which
each re-insertion of a simplex is a separate copy.  The up-down filtration is
turned into an ordinary filtration by coning: a cone apex comes first, then
every copy, then the cones over the deleted copies in reverse deletion order.
With the apex as the oldest vertex the filtration computes reduced homology,
so the apex carries the only essential class and every other persistence pair
maps back to a zigzag interval through the arrows that created and killed it.

Interval convention: node ``i`` (1-based) is the complex after op ``i``, and
a bar ``(b, d)`` is the closed interval of nodes ``b..d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from zzgril.errors import ParameterError, StructuralError
from zzgril.simplicial import Simplex, canonical_key, facets, simplex

INSERT = "insert"
DELETE = "delete"


@dataclass(frozen=True)
class ZigzagFiltration:
    """Sequence of simplex insertions and deletions starting from the empty complex."""

    ops: tuple[tuple[str, Simplex], ...]

    def __init__(self, ops: Iterable[tuple[str, Iterable[int]]]):
        norm = []
        for kind, s in ops:
            if kind not in (INSERT, DELETE):
                raise ParameterError(f"unknown op kind {kind!r}")
            norm.append((kind, simplex(s)))
        object.__setattr__(self, "ops", tuple(norm))

    def __len__(self) -> int:
        return len(self.ops)

    def states(self) -> list[frozenset[Simplex]]:
        """Complexes after each op (index 0 is the state after op 1)."""
        cur: set[Simplex] = set()
        out = []
        for kind, s in self.ops:
            if kind == INSERT:
                cur.add(s)
            else:
                cur.discard(s)
            out.append(frozenset(cur))
        return out

    def is_closed(self) -> bool:
        return not self.states()[-1] if self.ops else True


@dataclass(frozen=True)
class Barcode:
    """Zigzag intervals per homology degree over nodes ``1..n_nodes``."""

    n_nodes: int
    bars: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    def degree(self, p: int) -> list[tuple[int, int]]:
        return self.bars.get(p, [])

    def coverage(self, node: int, p: int) -> int:
        return sum(1 for b, d in self.degree(p) if b <= node <= d)

    def as_list(self) -> list[tuple[int, int, int]]:
        return [(p, b, d) for p in sorted(self.bars) for b, d in self.bars[p]]


def _reduce(columns: list[int], dims: list[int]) -> tuple[list[tuple[int, int]], list[int]]:
    """Standard column reduction with clearing.

    Returns (pairs (creator, killer), essential creators).
    """
    n = len(columns)
    by_dim: dict[int, list[int]] = {}
    for j, d in enumerate(dims):
        by_dim.setdefault(d, []).append(j)
    killer_of_low: dict[int, int] = {}
    reduced: dict[int, int] = {}
    cleared: set[int] = set()
    for d in sorted(by_dim, reverse=True):
        if d == 0:
            continue
        for j in by_dim[d]:
            if j in cleared:
                continue
            col = columns[j]
            while col:
                low = col.bit_length() - 1
                k = killer_of_low.get(low)
                if k is None:
                    break
                col ^= reduced[k]
            if col:
                low = col.bit_length() - 1
                killer_of_low[low] = j
                reduced[j] = col
                cleared.add(low)
    pairs = sorted((low, j) for low, j in killer_of_low.items())
    paired = set(killer_of_low) | set(killer_of_low.values())
    essential = [j for j in range(n) if j not in paired]
    return pairs, essential


def compute_barcode(f: ZigzagFiltration | Sequence[tuple[str, Simplex]], max_degree: int = 1) -> Barcode:
    """Interval decomposition of the homology of ``f`` in degrees ``0..max_degree``."""
    ops = f.ops if isinstance(f, ZigzagFiltration) else tuple(f)
    if max_degree < 0:
        raise ParameterError("max_degree must be non-negative")
    n_nodes = len(ops)

    alive: dict[Simplex, int] = {}
    coface_count: dict[Simplex, int] = {}
    copy_dim: list[int] = []
    copy_faces: list[list[int]] = []
    ins_pos: list[int] = []
    del_pos: dict[int, int] = {}
    deletions: list[int] = []

    def insert(pos: int, s: Simplex) -> None:
        if s in alive:
            raise StructuralError(f"op {pos}: insert of present simplex {s}")
        fs = facets(s)
        try:
            faces = [alive[t] for t in fs]
        except KeyError:
            missing = next(t for t in fs if t not in alive)
            raise StructuralError(f"op {pos}: insert of {s} before its facet {missing}") from None
        for t in fs:
            coface_count[t] = coface_count.get(t, 0) + 1
        alive[s] = len(copy_dim)
        copy_dim.append(len(s) - 1)
        copy_faces.append(faces)
        ins_pos.append(pos)

    def delete(pos: int, s: Simplex) -> None:
        c = alive.get(s)
        if c is None:
            raise StructuralError(f"op {pos}: delete of absent simplex {s}")
        if coface_count.get(s, 0):
            raise StructuralError(f"op {pos}: delete of {s} while a coface is present")
        for t in facets(s):
            coface_count[t] -= 1
        del alive[s]
        del_pos[c] = pos
        deletions.append(c)

    for pos, (kind, s) in enumerate(ops, start=1):
        if kind == INSERT:
            insert(pos, s)
        elif kind == DELETE:
            delete(pos, s)
        else:
            raise StructuralError(f"op {pos}: unknown kind {kind!r}")
    # close the filtration; bars are clipped back to the original nodes below
    pos = n_nodes
    for s in sorted(alive, key=canonical_key, reverse=True):
        pos += 1
        delete(pos, s)

    # column layout: apex first (so it is the elder of every component),
    # then the copies in insertion order, then the cones in reverse deletion order
    n = len(copy_dim)
    cone_index = {c: 2 * n - j for j, c in enumerate(deletions)}
    columns = [0] * (2 * n + 1)
    dims = [0] * (2 * n + 1)
    for c in range(n):
        col = 0
        for t in copy_faces[c]:
            col |= 1 << (t + 1)
        columns[c + 1] = col
        dims[c + 1] = copy_dim[c]
        cone = 1 << (c + 1)
        if copy_faces[c]:
            for t in copy_faces[c]:
                cone |= 1 << cone_index[t]
        else:
            cone |= 1
        columns[cone_index[c]] = cone
        dims[cone_index[c]] = copy_dim[c] + 1
    copy_of_cone = {v: c for c, v in cone_index.items()}

    pairs, essential = _reduce(columns, dims)
    if essential != [0]:
        raise StructuralError(f"internal: unexpected essential classes {essential}")

    bars: dict[int, list[tuple[int, int]]] = {}

    def emit(p: int, create: int, kill: int) -> None:
        if not 0 <= p <= max_degree:
            return
        b, d = create, kill - 1
        if b > d:
            raise StructuralError(f"internal: empty interval from arrows {create}, {kill}")
        if b > n_nodes:
            return
        bars.setdefault(p, []).append((b, min(d, n_nodes)))

    for i, j in pairs:
        if j <= n:
            emit(copy_dim[i - 1], ins_pos[i - 1], ins_pos[j - 1])
        elif i <= n:
            ci, dj = i - 1, del_pos[copy_of_cone[j]]
            if ins_pos[ci] < dj:
                emit(copy_dim[ci], ins_pos[ci], dj)
            else:
                # the deletion came first in the original order: a class born
                # on the deletion dies on the insertion, one degree lower
                emit(copy_dim[ci] - 1, dj, ins_pos[ci])
        else:
            ci, cj = copy_of_cone[i], copy_of_cone[j]
            emit(copy_dim[ci], del_pos[cj], del_pos[ci])

    for p in bars:
        bars[p].sort()
    return Barcode(n_nodes, dict(sorted(bars.items())))


def count_full_bars(bc: Barcode, span: tuple[int, int], degree: int) -> int:
    """Number of degree-``degree`` bars covering every node of ``span``."""
    lo, hi = span
    if not 1 <= lo <= hi <= bc.n_nodes:
        raise ParameterError(f"span {span} outside 1..{bc.n_nodes}")
    return sum(1 for b, d in bc.degree(degree) if b <= lo and d >= hi)
