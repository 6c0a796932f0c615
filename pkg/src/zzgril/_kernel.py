"""Compiled zigzag barcode kernel for filtrations given as integer arrays.

Same construction as :func:`zzgril.zigzag.compute_barcode` (apex, copies,
cones in reverse deletion order, reduction with clearing), but the whole loop
runs under numba on index arrays.  Inputs are trusted:
callers must pass legal filtrations.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _insertion_sort_desc(buf, k):
    for a in range(1, k):
        v = buf[a]
        b = a - 1
        while b >= 0 and buf[b] < v:
            buf[b + 1] = buf[b]
            b -= 1
        buf[b + 1] = v


@njit(cache=True)
def zigzag_bars(kinds, sids, facets, sdims, n_simplices):
    """Bars (degree, birth, death) of the zigzag ``(kinds[i], sids[i])``, closed internally.

    ``kinds`` is 1 for insertion and 0 for deletion; ``sids`` index rows of
    ``facets`` (facet simplex ids, -1 padded) and ``sdims``.  Simplex ids must
    be in canonical order so that descending ids tear down cofaces first.
    Columns are descending index lists; reduced columns live in one arena.
    """
    n_ops = len(kinds)
    n_ins = 0
    for i in range(n_ops):
        if kinds[i] == 1:
            n_ins += 1
    width = facets.shape[1]
    alive = np.full(n_simplices, -1, dtype=np.int64)
    copy_dim = np.empty(n_ins, dtype=np.int64)
    copy_faces = np.full((n_ins, width), -1, dtype=np.int64)
    ins_pos = np.empty(n_ins, dtype=np.int64)
    del_pos = np.full(n_ins, -1, dtype=np.int64)
    deletions = np.empty(n_ins, dtype=np.int64)
    nc = 0
    nd = 0
    for i in range(n_ops):
        s = sids[i]
        if kinds[i] == 1:
            alive[s] = nc
            copy_dim[nc] = sdims[s]
            ins_pos[nc] = i + 1
            for q in range(width):
                f = facets[s, q]
                if f >= 0:
                    copy_faces[nc, q] = alive[f]
            nc += 1
        else:
            c = alive[s]
            alive[s] = -1
            del_pos[c] = i + 1
            deletions[nd] = c
            nd += 1
    pos = n_ops
    for s in range(n_simplices - 1, -1, -1):
        c = alive[s]
        if c >= 0:
            pos += 1
            alive[s] = -1
            del_pos[c] = pos
            deletions[nd] = c
            nd += 1

    n = nc
    total = 2 * n + 1
    cone_index = np.empty(n, dtype=np.int64)
    copy_of = np.full(total, -1, dtype=np.int64)
    dims = np.zeros(total, dtype=np.int64)
    for j in range(n):
        ci = 2 * n - j
        cone_index[deletions[j]] = ci
        copy_of[ci] = deletions[j]
    for c in range(n):
        dims[c + 1] = copy_dim[c]
        dims[cone_index[c]] = copy_dim[c] + 1

    pivot = np.full(total, -1, dtype=np.int64)
    cleared = np.zeros(total, dtype=np.bool_)
    rstart = np.zeros(total, dtype=np.int64)
    rlen = np.zeros(total, dtype=np.int64)
    arena = np.empty(max(16, 4 * total), dtype=np.int64)
    used = 0
    work = np.empty(total + width + 2, dtype=np.int64)
    other = np.empty(total + width + 2, dtype=np.int64)
    max_dim = 0
    for j in range(total):
        if dims[j] > max_dim:
            max_dim = dims[j]
    for d in range(max_dim, 0, -1):
        for j in range(total):
            if dims[j] != d or cleared[j]:
                continue
            # boundary of column j
            k = 0
            if j <= n:
                c = j - 1
                for q in range(width):
                    t = copy_faces[c, q]
                    if t >= 0:
                        work[k] = t + 1
                        k += 1
                _insertion_sort_desc(work, k)
            else:
                c = copy_of[j]
                for q in range(width):
                    t = copy_faces[c, q]
                    if t >= 0:
                        work[k] = cone_index[t]
                        k += 1
                _insertion_sort_desc(work, k)
                work[k] = c + 1
                k += 1
                if k == 1:
                    work[k] = 0
                    k += 1
            while k > 0:
                piv = pivot[work[0]]
                if piv < 0:
                    break
                a0 = rstart[piv]
                la = rlen[piv]
                i1 = 0
                i2 = 0
                m = 0
                while i1 < k and i2 < la:
                    x = work[i1]
                    y = arena[a0 + i2]
                    if x == y:
                        i1 += 1
                        i2 += 1
                    elif x > y:
                        other[m] = x
                        m += 1
                        i1 += 1
                    else:
                        other[m] = y
                        m += 1
                        i2 += 1
                while i1 < k:
                    other[m] = work[i1]
                    m += 1
                    i1 += 1
                while i2 < la:
                    other[m] = arena[a0 + i2]
                    m += 1
                    i2 += 1
                work, other = other, work
                k = m
            if k > 0:
                if used + k > len(arena):
                    grown = np.empty(2 * len(arena) + k, dtype=np.int64)
                    grown[:used] = arena[:used]
                    arena = grown
                arena[used:used + k] = work[:k]
                rstart[j] = used
                rlen[j] = k
                used += k
                pivot[work[0]] = j
                cleared[work[0]] = True

    out = np.empty((total, 3), dtype=np.int64)
    m = 0
    for i in range(total):
        j = pivot[i]
        if j < 0:
            continue
        if j <= n:
            p, b, e = copy_dim[i - 1], ins_pos[i - 1], ins_pos[j - 1]
        elif i <= n:
            dj = del_pos[copy_of[j]]
            if ins_pos[i - 1] < dj:
                p, b, e = copy_dim[i - 1], ins_pos[i - 1], dj
            else:
                p, b, e = copy_dim[i - 1] - 1, dj, ins_pos[i - 1]
        else:
            p, b, e = copy_dim[copy_of[i]], del_pos[copy_of[j]], del_pos[copy_of[i]]
        if b > n_ops:
            continue
        out[m, 0] = p
        out[m, 1] = b
        out[m, 2] = min(e - 1, n_ops)
        m += 1
    return out[:m]


@njit(cache=True)
def _presence(births, xs, ys):
    n_simplices = births.shape[1]
    m = len(xs)
    out = np.empty((m, n_simplices), dtype=np.bool_)
    for i in range(m):
        x, y = xs[i], ys[i]
        if x % 2 == 0:
            row = births[x // 2]
            for s in range(n_simplices):
                out[i, s] = row[s] <= y
        else:
            a = births[(x - 1) // 2]
            b = births[(x + 1) // 2]
            for s in range(n_simplices):
                out[i, s] = a[s] <= y or b[s] <= y
    return out


@njit(cache=True)
def cap_zigzag(births, xs, ys):
    """Ops along the grid points ``(xs[i], ys[i])`` of a bi-filtration with stored ``births``.

    Returns (kinds, sids, n_first, n_middle, any_empty): the first complex is
    inserted, each step deletes (descending ids) then inserts (ascending), and
    the last complex is torn down.
    """
    n_simplices = births.shape[1]
    m = len(xs)
    P = _presence(births, xs, ys)
    count = 0
    any_empty = False
    for i in range(m):
        nonempty = False
        for s in range(n_simplices):
            if P[i, s]:
                nonempty = True
                if i == 0 or not P[i - 1, s]:
                    count += 1
            elif i > 0 and P[i - 1, s]:
                count += 1
        if not nonempty:
            any_empty = True
    for s in range(n_simplices):
        if P[m - 1, s]:
            count += 1
    kinds = np.empty(count, dtype=np.int8)
    sids = np.empty(count, dtype=np.int64)
    k = 0
    for s in range(n_simplices):
        if P[0, s]:
            kinds[k] = 1
            sids[k] = s
            k += 1
    n_first = k
    for i in range(1, m):
        for s in range(n_simplices - 1, -1, -1):
            if P[i - 1, s] and not P[i, s]:
                kinds[k] = 0
                sids[k] = s
                k += 1
        for s in range(n_simplices):
            if P[i, s] and not P[i - 1, s]:
                kinds[k] = 1
                sids[k] = s
                k += 1
    n_middle = k - n_first
    for s in range(n_simplices - 1, -1, -1):
        if P[m - 1, s]:
            kinds[k] = 0
            sids[k] = s
            k += 1
    return kinds, sids, n_first, n_middle, any_empty


def facet_table(simplices) -> tuple[np.ndarray, np.ndarray]:
    """Facet ids (-1 padded) and dimensions for a canonically ordered simplex list."""
    index = {s: i for i, s in enumerate(simplices)}
    width = max((len(s) for s in simplices), default=1)
    table = np.full((len(simplices), width), -1, dtype=np.int64)
    dims = np.empty(len(simplices), dtype=np.int64)
    for i, s in enumerate(simplices):
        dims[i] = len(s) - 1
        if len(s) > 1:
            for q in range(len(s)):
                table[i, q] = index[s[:q] + s[q + 1:]]
    return table, dims


def full_bar_counts(kinds, sids, table, dims, span, max_degree: int) -> tuple[int, ...]:
    """Number of bars in each degree covering every node of ``span``."""
    bars = zigzag_bars(np.asarray(kinds, dtype=np.int8), np.asarray(sids, dtype=np.int64), table, dims, len(dims))
    lo, hi = span
    full = bars[(bars[:, 1] <= lo) & (bars[:, 2] >= hi)]
    return tuple(int((full[:, 0] == p).sum()) for p in range(max_degree + 1))
