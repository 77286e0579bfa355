"""Numba-jitted inner loops for the topology engine.

Everything here is deterministic and single-threaded; callers rely on
bit-reproducible results. Grids are C-contiguous (z, y, x) arrays.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Scan-order-prior neighbour offsets: a voxel is unioned only with already
# visited neighbours, which makes first-encounter labelling deterministic.
_OFFS_26 = np.array(
    [
        (dz, dy, dx)
        for dz in (-1, 0)
        for dy in (-1, 0, 1)
        for dx in (-1, 0, 1)
        if (dz, dy, dx) < (0, 0, 0)
    ],
    dtype=np.int64,
)
_OFFS_6 = np.array([(-1, 0, 0), (0, -1, 0), (0, 0, -1)], dtype=np.int64)


@njit(cache=True)
def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@njit(cache=True)
def label_components(mask, offs):
    """Union-find connected-component labelling.

    Returns (count, labels) with labels assigned 1..count in the order the
    components are first met in (z, y, x) scan order.
    """
    d, h, w = mask.shape
    n = d * h * w
    parent = np.arange(n, dtype=np.int64)
    for z in range(d):
        for y in range(h):
            for x in range(w):
                if mask[z, y, x] == 0:
                    continue
                idx = (z * h + y) * w + x
                for k in range(offs.shape[0]):
                    nz = z + offs[k, 0]
                    ny = y + offs[k, 1]
                    nx = x + offs[k, 2]
                    if nz < 0 or ny < 0 or nx < 0 or ny >= h or nx >= w:
                        continue
                    if mask[nz, ny, nx] == 0:
                        continue
                    nidx = (nz * h + ny) * w + nx
                    ra = _find(parent, idx)
                    rb = _find(parent, nidx)
                    if ra != rb:
                        if ra < rb:
                            parent[rb] = ra
                        else:
                            parent[ra] = rb
    labels = np.zeros((d, h, w), dtype=np.int32)
    root_label = np.zeros(n, dtype=np.int32)
    count = 0
    for z in range(d):
        for y in range(h):
            for x in range(w):
                if mask[z, y, x] == 0:
                    continue
                idx = (z * h + y) * w + x
                r = _find(parent, idx)
                if root_label[r] == 0:
                    count += 1
                    root_label[r] = count
                labels[z, y, x] = root_label[r]
    return count, labels


@njit(cache=True)
def component_argmax(labels, p, count):
    """Per component, the scan-order-first voxel maximising p.

    Returns a flat voxel index per label (1..count).
    """
    d, h, w = labels.shape
    best = np.full(count, -1, dtype=np.int64)
    bestp = np.full(count, -np.inf, dtype=np.float64)
    for z in range(d):
        for y in range(h):
            for x in range(w):
                l = labels[z, y, x]
                if l > 0 and p[z, y, x] > bestp[l - 1]:
                    bestp[l - 1] = p[z, y, x]
                    best[l - 1] = (z * h + y) * w + x
    return best


@njit(cache=True)
def build_cells(g):
    """Cell values and anchor voxels of the doubled-grid cubical complex.

    Cell (a, b, c) of the (2d+1, 2h+1, 2w+1) grid has dimension equal to the
    number of odd coordinates; its filtration value is the minimum of g over
    incident voxels and its anchor is the lexicographically first minimiser.
    Each voxel's 27 incident cells are exactly the doubled-grid neighbours of
    its own cube cell, so one scan-order pass with strict-less updates leaves
    the lex-first minimiser in place.
    """
    d, h, w = g.shape
    h2, w2 = 2 * h + 1, 2 * w + 1
    s_z, s_y = h2 * w2, w2
    m = (2 * d + 1) * s_z
    value = np.full(m, np.inf, dtype=np.float64)
    anchor = np.full(m, -1, dtype=np.int64)
    for z in range(d):
        for y in range(h):
            base = ((2 * z + 1) * h2 + (2 * y + 1)) * w2 + 1
            vox_base = (z * h + y) * w
            for x in range(w):
                gv = g[z, y, x]
                vox = vox_base + x
                cid0 = base + 2 * x
                for dz in range(-1, 2):
                    row = cid0 + dz * s_z - s_y - 1
                    for _dy in range(3):
                        for dx in range(3):
                            cid = row + dx
                            if gv < value[cid]:
                                value[cid] = gv
                                anchor[cid] = vox
                        row += s_y
    return value, anchor


@njit(cache=True)
def reduce_boundary(cols_init, n_rows):
    """Left-to-right reduction of a boundary matrix over Z/2.

    cols_init holds each column's boundary row indices (-1 padded), columns
    already in filtration order. Returns the pivot row per column (-1 for
    columns that reduce to zero).
    """
    n_cols = cols_init.shape[0]
    width = cols_init.shape[1]
    owner = np.full(n_rows, -1, dtype=np.int64)
    pivot_of = np.full(n_cols, -1, dtype=np.int64)
    pool = np.empty(8 * n_cols + 16, dtype=np.int64)
    pool_len = 0
    start = np.zeros(n_cols, dtype=np.int64)
    length = np.zeros(n_cols, dtype=np.int64)
    buf_a = np.empty(1024, dtype=np.int64)
    buf_b = np.empty(1024, dtype=np.int64)
    for j in range(n_cols):
        m = 0
        for t in range(width):
            if cols_init[j, t] >= 0:
                buf_a[m] = cols_init[j, t]
                m += 1
        for t in range(1, m):  # insertion sort, m <= 6
            v = buf_a[t]
            u = t - 1
            while u >= 0 and buf_a[u] > v:
                buf_a[u + 1] = buf_a[u]
                u -= 1
            buf_a[u + 1] = v
        use_a = True
        while m > 0:
            cur = buf_a if use_a else buf_b
            piv = cur[m - 1]
            k = owner[piv]
            if k < 0:
                owner[piv] = j
                pivot_of[j] = piv
                if pool_len + m > pool.shape[0]:
                    grown = np.empty(
                        max(2 * pool.shape[0], pool_len + m), dtype=np.int64
                    )
                    grown[:pool_len] = pool[:pool_len]
                    pool = grown
                start[j] = pool_len
                length[j] = m
                for t in range(m):
                    pool[pool_len + t] = cur[t]
                pool_len += m
                break
            ks = start[k]
            kn = length[k]
            need = m + kn
            if use_a:
                if buf_b.shape[0] < need:
                    buf_b = np.empty(2 * need, dtype=np.int64)
                out = buf_b
            else:
                if buf_a.shape[0] < need:
                    buf_a = np.empty(2 * need, dtype=np.int64)
                out = buf_a
            i1 = 0
            i2 = 0
            o = 0
            while i1 < m and i2 < kn:  # symmetric difference of sorted lists
                v1 = cur[i1]
                v2 = pool[ks + i2]
                if v1 == v2:
                    i1 += 1
                    i2 += 1
                elif v1 < v2:
                    out[o] = v1
                    o += 1
                    i1 += 1
                else:
                    out[o] = v2
                    o += 1
                    i2 += 1
            while i1 < m:
                out[o] = cur[i1]
                o += 1
                i1 += 1
            while i2 < kn:
                out[o] = pool[ks + i2]
                o += 1
                i2 += 1
            m = o
            use_a = not use_a
    return pivot_of


@njit(cache=True)
def merge_tree_pairs(edge_u, edge_v, n_verts):
    """Elder-rule union-find over vertex ranks, edges in filtration order.

    Returns, per edge, the rank of the vertex whose component dies there
    (-1 for cycle-creating edges), plus a mask of surviving roots.
    """
    parent = np.arange(n_verts, dtype=np.int64)
    died = np.full(edge_u.shape[0], -1, dtype=np.int64)
    for i in range(edge_u.shape[0]):
        ru = _find(parent, edge_u[i])
        rv = _find(parent, edge_v[i])
        if ru == rv:
            continue
        if ru < rv:
            elder, younger = ru, rv
        else:
            elder, younger = rv, ru
        parent[younger] = elder
        died[i] = younger
    root = np.zeros(n_verts, dtype=np.uint8)
    for v in range(n_verts):
        if _find(parent, v) == v:
            root[v] = 1
    return died, root
