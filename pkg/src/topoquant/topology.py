"""Exact combinatorial topology of voxel grids.

This is the ground-truth engine the differentiable losses are checked
against: union-find connected components, the Euler characteristic of the
closed-cube cubical complex, Betti numbers, and sublevel-set persistence of
a probability field.

Conventions (fixed throughout the package): foreground uses 26-connectivity,
the complement uses 6-connectivity, matching the closed-cube complex in
which cubes sharing any vertex are connected. A probability field p is
filtered by g = 1 - p, so high-probability structure is born first; the
complex at filtration value t is the union of closed unit cubes of voxels
with p >= 1 - t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ._kernels import (
    _OFFS_6,
    _OFFS_26,
    build_cells,
    label_components,
    merge_tree_pairs,
    reduce_boundary,
)
from .grids import Volume3D

__all__ = [
    "BettiTriple",
    "PersistencePair",
    "connected_components",
    "euler_characteristic",
    "betti_numbers",
    "persistence",
    "betti1_at_half",
    "pairs_to_text",
]


@dataclass(frozen=True)
class BettiTriple:
    b0: int
    b1: int
    b2: int


@dataclass(frozen=True)
class PersistencePair:
    """One homological feature of the filtration.

    birth/death are filtration values of g = 1 - p; death is math.inf for
    essential features. The voxels are the anchors of the birth/death
    critical cells ((-1, -1, -1) for an essential death).
    """

    dim: int
    birth: float
    death: float
    birth_voxel: tuple[int, int, int]
    death_voxel: tuple[int, int, int]

    @property
    def essential(self) -> bool:
        return math.isinf(self.death)


def _as_mask(mask) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(mask))
    if arr.ndim != 3:
        raise ValueError(f"expected a 3D mask, got shape {arr.shape}")
    return (arr != 0).astype(np.uint8)


def connected_components(mask, connectivity: int = 26) -> tuple[int, np.ndarray]:
    """Label maximal connected voxel sets.

    Labels are assigned 1..count in first-encounter (z, y, x) scan order;
    identical masks always produce identical labellings.
    """
    if connectivity not in (6, 26):
        raise ValueError("connectivity must be 6 or 26")
    arr = _as_mask(mask)
    offs = _OFFS_26 if connectivity == 26 else _OFFS_6
    count, labels = label_components(arr, offs)
    return int(count), labels


def euler_characteristic(mask) -> int:
    """V - E + F - C of the complex whose top cells are the foreground cubes.

    Shared faces/edges/vertices are counted once.
    """
    occ = _as_mask(mask).astype(bool)
    d, h, w = occ.shape
    cubes = int(occ.sum())
    if cubes == 0:
        return 0

    verts = np.zeros((d + 1, h + 1, w + 1), dtype=bool)
    for dz in (0, 1):
        for dy in (0, 1):
            for dx in (0, 1):
                verts[dz : dz + d, dy : dy + h, dx : dx + w] |= occ
    n_v = int(verts.sum())

    n_e = 0
    # Edge directed along axis `ax` is shared by up to 4 voxels (offsets on
    # the two other axes).
    for ax in range(3):
        shape = [d + 1, h + 1, w + 1]
        shape[ax] -= 1
        e = np.zeros(shape, dtype=bool)
        for do in (0, 1):
            for do2 in (0, 1):
                sl = [slice(None)] * 3
                k = 0
                for j in range(3):
                    if j == ax:
                        sl[j] = slice(0, occ.shape[j])
                    else:
                        off = do if k == 0 else do2
                        k += 1
                        sl[j] = slice(off, off + occ.shape[j])
                e[tuple(sl)] |= occ
        n_e += int(e.sum())

    n_f = 0
    # Face normal to axis `ax` is shared by up to 2 voxels.
    for ax in range(3):
        shape = [d, h, w]
        shape[ax] += 1
        f = np.zeros(shape, dtype=bool)
        for off in (0, 1):
            sl = [slice(None)] * 3
            sl[ax] = slice(off, off + occ.shape[ax])
            f[tuple(sl)] |= occ
        n_f += int(f.sum())

    return n_v - n_e + n_f - cubes


def betti_numbers(mask) -> BettiTriple:
    """(b0, b1, b2) of the closed-cube complex of the mask.

    b0 counts 26-connected foreground components, b2 counts bounded
    6-connected components of the complement, and b1 follows from the
    Euler-Poincare identity b0 - b1 + b2 = chi (the complex is embedded in
    a ball, so no higher homology exists).
    """
    occ = _as_mask(mask)
    b0, _ = connected_components(occ, connectivity=26)
    chi = euler_characteristic(occ)
    comp = np.pad(occ == 0, 1, constant_values=True).astype(np.uint8)
    n_comp, _ = label_components(comp, _OFFS_6)
    b2 = n_comp - 1  # everything reaching the padded shell is the outside
    b1 = b0 + b2 - chi
    return BettiTriple(b0=int(b0), b1=int(b1), b2=int(b2))


def _field_array(field) -> np.ndarray:
    if isinstance(field, Volume3D):
        arr = field.data
    else:
        arr = np.ascontiguousarray(np.asarray(field, dtype=np.float64))
    if arr.ndim != 3:
        raise ValueError(f"expected a 3D field, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("persistence input must be finite")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("persistence input must lie in [0, 1]")
    return arr


def persistence(field) -> list[PersistencePair]:
    """Dim-0/1 persistence pairs of the sublevel filtration of g = 1 - p.

    Cells are ordered by (filtration value, anchor voxel in (z, y, x) lex
    order, dimension, scan order), the lower-star order induced by taking
    each cell's value as the minimum of g over its incident voxels. Pairs
    with death == birth are homologically invisible and omitted; the single
    essential dim-0 pair of the (connected) full grid carries death = +inf.

    At every threshold t, the number of dim-d pairs with birth <= t < death
    equals Betti_d of the binarised mask p >= 1 - t.
    """
    p = _field_array(field)
    g = 1.0 - p
    d, h, w = g.shape
    value, anchor = build_cells(g)
    d2, h2, w2 = 2 * d + 1, 2 * h + 1, 2 * w + 1
    s_z, s_y, s_x = h2 * w2, w2, 1

    az = (np.arange(d2, dtype=np.int64) & 1)[:, None, None]
    ay = (np.arange(h2, dtype=np.int64) & 1)[None, :, None]
    ax = (np.arange(w2, dtype=np.int64) & 1)[None, None, :]
    dim = np.ravel(az + ay + ax)

    n_cells = value.shape[0]
    rank = np.empty(n_cells, dtype=np.int64)
    sids: list[np.ndarray] = []
    for k in range(4):
        ids = np.flatnonzero(dim == k)
        order = np.lexsort((anchor[ids], value[ids]))  # stable: scan-order ties
        s = ids[order]
        sids.append(s)
        rank[s] = np.arange(s.shape[0], dtype=np.int64)

    vert_ids, edge_ids, face_ids, cube_ids = sids

    # Clearing pass: cube columns pair with faces; those faces are dim-2
    # creators whose own columns are guaranteed to vanish.
    cube_cols = np.empty((cube_ids.shape[0], 6), dtype=np.int64)
    for i, s in enumerate((s_z, s_y, s_x)):
        cube_cols[:, 2 * i] = rank[cube_ids - s]
        cube_cols[:, 2 * i + 1] = rank[cube_ids + s]
    piv3 = reduce_boundary(cube_cols, face_ids.shape[0])
    if cube_ids.shape[0] and piv3.min() < 0:
        raise AssertionError("cube column reduced to zero; broken complex")
    cleared = np.zeros(face_ids.shape[0], dtype=bool)
    cleared[piv3[piv3 >= 0]] = True

    keep_faces = face_ids[~cleared]
    fa = keep_faces // s_z
    fb = (keep_faces % s_z) // s_y
    fc = keep_faces % s_y
    s1 = np.where(fa & 1 == 1, s_z, s_y)
    s2 = np.where(fc & 1 == 1, s_x, s_y)
    face_cols = np.stack(
        [
            rank[keep_faces - s1],
            rank[keep_faces + s1],
            rank[keep_faces - s2],
            rank[keep_faces + s2],
        ],
        axis=1,
    )
    piv2 = reduce_boundary(face_cols, edge_ids.shape[0])
    if keep_faces.shape[0] and piv2.min() < 0:
        raise AssertionError("unpaired face column after clearing")

    def _voxel(cell_id: int) -> tuple[int, int, int]:
        a = anchor[cell_id]
        return (int(a // (h * w)), int((a % (h * w)) // w), int(a % w))

    pairs: list[PersistencePair] = []
    birth_e = value[edge_ids[piv2]]
    death_f = value[keep_faces]
    for i in np.flatnonzero(death_f > birth_e):
        e_cid = int(edge_ids[piv2[i]])
        f_cid = int(keep_faces[i])
        pairs.append(
            PersistencePair(
                dim=1,
                birth=float(value[e_cid]),
                death=float(value[f_cid]),
                birth_voxel=_voxel(e_cid),
                death_voxel=_voxel(f_cid),
            )
        )

    # Dim-0 via elder-rule union-find over vertices, edges in rank order.
    ea = edge_ids // s_z
    eb = (edge_ids % s_z) // s_y
    es = np.where(ea & 1 == 1, s_z, np.where(eb & 1 == 1, s_y, s_x))
    e_u = rank[edge_ids - es]
    e_v = rank[edge_ids + es]
    died, roots = merge_tree_pairs(e_u, e_v, vert_ids.shape[0])
    merge = died >= 0
    b_val = value[vert_ids[died[merge]]]
    d_val = value[edge_ids[merge]]
    merge_idx = np.flatnonzero(merge)
    for i in np.flatnonzero(d_val > b_val):
        v_cid = int(vert_ids[died[merge_idx[i]]])
        e_cid = int(edge_ids[merge_idx[i]])
        pairs.append(
            PersistencePair(
                dim=0,
                birth=float(value[v_cid]),
                death=float(value[e_cid]),
                birth_voxel=_voxel(v_cid),
                death_voxel=_voxel(e_cid),
            )
        )
    for r in np.flatnonzero(roots):
        v_cid = int(vert_ids[r])
        pairs.append(
            PersistencePair(
                dim=0,
                birth=float(value[v_cid]),
                death=math.inf,
                birth_voxel=_voxel(v_cid),
                death_voxel=(-1, -1, -1),
            )
        )

    pairs.sort(key=lambda q: (q.dim, q.birth, q.death, q.birth_voxel, q.death_voxel))
    return pairs


def betti1_at_half(field) -> int:
    """Dim-1 pairs straddling filtration value 0.5.

    Equals betti_numbers(p >= 0.5).b1.
    """
    p = _field_array(field)
    return sum(
        1 for q in persistence(p) if q.dim == 1 and q.birth <= 0.5 < q.death
    )


def pairs_to_text(pairs: Iterable[PersistencePair]) -> str:
    """One line per pair: dim birth death bz by bx dz dy dx (death '+inf'
    for essential pairs)."""
    lines = []
    for q in pairs:
        death = "+inf" if q.essential else repr(q.death)
        lines.append(
            f"{q.dim} {q.birth!r} {death} "
            f"{q.birth_voxel[0]} {q.birth_voxel[1]} {q.birth_voxel[2]} "
            f"{q.death_voxel[0]} {q.death_voxel[1]} {q.death_voxel[2]}"
        )
    return "\n".join(lines) + ("\n" if lines else "")
