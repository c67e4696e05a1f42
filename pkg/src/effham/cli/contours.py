"""Marching-squares iso-lines on a 2-D p-lattice."""

from __future__ import annotations

import json
from collections import defaultdict

import numpy as np

from ..effective import EffectiveTable

# edges of a cell (i, j): bottom, right, top, left as global edge keys
_EDGES = (
    lambda i, j: ("h", i, j),
    lambda i, j: ("v", i + 1, j),
    lambda i, j: ("h", i, j + 1),
    lambda i, j: ("v", i, j),
)
# corner bits: a=(i,j) 1, b=(i+1,j) 2, c=(i+1,j+1) 4, d=(i,j+1) 8
_SEGMENTS = {
    0: (), 15: (),
    1: ((3, 0),), 14: ((3, 0),),
    2: ((0, 1),), 13: ((0, 1),),
    4: ((1, 2),), 11: ((1, 2),),
    8: ((2, 3),), 7: ((2, 3),),
    3: ((3, 1),), 12: ((3, 1),),
    6: ((0, 2),), 9: ((0, 2),),
}


def _saddle(mask, center_above):
    # a joined cell keeps its two above corners connected through the centre
    if (mask == 5) == center_above:
        return ((0, 1), (2, 3))
    return ((3, 0), (1, 2))


def _segments(F, level):
    above = F > level
    n1, n2 = F.shape
    segs = []
    for i in range(n1 - 1):
        for j in range(n2 - 1):
            mask = (int(above[i, j]) | int(above[i + 1, j]) << 1
                    | int(above[i + 1, j + 1]) << 2 | int(above[i, j + 1]) << 3)
            if mask in (5, 10):
                center = 0.25 * (F[i, j] + F[i + 1, j] + F[i + 1, j + 1] + F[i, j + 1])
                pairs = _saddle(mask, center > level)
            else:
                pairs = _SEGMENTS[mask]
            for e0, e1 in pairs:
                segs.append((_EDGES[e0](i, j), _EDGES[e1](i, j)))
    return segs


def _point(key, F, x, y, level):
    kind, i, j = key
    if kind == "h":
        f0, f1 = F[i, j], F[i + 1, j]
        t = (level - f0) / (f1 - f0)
        return [float(x[i] + t * (x[i + 1] - x[i])), float(y[j])]
    f0, f1 = F[i, j], F[i, j + 1]
    t = (level - f0) / (f1 - f0)
    return [float(x[i]), float(y[j] + t * (y[j + 1] - y[j]))]


def _chains(segs):
    adj = defaultdict(list)
    for a, b in segs:
        adj[a].append(b)
        adj[b].append(a)
    used = set()
    out = []

    def walk(start):
        chain = [start]
        cur = start
        while True:
            nxt = None
            for cand in adj[cur]:
                edge = frozenset((cur, cand))
                if edge not in used:
                    nxt = cand
                    used.add(edge)
                    break
            if nxt is None:
                return chain
            chain.append(nxt)
            cur = nxt
            if cur == start:
                return chain

    for node in sorted(k for k, v in adj.items() if len(v) == 1):
        if any(frozenset((node, c)) not in used for c in adj[node]):
            out.append(walk(node))
    for node in sorted(adj):
        if any(frozenset((node, c)) not in used for c in adj[node]):
            out.append(walk(node))
    return out


def contour_lines(values, x, y, level: float) -> list:
    """Polylines of ``{F = level}`` for ``F`` sampled at ``x[i], y[j]``.

    Closed loops repeat their first vertex at the end.  Saddle cells are
    split by comparing the cell-centre average with the level.
    """
    F = np.asarray(values, dtype=float)
    if F.ndim != 2 or F.shape != (len(x), len(y)):
        raise ValueError("contours need a 2-D array matching the axes")
    if F.size == 0 or not (F.min() <= level <= F.max()):
        return []
    return [[_point(k, F, x, y, level) for k in chain] for chain in _chains(_segments(F, level))]


def contours(table: EffectiveTable, levels) -> list:
    """``[{"level": l, "polylines": [...]}, ...]`` for a 2-D table."""
    if table.pgrid.dimension != 2:
        raise ValueError("contours need a 2-D table")
    x, y = table.pgrid.axes()
    return [{"level": float(l), "polylines": contour_lines(table.values, x, y, float(l))} for l in levels]


def contours_json(table: EffectiveTable, levels) -> str:
    return json.dumps(contours(table, levels), indent=1, sort_keys=True)
