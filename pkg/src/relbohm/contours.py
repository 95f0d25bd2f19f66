"""Marching-squares iso-contour extraction on a rectangular grid.

Vertices lie on cell edges with linear interpolation; segments are
chained into polylines (open chains first, then closed loops).  Saddle
cells are disambiguated by comparing the cell-center average with the
contour level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ContourLine", "extract_contours"]


@dataclass
class ContourLine:
    """One polyline of an iso-contour: points[:, 0] = x, points[:, 1] = t."""

    level: float
    points: np.ndarray
    closed: bool = False


def _edge_point(key, x, t, values, level):
    """Interpolated (x, t) coordinates of the crossing on a grid edge."""
    kind, i, j = key
    va = values[i, j]
    if kind == "x":
        vb = values[i + 1, j]
        s = 0.0 if vb == va else (level - va) / (vb - va)
        return (x[i] + s * (x[i + 1] - x[i]), t[j])
    vb = values[i, j + 1]
    s = 0.0 if vb == va else (level - va) / (vb - va)
    return (x[i], t[j] + s * (t[j + 1] - t[j]))


def _cell_segments(i, j, above, values, level):
    """Edge-key pairs for the segments crossing cell (i, j)."""
    b0 = above[i, j]
    b1 = above[i + 1, j]
    b2 = above[i + 1, j + 1]
    b3 = above[i, j + 1]
    case = b0 | (b1 << 1) | (b2 << 2) | (b3 << 3)
    if case in (0, 15):
        return ()
    bottom = ("x", i, j)
    top = ("x", i, j + 1)
    left = ("t", i, j)
    right = ("t", i + 1, j)
    table = {
        1: ((left, bottom),),
        2: ((bottom, right),),
        3: ((left, right),),
        4: ((right, top),),
        6: ((bottom, top),),
        7: ((left, top),),
        8: ((top, left),),
        9: ((bottom, top),),
        11: ((right, top),),
        12: ((left, right),),
        13: ((bottom, right),),
        14: ((left, bottom),),
    }
    if case == 5 or case == 10:
        center = 0.25 * (values[i, j] + values[i + 1, j]
                         + values[i + 1, j + 1] + values[i, j + 1])
        center_above = center > level
        if (case == 5) == center_above:
            return ((bottom, right), (top, left))
        return ((bottom, left), (top, right))
    return table[case]


def _chain(segments):
    """Join segments (pairs of hashable keys) into key polylines."""
    adj: dict = {}
    for a, b in segments:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    visited_edges = set()
    chains = []

    def walk(start, first):
        path = [start, first]
        visited_edges.add(frozenset((start, first)))
        cur, prev = first, start
        while True:
            nxt = None
            for cand in adj[cur]:
                e = frozenset((cur, cand))
                if cand != prev and e not in visited_edges:
                    nxt = cand
                    break
            if nxt is None:
                return path, False
            visited_edges.add(frozenset((cur, nxt)))
            path.append(nxt)
            if nxt == start:
                return path, True
            prev, cur = cur, nxt

    # Open chains start at degree-1 keys.
    for key in sorted(adj):
        if len(adj[key]) == 1:
            for nb in adj[key]:
                if frozenset((key, nb)) not in visited_edges:
                    chains.append(walk(key, nb))
    # Remaining segments belong to closed loops.
    for a, b in segments:
        if frozenset((a, b)) not in visited_edges:
            chains.append(walk(a, b))
    return chains


def extract_contours(x, t, values, levels):
    """Extract iso-contour polylines of a sampled field.

    Parameters
    ----------
    x, t : 1-d coordinate arrays (strictly increasing).
    values : array of shape (len(x), len(t)); must be finite everywhere.
    levels : iterable of contour levels.

    Returns a list of ContourLine.  A level that is never bracketed simply
    contributes no lines.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.shape != (x.size, t.size):
        raise ValueError("values must have shape (len(x), len(t))")
    if not np.all(np.isfinite(values)):
        raise ValueError("contour field contains non-finite values")

    out = []
    for level in levels:
        above = values > level
        segments = []
        for i in range(x.size - 1):
            for j in range(t.size - 1):
                segments.extend(_cell_segments(i, j, above, values, level))
        for keys, closed in _chain(segments):
            # walk() already repeats the start key at the end of a loop.
            pts = np.array([_edge_point(k, x, t, values, level)
                            for k in keys])
            out.append(ContourLine(level=float(level), points=pts,
                                   closed=closed))
    return out
