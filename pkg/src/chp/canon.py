"""Canonical labeling of small vertex-coloured digraphs.

Colour refinement to an equitable partition, then individualisation of the
first non-singleton cell with backtracking; the lexicographically least
leaf code wins.  Interchangeable twins (same colour, same neighbours) are
tried only once per cell, which keeps antichains of equal labels linear.
"""

from __future__ import annotations


def _refine(cells, out, inn):
    n = len(cells)
    count = len(set(cells))
    while True:
        sigs = [
            (cells[v], tuple(sorted(cells[u] for u in out[v])), tuple(sorted(cells[u] for u in inn[v])))
            for v in range(n)
        ]
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        cells = [rank[s] for s in sigs]
        if len(rank) == count:
            return cells
        count = len(rank)


def _leaf_code(cells, colours, edges):
    perm = sorted(range(len(cells)), key=cells.__getitem__)
    pos = {v: i for i, v in enumerate(perm)}
    code = (tuple(colours[v] for v in perm), tuple(sorted((pos[a], pos[b]) for a, b in edges)))
    return code, perm


def canonical_labeling(colours, edges):
    """Return ``(code, perm)`` for the digraph on ``range(len(colours))``.

    ``perm[i]`` is the original vertex placed at canonical position ``i``.
    Two coloured digraphs are isomorphic iff their codes are equal.
    """
    n = len(colours)
    edges = sorted(set(edges))
    out = [set() for _ in range(n)]
    inn = [set() for _ in range(n)]
    for a, b in edges:
        out[a].add(b)
        inn[b].add(a)
    order = sorted(set(colours))
    rank = {c: i for i, c in enumerate(order)}
    cells = _refine([rank[c] for c in colours], out, inn)

    best = [None, None]

    def twins(u, v):
        return out[u] - {v} == out[v] - {u} and inn[u] - {v} == inn[v] - {u}

    def search(cells):
        sizes = {}
        for c in cells:
            sizes[c] = sizes.get(c, 0) + 1
        target = min((c for c, k in sizes.items() if k > 1), default=None)
        if target is None:
            code, perm = _leaf_code(cells, colours, edges)
            if best[0] is None or code < best[0]:
                best[0], best[1] = code, perm
            return
        tried = []
        for v in range(n):
            if cells[v] != target or any(twins(v, u) for u in tried):
                continue
            tried.append(v)
            split = [2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(cells)]
            search(_refine(split, out, inn))

    search(cells)
    return best[0], best[1]
