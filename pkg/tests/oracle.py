"""Independent oracles that never look at triangle signs.

Tilings are built by sweeping a monotone edge path across the zonotope, one
rhombus at a time, and flips are found as hexagons of three tiles.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations


def sweep_tilings(sizes: tuple[int, ...]) -> set[frozenset]:
    """Every tiling as a frozenset of tiles (i, j, anchor) with i < j and anchor in Z^n."""
    n = len(sizes)
    start = tuple(k for k in range(n) for _ in range(sizes[k]))
    goal = tuple(sorted(start, reverse=True))
    seen = {frozenset()}
    todo = [(start, frozenset())]
    done = set()
    while todo:
        word, tiles = todo.pop()
        if word == goal:
            done.add(tiles)
            continue
        counts = [0] * n
        for p in range(len(word) - 1):
            i, j = word[p], word[p + 1]
            if i < j:
                tile = (i, j, tuple(counts))
                nxt = tiles | {tile}
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append((word[:p] + (j, i) + word[p + 2:], nxt))
            counts[word[p]] += 1
    return done


def _unit(n, k):
    return tuple(1 if x == k else 0 for x in range(n))


def _add(*vs):
    return tuple(map(sum, zip(*vs)))


def hexagon_flips(tiles: frozenset, n: int) -> list[frozenset]:
    """Tilings reachable by rotating one hexagon of three rhombi."""
    by_key = set(tiles)
    out = []
    for i, j, k in combinations(range(n), 3):
        ei, ej, ek = _unit(n, i), _unit(n, j), _unit(n, k)
        for t in tiles:
            if (t[0], t[1]) != (i, j):
                continue
            b = t[2]
            # interior vertex b+e_j versus interior vertex b+e_i+e_k
            low = {(i, j, b), (i, k, _add(b, ej)), (j, k, b)}
            high = {(i, j, _add(b, ek)), (i, k, b), (j, k, _add(b, ei))}
            if low <= by_key:
                out.append(frozenset((by_key - low) | high))
            b = tuple(x - y for x, y in zip(t[2], ek))
            if min(b) >= 0:
                low = {(i, j, b), (i, k, _add(b, ej)), (j, k, b)}
                high = {(i, j, t[2]), (i, k, b), (j, k, _add(b, ei))}
                if high <= by_key:
                    out.append(frozenset((by_key - high) | low))
    return out


def flip_graph(tilings: set[frozenset], n: int) -> dict:
    return {t: [u for u in hexagon_flips(t, n) if u in tilings] for t in tilings}


def bfs(graph: dict, src) -> dict:
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in graph[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def triangle_signs(tiles: frozenset, sizes: tuple[int, ...]) -> tuple[bool, ...]:
    """Sign per lexicographic triangle: does tile (P, Q) sit above pseudoline R."""
    n = len(sizes)
    lines = [(b, r) for b in range(n) for r in range(sizes[b])]
    anchor = {}
    for i, j, m in tiles:
        anchor[((i, m[i]), (j, m[j]))] = m
    out = []
    for x, p in enumerate(lines):
        for y in range(x + 1, len(lines)):
            q = lines[y]
            if q[0] == p[0]:
                continue
            for z in range(y + 1, len(lines)):
                s = lines[z]
                if s[0] == q[0]:
                    continue
                out.append(anchor[(p, q)][s[0]] > s[1])
    return tuple(out)


def count_tilings_by_sweep(sizes: tuple[int, ...]) -> int:
    return len(sweep_tilings(sizes))
