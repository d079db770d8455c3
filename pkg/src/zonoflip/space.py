"""Tiling spaces: enumeration, flip/Hamming distances, deficient pairs."""

from __future__ import annotations

import heapq
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from . import _kernels as K
from .core import TriangleRef, ZonotopeSpec, triangle_table
from .tiling import (
    Tiling,
    TilePlacement,
    arrangement,
    placements_from_signs,
    seed_tiling,
    signs_from_placements,
)

log = logging.getLogger(__name__)

ALL_PAIRS_LIMIT = 10**5


class BudgetExceeded(RuntimeError):
    """A search or enumeration hit its budget; ``partial`` holds what was computed."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class SpecMismatch(ValueError):
    pass


def _same_spec(t1: Tiling, t2: Tiling):
    if t1.spec != t2.spec:
        raise SpecMismatch(f"tilings of different zonotopes: {t1.spec} vs {t2.spec}")


# ---------------------------------------------------------------------------
# whole spaces


class TilingSpace:
    """All tilings of a zonotope as packed sign vectors, in BFS order from the seed."""

    def __init__(self, spec: ZonotopeSpec, store: np.ndarray, complete: bool = True):
        self.spec = spec
        self.store = store
        self.complete = complete
        self._arr = arrangement(spec)
        size = 1 << max(4, (2 * len(store)).bit_length())
        self._table = np.full(size, -1, dtype=np.int64)
        K.rebuild_table(self.store, len(self.store), self._table)

    def __len__(self) -> int:
        return len(self.store)

    def __iter__(self) -> Iterator[Tiling]:
        for i in range(len(self)):
            yield self.tiling(i)

    def __contains__(self, t: Tiling) -> bool:
        return t.spec == self.spec and self.index_of(t) >= 0

    def tiling(self, i: int) -> Tiling:
        return Tiling(self.spec, K.words_to_int(self.store[i]))

    def index_of(self, t: Tiling) -> int:
        return int(K.lookup(self.store, self._table, K.int_to_words(t.bits, self._arr.words)))

    @cached_property
    def minimal_masks(self) -> np.ndarray:
        out = np.zeros_like(self.store)
        K.min_masks(self.store, self._arr.cut_idx, self._arr.cut_val, out)
        return out

    @cached_property
    def flip_graph(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR arrays (indptr, neighbours, flipped triangle per edge)."""
        n = len(self)
        deg = np.zeros(n, dtype=np.int64)
        K.degrees(self.store, n, self._arr.cut_idx, self._arr.cut_val, deg)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(indptr[-1], dtype=np.int64)
        labels = np.empty(indptr[-1], dtype=np.int32)
        K.adjacency(self.store, n, self._table, self._arr.cut_idx, self._arr.cut_val, indptr, indices, labels)
        return indptr, indices, labels

    def distances_from(self, i: int) -> np.ndarray:
        indptr, indices, _ = self.flip_graph
        dist = np.empty(len(self), dtype=np.int64)
        K.bfs_distances(indptr, indices, i, dist)
        return dist

    def hamming_from(self, i: int) -> np.ndarray:
        x = self.store ^ self.store[i]
        return np.bitwise_count(x).sum(axis=1).astype(np.int64)

    def is_connected(self) -> bool:
        return bool((self.distances_from(0) >= 0).all())

    def dumps(self) -> str:
        lines = [f"zonotope: {self.spec}"]
        lines.extend(t.sign_string() for t in self)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "TilingSpace":
        rows = [ln.strip() for ln in text.strip().splitlines()]
        spec = ZonotopeSpec.parse(rows[0].split(":", 1)[1])
        tilings = [Tiling.from_sign_string(spec, r) for r in rows[1:]]
        return cls(spec, K.ints_to_array([t.bits for t in tilings], arrangement(spec).words))


def enumerate_space(spec: ZonotopeSpec, node_limit: int | None = None) -> TilingSpace:
    """Breadth-first flip closure of the seed tiling."""
    arr = arrangement(spec)
    W = arr.words
    limit = node_limit if node_limit is not None else np.iinfo(np.int64).max
    cap = 1 << 10
    store = np.zeros((cap, W), dtype=np.uint64)
    table = np.full(2 * cap, -1, dtype=np.int64)
    store[0] = K.int_to_words(seed_tiling(spec).bits, W)
    K.rebuild_table(store, 1, table)
    state = np.array([0, 1], dtype=np.int64)
    while True:
        status = K.bfs_run(store, table, state, arr.cut_idx, arr.cut_val, limit)
        if status == 0:
            break
        if status == 2:
            partial = TilingSpace(spec, store[: state[1]].copy(), complete=False)
            raise BudgetExceeded(f"more than {node_limit} tilings of {spec}", partial)
        cap *= 2
        log.debug("growing store to %d rows (%d found)", cap, state[1])
        grown = np.zeros((cap, W), dtype=np.uint64)
        grown[: state[1]] = store[: state[1]]
        store = grown
        table = np.full(2 * cap, -1, dtype=np.int64)
        K.rebuild_table(store, state[1], table)
    count = int(state[1])
    store = store[:count].copy()
    return TilingSpace(spec, store)


def count_tilings(spec: ZonotopeSpec, node_limit: int | None = None) -> int:
    return len(enumerate_space(spec, node_limit))


# ---------------------------------------------------------------------------
# distances


def hamming_distance(t1: Tiling, t2: Tiling) -> int:
    _same_spec(t1, t2)
    return (t1.bits ^ t2.bits).bit_count()


def inverted_triangles(t1: Tiling, t2: Tiling) -> set[TriangleRef]:
    _same_spec(t1, t2)
    table = triangle_table(t1.spec)
    return {table.triangle_ref(k) for k in K.bits_to_indices(t1.bits ^ t2.bits)}


@dataclass
class DistanceReport:
    a: Tiling
    b: Tiling
    hamming: int
    flip: int
    path: list[int] | None = None

    @property
    def witness(self) -> list[TriangleRef] | None:
        if self.path is None:
            return None
        table = triangle_table(self.a.spec)
        return [table.triangle_ref(k) for k in self.path]

    @property
    def deficient(self) -> bool:
        return self.flip > self.hamming


def _minimal_bits(spec: ZonotopeSpec, bits: int) -> int:
    arr = arrangement(spec)
    out = np.zeros(arr.words, dtype=np.uint64)
    K.min_mask(K.int_to_words(bits, arr.words), arr.cut_idx, arr.cut_val, out)
    return K.words_to_int(out)


def _neighbours(spec: ZonotopeSpec, bits: int) -> Iterator[tuple[int, int]]:
    mask = _minimal_bits(spec, bits)
    k = 0
    while mask:
        if mask & 1:
            yield k, bits ^ (1 << k)
        mask >>= 1
        k += 1


def _walk_back(parent: dict, node: int) -> list[int]:
    path = []
    while parent[node] is not None:
        prev, tri = parent[node]
        path.append(tri)
        node = prev
    path.reverse()
    return path


def _astar(spec, src: int, dst: int, budget: int) -> list[int]:
    # Hamming distance changes by exactly one per flip, so it is consistent.
    g = {src: 0}
    parent = {src: None}
    heap = [((src ^ dst).bit_count(), 0, 0, src)]
    tick = 0
    closed = set()
    while heap:
        f, neg_g, _, node = heapq.heappop(heap)
        if node == dst:
            return _walk_back(parent, node)
        if node in closed:
            continue
        closed.add(node)
        if len(closed) > budget:
            raise BudgetExceeded(f"A* expanded more than {budget} tilings")
        gn = g[node] + 1
        for tri, nxt in _neighbours(spec, node):
            if gn < g.get(nxt, 1 << 60):
                g[nxt] = gn
                parent[nxt] = (node, tri)
                tick += 1
                # ties: prefer deeper nodes, then creation order
                heapq.heappush(heap, (gn + (nxt ^ dst).bit_count(), -gn, tick, nxt))
    raise AssertionError("target unreachable: flip graph disconnected")  # pragma: no cover


def _bfs(spec, src: int, dst: int, budget: int) -> list[int]:
    parent = {src: None}
    queue = deque([src])
    while queue:
        node = queue.popleft()
        if node == dst:
            return _walk_back(parent, node)
        for tri, nxt in _neighbours(spec, node):
            if nxt not in parent:
                parent[nxt] = (node, tri)
                queue.append(nxt)
        if len(parent) > budget:
            raise BudgetExceeded(f"BFS visited more than {budget} tilings")
    raise AssertionError("target unreachable: flip graph disconnected")  # pragma: no cover


def _bidirectional(spec, src: int, dst: int, budget: int) -> list[int]:
    if src == dst:
        return []
    parents = ({src: None}, {dst: None})
    frontiers = ([src], [dst])
    while frontiers[0] and frontiers[1]:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        mine, other = parents[side], parents[1 - side]
        nxt_frontier = []
        meet = None
        for node in frontiers[side]:
            for tri, nxt in _neighbours(spec, node):
                if nxt not in mine:
                    mine[nxt] = (node, tri)
                    nxt_frontier.append(nxt)
                    if nxt in other and meet is None:
                        meet = nxt
        if meet is not None:
            # finish the layer so the meeting point is on a shortest path
            best = min(
                (n for n in nxt_frontier if n in other),
                key=lambda n: len(_walk_back(mine, n)) + len(_walk_back(other, n)),
            )
            fwd = _walk_back(parents[0], best)
            back = _walk_back(parents[1], best)
            return fwd + back[::-1]
        frontiers = (nxt_frontier, frontiers[1]) if side == 0 else (frontiers[0], nxt_frontier)
        if len(parents[0]) + len(parents[1]) > budget:
            raise BudgetExceeded(f"bidirectional BFS visited more than {budget} tilings")
    raise AssertionError("target unreachable: flip graph disconnected")  # pragma: no cover


_METHODS = {"astar": _astar, "bfs": _bfs, "bidirectional": _bidirectional}


def flip_distance(t1: Tiling, t2: Tiling, method: str = "astar", budget: int = 10**7) -> DistanceReport:
    _same_spec(t1, t2)
    try:
        search = _METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; pick one of {sorted(_METHODS)}") from None
    path = search(t1.spec, t1.bits, t2.bits, budget)
    return DistanceReport(t1, t2, hamming_distance(t1, t2), len(path), path)


def replay(t: Tiling, path: Sequence[int]) -> Tiling:
    from .tiling import flip

    for k in path:
        t = flip(t, k)
    return t


# ---------------------------------------------------------------------------
# greedy reduction and certificates


def greedy_path(t1: Tiling, t2: Tiling) -> tuple[list[int], bool]:
    _same_spec(t1, t2)
    arr = arrangement(t1.spec)
    path = np.empty(arr.T + 1, dtype=np.int64)
    steps, reached = K.greedy(
        K.int_to_words(t1.bits, arr.words), K.int_to_words(t2.bits, arr.words), arr.cut_idx, arr.cut_val, path
    )
    return [int(x) for x in path[:steps]], bool(reached)


def greedy_reduce(t1: Tiling, t2: Tiling) -> tuple[int, bool]:
    """Flip inverted minimal triangles of t1 (lowest index first) while possible."""
    path, reached = greedy_path(t1, t2)
    return len(path), reached


@dataclass
class DeficiencyCertificate:
    a: Tiling
    b: Tiling
    side: str  # "a" or "b": the tiling without inverted minimal triangles
    minimal: list[TriangleRef]
    hamming: int

    @property
    def lower_bound(self) -> int:
        return self.hamming + 2

    def table(self) -> str:
        certified, other = (self.a, self.b) if self.side == "a" else (self.b, self.a)
        tt = triangle_table(self.a.spec)
        rows = [f"{'triangle':<24} {'sign':>4} {'other':>5}"]
        for tri in self.minimal:
            k = tt.triangle_index(tri)
            rows.append(f"{str(tri):<24} {certified.sign(k).value:>4} {other.sign(k).value:>5}")
        return "\n".join(rows)


def deficiency_certificate(t1: Tiling, t2: Tiling) -> DeficiencyCertificate | None:
    """Certificate that flip >= hamming + 2, if one side has no inverted minimal triangle."""
    _same_spec(t1, t2)
    diff = t1.bits ^ t2.bits
    if diff == 0:
        raise ValueError("identical tilings have no deficiency")
    tt = triangle_table(t1.spec)
    for side, t in (("a", t1), ("b", t2)):
        mask = _minimal_bits(t.spec, t.bits)
        if mask & diff == 0:
            minimal = [tt.triangle_ref(k) for k in K.bits_to_indices(mask)]
            return DeficiencyCertificate(t1, t2, side, minimal, diff.bit_count())
    return None


# ---------------------------------------------------------------------------
# symmetries


def rotate_bundles(t: Tiling) -> Tiling:
    """Replace v_1 by -v_1 and move it last: bundles (1..n) -> (2..n, 1), ranks of bundle 1 reversed."""
    spec = t.spec
    n = spec.n
    a0 = spec.bundle_sizes[0]
    new_spec = ZonotopeSpec(spec.bundle_sizes[1:] + spec.bundle_sizes[:1])
    out = []
    for pl in placements_from_signs(t):
        m = pl.coords
        uses0 = pl.pair[0].bundle == 1
        m0 = a0 - m[0] - (1 if uses0 else 0)
        coords = tuple(m[1:]) + (m0,)
        out.append(_placement(coords, [(b - 2) % n for b in pl.bundles]))
    return signs_from_placements(new_spec, out)


def reflect_bundles(t: Tiling) -> Tiling:
    """Mirror image: bundle order reversed."""
    spec = t.spec
    n = spec.n
    new_spec = ZonotopeSpec(spec.bundle_sizes[::-1])
    out = [_placement(tuple(pl.coords[::-1]), [n - b for b in pl.bundles]) for pl in placements_from_signs(t)]
    return signs_from_placements(new_spec, out)


def _placement(coords, bundles) -> TilePlacement:
    from .core import PseudolineRef

    i, j = sorted(bundles)
    return TilePlacement((PseudolineRef(i + 1, coords[i] + 1), PseudolineRef(j + 1, coords[j] + 1)), coords)


def symmetry_images(t: Tiling) -> list[Tiling]:
    """Images of t under the dihedral group generated by bundle rotation and reflection.

    Only images on the same spec are of interest to callers; all 4n group
    elements are returned, in a fixed order.
    """
    n = t.spec.n
    out = []
    cur = t
    for _ in range(2 * n):
        out.append(cur)
        out.append(reflect_bundles(cur))
        cur = rotate_bundles(cur)
    return out


def isometry_classes(pairs: Sequence[tuple[Tiling, Tiling]]) -> list[int]:
    """Class id per pair under the dihedral bundle group and swapping the two tilings."""
    key_of = {}
    classes = []
    next_id = 0
    for a, b in pairs:
        key = (a.bits, b.bits, str(a.spec))
        if key not in key_of:
            ia, ib = symmetry_images(a), symmetry_images(b)
            for x, y in zip(ia, ib):
                if x.spec == a.spec:
                    key_of.setdefault((x.bits, y.bits, str(x.spec)), next_id)
                    key_of.setdefault((y.bits, x.bits, str(x.spec)), next_id)
            next_id += 1
        classes.append(key_of[key])
    return classes


# ---------------------------------------------------------------------------
# deficient-pair searches


@dataclass
class CensusEntry:
    a: Tiling
    b: Tiling
    report: DistanceReport
    certified_side: str | None
    isometry_class: int = -1


def _exhaustive_deficient(space: TilingSpace) -> list[tuple[int, int, int, int]]:
    n = len(space)
    indptr, indices, _ = space.flip_graph
    dist = np.empty(n, dtype=np.int64)
    cap = 1024
    out_idx = np.empty(cap, dtype=np.int64)
    out_h = np.empty(cap, dtype=np.int64)
    out_d = np.empty(cap, dtype=np.int64)
    found = []
    for i in range(n):
        k = K.deficient_from_source(space.store, indptr, indices, i, dist, out_idx, out_h, out_d)
        if k > cap:
            raise BudgetExceeded("too many deficient pairs from one source")
        for r in range(k):
            found.append((i, int(out_idx[r]), int(out_h[r]), int(out_d[r])))
    return found


def search_deficient_pairs(
    spec: ZonotopeSpec,
    mode: str = "exhaustive",
    samples: int = 1000,
    seed: int = 0,
    space: TilingSpace | None = None,
    astar_budget: int = 10**6,
) -> list[CensusEntry]:
    """Ordered pairs with flip distance above Hamming distance.

    ``exhaustive`` runs all-pairs BFS on the flip graph (spaces up to
    ALL_PAIRS_LIMIT tilings); ``random`` samples pairs, keeps those with a
    deficiency certificate and confirms them with A*.
    """
    entries: list[CensusEntry] = []
    if mode == "exhaustive":
        space = space or enumerate_space(spec, node_limit=ALL_PAIRS_LIMIT)
        if len(space) > ALL_PAIRS_LIMIT:
            raise BudgetExceeded(f"{len(space)} tilings: exhaustive census limited to {ALL_PAIRS_LIMIT}")
        for i, j, h, d in _exhaustive_deficient(space):
            a, b = space.tiling(i), space.tiling(j)
            report = flip_distance(a, b, "astar", astar_budget)
            assert report.flip == d and report.hamming == h
            cert = deficiency_certificate(a, b)
            entries.append(CensusEntry(a, b, report, cert.side if cert else None))
    elif mode == "random":
        rng = random.Random(seed)
        sampler = _pair_sampler(spec, rng, space)
        for _ in range(samples):
            a, b = sampler()
            if a == b:
                continue
            cert = deficiency_certificate(a, b)
            if cert is None:
                continue
            report = flip_distance(a, b, "astar", astar_budget)
            entries.append(CensusEntry(a, b, report, cert.side))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    classes = isometry_classes([(e.a, e.b) for e in entries])
    for e, c in zip(entries, classes):
        e.isometry_class = c
    return entries


def random_walk(t: Tiling, steps: int, rng: random.Random) -> Tiling:
    bits = t.bits
    for _ in range(steps):
        choices = K.bits_to_indices(_minimal_bits(t.spec, bits))
        bits ^= 1 << rng.choice(choices)
    return Tiling(t.spec, bits)


def _pair_sampler(spec, rng, space):
    if space is not None:
        n = len(space)
        return lambda: (space.tiling(rng.randrange(n)), space.tiling(rng.randrange(n)))
    start = seed_tiling(spec)
    walk = 4 * triangle_table(spec).num_lines ** 3
    return lambda: (random_walk(start, walk, rng), random_walk(start, walk, rng))


def census_csv(entries: Sequence[CensusEntry], files: Sequence[tuple[str, str]] | None = None) -> str:
    rows = ["pair_id,tiling_a_file,tiling_b_file,hamming,flip,certified_side,isometry_class"]
    for k, e in enumerate(entries):
        fa, fb = files[k] if files else ("", "")
        rows.append(
            f"{k},{fa},{fb},{e.report.hamming},{e.report.flip},{e.certified_side or ''},{e.isometry_class}"
        )
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# distance equality on a whole space


def predicts_equality(spec: ZonotopeSpec) -> bool:
    """Membership in the families (a,b,c), (a,b,c,d), (a,b,c,d,1), (2,2,2,2,2)."""
    sizes = spec.bundle_sizes
    if len(sizes) <= 4:
        return True
    if len(sizes) == 5:
        return 1 in sizes or all(a == 2 for a in sizes)
    return False


@dataclass
class EqualityReport:
    spec: ZonotopeSpec
    predicted_equal: bool
    method: str
    tilings: int
    pairs_checked: int
    violations: int
    examples: list[tuple[Tiling, Tiling]] = field(default_factory=list)
    exhaustive: bool = True

    @property
    def observed_equal(self) -> bool:
        return self.violations == 0

    @property
    def confirmed(self) -> bool:
        return self.observed_equal == self.predicted_equal


def uncertified_pair_count(space: TilingSpace, keep: int = 16) -> tuple[int, np.ndarray]:
    """Ordered pairs where the first tiling has no inverted minimal triangle.

    Zero such pairs is equivalent to flip = Hamming on the whole space.
    """
    counts = np.empty(len(space), dtype=np.int64)
    K.uncertified_counts(space.store, space.minimal_masks, counts)
    pairs = []
    buf = np.empty(keep, dtype=np.int64)
    for i in np.nonzero(counts)[0]:
        if len(pairs) >= keep:
            break
        k = K.uncertified_targets(space.store, space.minimal_masks, int(i), buf)
        pairs.extend((int(i), int(j)) for j in buf[:k])
    return int(counts.sum()), np.array(pairs[:keep], dtype=np.int64).reshape(-1, 2)


def verify_equality(
    spec: ZonotopeSpec,
    space: TilingSpace | None = None,
    method: str = "auto",
    samples: int = 10**6,
    seed: int = 0,
    node_limit: int = 2 * 10**7,
) -> EqualityReport:
    """Check flip = Hamming on a space against the family prediction.

    methods: ``bfs`` (all-pairs BFS), ``sweep`` (every ordered pair has an
    inverted minimal triangle on the first side), ``sampled`` (greedy
    reduction on uniformly drawn pairs); ``auto`` picks by space size.
    """
    space = space or enumerate_space(spec, node_limit=node_limit)
    n = len(space)
    if method == "auto":
        method = "bfs" if n <= 2 * 10**4 else "sweep" if n <= 10**6 else "sampled"
    predicted = predicts_equality(spec)
    if method == "bfs":
        bad = _exhaustive_deficient(space)
        ex = [(space.tiling(i), space.tiling(j)) for i, j, _, _ in bad[:16]]
        return EqualityReport(spec, predicted, method, n, n * n, len(bad), ex)
    if method == "sweep":
        found, idx = uncertified_pair_count(space)
        ex = [(space.tiling(int(i)), space.tiling(int(j))) for i, j in idx]
        return EqualityReport(spec, predicted, method, n, n * (n - 1), found, ex)
    if method == "sampled":
        rng = np.random.default_rng(seed)
        left = rng.integers(0, n, samples)
        right = rng.integers(0, n, samples)
        steps, ham, reached = greedy_sweep(space, left, right)
        bad = np.nonzero(~reached | (steps != ham))[0]
        ex = [(space.tiling(int(left[k])), space.tiling(int(right[k]))) for k in bad[:16]]
        return EqualityReport(spec, predicted, method, n, samples, len(bad), ex, exhaustive=False)
    raise ValueError(f"unknown method {method!r}")


def greedy_sweep(space: TilingSpace, left: np.ndarray, right: np.ndarray):
    arr = arrangement(space.spec)
    m = len(left)
    steps = np.empty(m, dtype=np.int64)
    ham = np.empty(m, dtype=np.int64)
    reached = np.empty(m, dtype=np.bool_)
    K.greedy_pairs(
        space.store, left.astype(np.int64), right.astype(np.int64), arr.cut_idx, arr.cut_val, steps, ham, reached
    )
    return steps, ham, reached


# ---------------------------------------------------------------------------
# cut-propagation implications between inverted triangles


@dataclass(frozen=True)
class LemmaInstance:
    """In a tiling: if ``antecedent`` is inverted then one of ``conclusions`` is fully inverted."""

    kind: int  # 1: cutter in the bundle of the uncut side, 2: cutter from a fourth bundle
    antecedent: int
    cutter: int
    conclusions: tuple[int, ...]  # bitmasks over triangles


def lemma_instances(t: Tiling) -> list[LemmaInstance]:
    """All cut configurations of t.

    A pseudoline s separating the vertex X∩Y of a triangle (X, Y, Z) from
    the two other vertices (so s cuts the sides lying on X and Y) gives:

    * kind 1 (s in the bundle of Z): (X, Y, s) is inverted too;
    * kind 2 (s crosses Z): (X, Y, s) is inverted, or both (X, Z, s) and
      (Y, Z, s) are.
    """
    from .tiling import _side_bit

    table = triangle_table(t.spec)
    bundle = table.bundle_of
    out = []
    for k, (a, b, c) in enumerate(table.triangles):
        for s in range(table.num_lines):
            if s in (a, b, c):
                continue
            sab, sac, sbc = _side_bit(t, a, b, s), _side_bit(t, a, c, s), _side_bit(t, b, c, s)
            if sab == sac == sbc:
                continue
            if sab != sac and sab != sbc:
                x, y, z = a, b, c
            elif sac != sab and sac != sbc:
                x, y, z = a, c, b
            else:
                x, y, z = b, c, a
            near = 1 << table.tri_of(x, y, s)
            if bundle[s] == bundle[z]:
                out.append(LemmaInstance(1, k, s, (near,)))
            else:
                both = (1 << table.tri_of(x, z, s)) | (1 << table.tri_of(y, z, s))
                out.append(LemmaInstance(2, k, s, (near, both)))
    return out


def lemma_violations(instances: Sequence[LemmaInstance], diff: int, kinds=(1, 2)) -> list[LemmaInstance]:
    bad = []
    for inst in instances:
        if inst.kind in kinds and (diff >> inst.antecedent) & 1:
            if not any(diff & c == c for c in inst.conclusions):
                bad.append(inst)
    return bad


@dataclass
class LemmaReport:
    spec: ZonotopeSpec
    kind: int
    pairs: int
    instances_checked: int
    violations: list[tuple[Tiling, Tiling, LemmaInstance]]
    exhaustive: bool

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_lemma(kind, spec, space, samples, seed) -> LemmaReport:
    space = space or enumerate_space(spec, node_limit=ALL_PAIRS_LIMIT)
    n = len(space)
    bits = [K.words_to_int(row) for row in space.store]
    inst_cache: dict[int, list] = {}

    def instances(i):
        if i not in inst_cache:
            inst_cache[i] = [x for x in lemma_instances(space.tiling(i)) if x.kind == kind]
        return inst_cache[i]

    if samples is None:
        pairs = ((i, j) for i in range(n) for j in range(n) if i != j)
        total = n * (n - 1)
    else:
        rng = random.Random(seed)
        pairs = ((rng.randrange(n), rng.randrange(n)) for _ in range(samples))
        total = samples
    checked = 0
    violations = []
    for i, j in pairs:
        insts = instances(i)
        diff = bits[i] ^ bits[j]
        for inst in insts:
            if (diff >> inst.antecedent) & 1:
                checked += 1
                if not any(diff & c == c for c in inst.conclusions):
                    violations.append((space.tiling(i), space.tiling(j), inst))
    return LemmaReport(spec, kind, total, checked, violations, samples is None)


def check_lemma_config1(spec, space=None, samples=None, seed=0) -> LemmaReport:
    return _check_lemma(1, spec, space, samples, seed)


def check_lemma_config2(spec, space=None, samples=None, seed=0) -> LemmaReport:
    return _check_lemma(2, spec, space, samples, seed)
