"""Tilings as sign vectors over triangles.

A tiling of a zonotope is stored as an integer bitmask: bit k is set iff
the k-th triangle (lexicographic order) is positive, i.e. the crossing of
its two lower-bundle pseudolines lies on the plus side of the third one.
The plus side of a pseudoline of bundle k is the side reached by moving
along +v_k.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .core import (
    PseudolineRef,
    SpecError,
    TriangleRef,
    TriangleTable,
    ZonotopeSpec,
    cross,
    total_tiles,
    total_triangles,
    triangle_table,
)


class TilingError(ValueError):
    """Raised for sign vectors or placement lists that are not tilings."""


class Sign(enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"


class Side(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


class TilePlacement(NamedTuple):
    """Tile dual to the crossing of ``pair``; its lowest corner is sum(coords[k] * v_k)."""

    pair: tuple[PseudolineRef, PseudolineRef]
    coords: tuple[int, ...]

    @property
    def bundles(self) -> tuple[int, int]:
        return self.pair[0].bundle, self.pair[1].bundle

    def __str__(self) -> str:
        p, q = self.pair
        return f"{p} {q} : " + " ".join(str(m) for m in self.coords)

    @classmethod
    def parse(cls, line: str) -> "TilePlacement":
        left, _, right = line.partition(":")
        p, q = (PseudolineRef.parse(tok) for tok in left.split())
        return cls((p, q), tuple(int(tok) for tok in right.split()))


# ---------------------------------------------------------------------------
# seed arrangement


@lru_cache(maxsize=None)
def _seed_offsets(spec: ZonotopeSpec) -> tuple[Fraction, ...]:
    """Offsets of the straight lines <x, v_b> = offset, one per pseudoline, with no triple point."""
    table = triangle_table(spec)
    delta = Fraction(1, 7)
    for _ in range(64):
        offsets = [
            Fraction(2 * r + 1, 2) + delta * (b + 1) * (b + 2) / (spec.n + 3) ** 2
            for b, r in table.lines
        ]
        if not any(_crossing_value(spec, table, offsets, p, q, s) == 0 for p, q, s in table.triangles):
            return tuple(offsets)
        delta *= 2
        delta = delta / (1 + delta)
    raise AssertionError("no generic offsets found")  # pragma: no cover


def _crossing_point(spec, table, offsets, p, q):
    vp = spec.directions[table.bundle_of[p]]
    vq = spec.directions[table.bundle_of[q]]
    det = cross(vp, vq)
    op, oq = offsets[p], offsets[q]
    return ((op * vq[1] - vp[1] * oq) / det, (vp[0] * oq - vq[0] * op) / det)


def _crossing_value(spec, table, offsets, p, q, s):
    """Signed value of <p∩q, v_s> - offset_s."""
    x, y = _crossing_point(spec, table, offsets, p, q)
    vs = spec.directions[table.bundle_of[s]]
    return x * vs[0] + y * vs[1] - offsets[s]


class PolarityTable:
    """Per bundle triple i<j<k, whether each vertex/opposite-line side relation negates the sign.

    ``flips[(i, j, k)][pos]`` refers to the line at position ``pos`` of the
    sorted triple against the crossing of the other two lines.  Position 2
    is 0 by definition of the sign.
    """

    def __init__(self, spec: ZonotopeSpec):
        table = triangle_table(spec)
        offsets = _seed_offsets(spec)
        self.flips: dict[tuple[int, int, int], tuple[int, int, int]] = {}
        n = spec.n
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    a, b, c = (table.bundle_start[x] for x in (i, j, k))
                    sign = _crossing_value(spec, table, offsets, a, b, c) > 0
                    rel_b = _crossing_value(spec, table, offsets, a, c, b) > 0
                    rel_a = _crossing_value(spec, table, offsets, b, c, a) > 0
                    self.flips[(i, j, k)] = (int(rel_a != sign), int(rel_b != sign), 0)

    def __getitem__(self, bundles: tuple[int, int, int]) -> tuple[int, int, int]:
        return self.flips[bundles]


class _Arrangement:
    """Per-spec lookup tables shared by all tilings of the spec."""

    def __init__(self, spec: ZonotopeSpec):
        self.spec = spec
        self.table: TriangleTable = triangle_table(spec)
        self.polarity = PolarityTable(spec)
        t = self.table
        n = t.num_lines
        self.T = len(t)
        # side literal of crossing (p, q) w.r.t. line s: (triangle, flip) or (-1, constant)
        lit: dict[tuple[int, int, int], tuple[int, int]] = {}
        for p, q in t.crossings:
            for s in range(n):
                if s == p or s == q:
                    continue
                if t.bundle_of[s] == t.bundle_of[p]:
                    lit[(p, q, s)] = (-1, int(s < p))
                elif t.bundle_of[s] == t.bundle_of[q]:
                    lit[(p, q, s)] = (-1, int(s < q))
                else:
                    tri = tuple(sorted((p, q, s)))
                    flips = self.polarity[tuple(t.bundle_of[x] for x in tri)]
                    lit[(p, q, s)] = (t.index[tri], flips[tri.index(s)])
        self.lit = lit
        others = max(n - 3, 0)
        self.cut_idx = np.full((self.T, max(others, 1), 3), -1, dtype=np.int32)
        self.cut_val = np.zeros((self.T, max(others, 1), 3), dtype=np.uint8)
        self.cut_lists: list[list[tuple[tuple[int, int], ...]]] = []
        for k, (a, b, c) in enumerate(t.triangles):
            rows = []
            j = 0
            for s in range(n):
                if s in (a, b, c):
                    continue
                row = (lit[(a, b, s)], lit[(a, c, s)], lit[(b, c, s)])
                rows.append(row)
                for v, (u, f) in enumerate(row):
                    self.cut_idx[k, j, v] = u
                    self.cut_val[k, j, v] = f
                j += 1
            self.cut_lists.append(rows)
        if others == 0:
            self.cut_idx = self.cut_idx[:, :0, :]
            self.cut_val = self.cut_val[:, :0, :]
        self.words = max(1, (self.T + 63) // 64)


@lru_cache(maxsize=None)
def arrangement(spec: ZonotopeSpec) -> _Arrangement:
    return _Arrangement(spec)


def polarity_table(spec: ZonotopeSpec) -> PolarityTable:
    return arrangement(spec).polarity


# ---------------------------------------------------------------------------
# the Tiling value


@dataclass(frozen=True)
class Tiling:
    spec: ZonotopeSpec
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> total_triangles(self.spec):
            raise TilingError("sign vector longer than the triangle table")

    @property
    def num_triangles(self) -> int:
        return total_triangles(self.spec)

    def sign(self, k: int) -> Sign:
        return Sign.POSITIVE if (self.bits >> k) & 1 else Sign.NEGATIVE

    @property
    def signs(self) -> tuple[Sign, ...]:
        return tuple(self.sign(k) for k in range(self.num_triangles))

    def sign_string(self) -> str:
        return "".join("+" if (self.bits >> k) & 1 else "-" for k in range(self.num_triangles))

    @classmethod
    def from_sign_string(cls, spec: ZonotopeSpec, text: str) -> "Tiling":
        text = text.strip()
        if len(text) != total_triangles(spec) or set(text) - {"+", "-"}:
            raise TilingError(f"expected {total_triangles(spec)} characters from '+-'")
        bits = 0
        for k, ch in enumerate(text):
            if ch == "+":
                bits |= 1 << k
        return cls(spec, bits)

    @classmethod
    def from_signs(cls, spec: ZonotopeSpec, signs: Sequence[Sign]) -> "Tiling":
        return cls.from_sign_string(spec, "".join(s.value for s in signs))

    def dumps(self) -> str:
        return f"zonotope: {self.spec}\n{self.sign_string()}\n"

    @classmethod
    def loads(cls, text: str) -> "Tiling":
        lines = [ln.strip() for ln in text.strip().splitlines()]
        if len(lines) != 2 or not lines[0].startswith("zonotope:"):
            raise TilingError("tiling file needs a 'zonotope:' header and one sign line")
        spec = ZonotopeSpec.parse(lines[0].split(":", 1)[1])
        return cls.from_sign_string(spec, lines[1])

    def __str__(self) -> str:
        return f"Tiling({self.spec}: {self.sign_string()})"


def seed_tiling(spec: ZonotopeSpec) -> Tiling:
    """Tiling dual to a generic straight-line multigrid."""
    table = triangle_table(spec)
    offsets = _seed_offsets(spec)
    bits = 0
    for k, (p, q, s) in enumerate(table.triangles):
        if _crossing_value(spec, table, offsets, p, q, s) > 0:
            bits |= 1 << k
    return Tiling(spec, bits)


def seed_side(spec: ZonotopeSpec, crossing: tuple[int, int], s: int) -> Side:
    """Exact geometric side of a crossing in the seed multigrid (global line indices)."""
    table = triangle_table(spec)
    offsets = _seed_offsets(spec)
    p, q = crossing
    return Side.PLUS if _crossing_value(spec, table, offsets, p, q, s) > 0 else Side.MINUS


# ---------------------------------------------------------------------------
# side and minimality queries (global line indices internally)


def _side_bit(t: Tiling, p: int, q: int, s: int) -> int:
    if p > q:
        p, q = q, p
    u, f = arrangement(t.spec).lit[(p, q, s)]
    if u < 0:
        return f
    return ((t.bits >> u) & 1) ^ f


def side_of(t: Tiling, crossing: tuple[PseudolineRef, PseudolineRef], s: PseudolineRef) -> Side:
    table = triangle_table(t.spec)
    p, q = (table.line(PseudolineRef(*x)) for x in crossing)
    g = table.line(PseudolineRef(*s))
    if table.bundle_of[p] == table.bundle_of[q]:
        raise SpecError("same-bundle pseudolines do not cross")
    if g in (p, q):
        raise SpecError("a pseudoline has no side with respect to itself")
    return Side.PLUS if _side_bit(t, p, q, g) else Side.MINUS


def _is_minimal(t: Tiling, k: int) -> bool:
    bits = t.bits
    for row in arrangement(t.spec).cut_lists[k]:
        vals = [f if u < 0 else ((bits >> u) & 1) ^ f for u, f in row]
        if vals[0] != vals[1] or vals[1] != vals[2]:
            return False
    return True


def _tri(t: Tiling, tri) -> int:
    if isinstance(tri, int):
        if not 0 <= tri < t.num_triangles:
            raise SpecError(f"triangle index {tri} out of range")
        return tri
    return triangle_table(t.spec).triangle_index(tri)


def is_inclusion_minimal(t: Tiling, tri: TriangleRef | int) -> bool:
    """True iff no other pseudoline separates the three vertices of the triangle."""
    return _is_minimal(t, _tri(t, tri))


def minimal_triangles(t: Tiling) -> list[int]:
    from . import _kernels

    return _kernels.bits_to_indices(minimal_mask(t))


def minimal_mask(t: Tiling) -> int:
    from . import _kernels

    arr = arrangement(t.spec)
    words = _kernels.int_to_words(t.bits, arr.words)
    out = np.zeros(arr.words, dtype=np.uint64)
    _kernels.min_mask(words, arr.cut_idx, arr.cut_val, out)
    return _kernels.words_to_int(out)


def flip(t: Tiling, tri: TriangleRef | int) -> Tiling:
    k = _tri(t, tri)
    if not _is_minimal(t, k):
        raise TilingError(f"triangle {triangle_table(t.spec).triangle_ref(k)} is not inclusion-minimal")
    return Tiling(t.spec, t.bits ^ (1 << k))


# ---------------------------------------------------------------------------
# placements and validation


def _plus_counts(t: Tiling) -> tuple[list[tuple[int, int, list[int]]], bool]:
    """Per crossing: coordinates, and whether every plus set is a rank prefix."""
    spec = t.spec
    table = triangle_table(spec)
    out = []
    monotone = True
    for p, q in table.crossings:
        coords = []
        for b, a in enumerate(spec.bundle_sizes):
            if b == table.bundle_of[p]:
                coords.append(table.rank_of[p])
            elif b == table.bundle_of[q]:
                coords.append(table.rank_of[q])
            else:
                start = table.bundle_start[b]
                sides = [_side_bit(t, p, q, start + r) for r in range(a)]
                m = sum(sides)
                if monotone and sides != [1] * m + [0] * (a - m):
                    monotone = False
                coords.append(m)
        out.append((p, q, coords))
    return out, monotone


def placements_from_signs(t: Tiling) -> list[TilePlacement]:
    table = triangle_table(t.spec)
    counts, _ = _plus_counts(t)
    return [TilePlacement((table.line_ref(p), table.line_ref(q)), tuple(c)) for p, q, c in counts]


def _check_placements(spec: ZonotopeSpec, placements: Sequence[TilePlacement]) -> str | None:
    """Reason the placements fail to tile the zonotope, or None."""
    n = spec.n
    if len(placements) != total_tiles(spec):
        return f"expected {total_tiles(spec)} tiles, got {len(placements)}"
    seen = set()
    tiles = []
    for pl in placements:
        p, q = (PseudolineRef(*x) for x in pl.pair)
        i, j = p.bundle - 1, q.bundle - 1
        if len(pl.coords) != n:
            return "coordinate vector has wrong length"
        if not (0 <= i < n and 0 <= j < n) or i == j:
            return "tile pair must use two distinct bundles"
        if i > j:
            i, j, p, q = j, i, q, p
        m = pl.coords
        if m[i] != p.rank - 1 or m[j] != q.rank - 1:
            return f"tile {pl} does not sit on its ribbons"
        for k in range(n):
            top = m[k] + (1 if k in (i, j) else 0)
            if m[k] < 0 or top > spec.bundle_sizes[k]:
                return f"tile {pl} leaves the zonotope"
        key = (i, j, p.rank, q.rank)
        if key in seen:
            return f"crossing {p} {q} placed twice"
        seen.add(key)
        tiles.append((i, j, m))
    if not _interiors_disjoint(spec, tiles):
        return "overlapping tiles"
    return None


def _interiors_disjoint(spec: ZonotopeSpec, tiles) -> bool:
    dirs = spec.directions
    normals = [(-y, x) for x, y in dirs]
    n = len(dirs)
    boxes = []
    for i, j, m in tiles:
        ox = sum(m[k] * dirs[k][0] for k in range(n))
        oy = sum(m[k] * dirs[k][1] for k in range(n))
        corners = [
            (ox, oy),
            (ox + dirs[i][0], oy + dirs[i][1]),
            (ox + dirs[j][0], oy + dirs[j][1]),
            (ox + dirs[i][0] + dirs[j][0], oy + dirs[i][1] + dirs[j][1]),
        ]
        proj = []
        for nx, ny in normals:
            vals = [cx * nx + cy * ny for cx, cy in corners]
            proj.append((min(vals), max(vals)))
        boxes.append((i, j, proj))
    for a in range(len(boxes)):
        ia, ja, pa = boxes[a]
        for b in range(a + 1, len(boxes)):
            ib, jb, pb = boxes[b]
            separated = False
            for k in {ia, ja, ib, jb}:
                if pa[k][1] <= pb[k][0] or pb[k][1] <= pa[k][0]:
                    separated = True
                    break
            if not separated:
                return False
    return True


def validate(t: Tiling) -> bool:
    """Exact check that the sign vector describes a rhombus tiling of its zonotope."""
    if t.bits >> total_triangles(t.spec):
        return False
    counts, monotone = _plus_counts(t)
    if not monotone:
        return False
    table = triangle_table(t.spec)
    placements = [TilePlacement((table.line_ref(p), table.line_ref(q)), tuple(c)) for p, q, c in counts]
    if _check_placements(t.spec, placements) is not None:
        return False
    # the vertex relations must also agree with the placements
    return signs_bits_from_coords(t.spec, counts) == t.bits


def signs_bits_from_coords(spec: ZonotopeSpec, counts) -> int:
    table = triangle_table(spec)
    coords = {(p, q): c for p, q, c in counts}
    bits = 0
    for k, (p, q, s) in enumerate(table.triangles):
        if coords[(p, q)][table.bundle_of[s]] > table.rank_of[s]:
            bits |= 1 << k
    return bits


def signs_from_placements(spec: ZonotopeSpec, placements: Iterable[TilePlacement]) -> Tiling:
    placements = [TilePlacement(tuple(PseudolineRef(*x) for x in pl.pair), tuple(pl.coords)) for pl in placements]
    problem = _check_placements(spec, placements)
    if problem:
        raise TilingError(problem)
    table = triangle_table(spec)
    counts = []
    for pl in placements:
        p, q = (table.line(x) for x in pl.pair)
        if p > q:
            p, q = q, p
        counts.append((p, q, pl.coords))
    return Tiling(spec, signs_bits_from_coords(spec, counts))


def dumps_placements(t: Tiling) -> str:
    return "".join(f"{pl}\n" for pl in placements_from_signs(t))


def loads_placements(text: str) -> list[TilePlacement]:
    return [TilePlacement.parse(ln) for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


# ---------------------------------------------------------------------------
# sub-arrangements and single-line extensions


def restrict(t: Tiling, keep: Sequence[int]) -> tuple[Tiling, list[int]]:
    """Sub-arrangement on the given global lines (deleting ribbons).

    Returns the restricted tiling and the original bundle index of each of
    its bundles.
    """
    table = triangle_table(t.spec)
    keep = sorted(set(keep))
    bundles = sorted({table.bundle_of[g] for g in keep})
    sizes = [sum(1 for g in keep if table.bundle_of[g] == b) for b in bundles]
    sub = ZonotopeSpec(tuple(sizes), tuple(t.spec.directions[b] for b in bundles))
    sub_table = triangle_table(sub)
    bits = 0
    for k, (a, b, c) in enumerate(sub_table.triangles):
        u = table.index[(keep[a], keep[b], keep[c])]
        if (t.bits >> u) & 1:
            bits |= 1 << k
    return Tiling(sub, bits), bundles


def ribbon_orders(t: Tiling) -> list[list[int]]:
    """For each line, the other lines in the order their crossings occur along it.

    A ribbon of bundle b is walked so that lines of later bundles are crossed
    from minus to plus and lines of earlier bundles from plus to minus.
    """
    table = triangle_table(t.spec)
    counts, _ = _plus_counts(t)
    orders: list[list[tuple[int, int]]] = [[] for _ in range(table.num_lines)]
    for p, q, c in counts:
        for a, b in ((p, q), (q, p)):
            ba, bb = table.bundle_of[a], table.bundle_of[b]
            key = sum(c[ba + 1:]) - sum(c[:ba]) - (bb < ba)
            orders[a].append((key, b))
    return [[g for _, g in sorted(o)] for o in orders]


def extensions(t: Tiling, new_spec: ZonotopeSpec, new_line: int, check: bool = True) -> Iterator[Tiling]:
    """All tilings of ``new_spec`` whose deletion of ``new_line`` gives ``t``.

    ``new_spec`` must be ``t.spec`` with one more pseudoline, numbered
    ``new_line`` in the new global order (possibly opening a new bundle).
    """
    old_table = triangle_table(t.spec)
    new_table = triangle_table(new_spec)
    n_old = old_table.num_lines
    if new_table.num_lines != n_old + 1:
        raise SpecError("new spec must have exactly one more pseudoline")
    to_new = [g if g < new_line else g + 1 for g in range(n_old)]
    nb = new_table.bundle_of
    qb = nb[new_line]
    remaining = [new_table.bundle_of[to_new[g]] for g in range(n_old)]
    if [remaining.count(b) for b in sorted(set(remaining))] != list(t.spec.bundle_sizes):
        raise SpecError("new spec does not extend the old one")
    orders = ribbon_orders(t)
    pos = [{h: i for i, h in enumerate(o)} for o in orders]
    free = [g for g in range(n_old) if nb[to_new[g]] != qb]
    # crossings along g after the new line lie on its plus side iff the new
    # bundle comes later than g's bundle
    later = {g: qb > nb[to_new[g]] for g in free}

    def bound(g, h, plus, lo, hi):
        if plus == later[g]:
            hi[g] = min(hi[g], pos[g][h])
        else:
            lo[g] = max(lo[g], pos[g][h] + 1)

    lo = {}
    hi = {}
    for g in free:
        lo[g], hi[g] = 0, len(orders[g])
        for h in orders[g]:
            if nb[to_new[h]] == qb:
                bound(g, h, to_new[h] > new_line, lo, hi)
    arr_new = arrangement(new_spec)
    old_bits = t.bits
    base = 0
    tri_with_line = []
    from_new = {to_new[g]: g for g in range(n_old)}
    for k, (a, b, c) in enumerate(new_table.triangles):
        if new_line in (a, b, c):
            others = [x for x in (a, b, c) if x != new_line]
            flips = arr_new.polarity[(nb[a], nb[b], nb[c])]
            tri_with_line.append((k, from_new[others[0]], from_new[others[1]], flips[(a, b, c).index(new_line)]))
        else:
            inv = [x if x < new_line else x - 1 for x in (a, b, c)]
            if (old_bits >> old_table.index[tuple(inv)]) & 1:
                base |= 1 << k

    cut: dict[int, int] = {}

    def plus_side(g, h):
        return (pos[g][h] >= cut[g]) == later[g]

    def assemble() -> Tiling:
        bits = base
        for k, x, y, f in tri_with_line:
            if plus_side(x, y) ^ f:
                bits |= 1 << k
        return Tiling(new_spec, bits)

    def search(i: int, lo: dict, hi: dict):
        if i == len(free):
            yield assemble()
            return
        g = free[i]
        for c in range(lo[g], hi[g] + 1):
            cut[g] = c
            nlo, nhi = dict(lo), dict(hi)
            ok = True
            for h in free[i + 1:]:
                if h not in pos[g]:
                    continue
                bound(h, g, plus_side(g, h), nlo, nhi)
                if nlo[h] > nhi[h]:
                    ok = False
                    break
            if ok:
                yield from search(i + 1, nlo, nhi)
        cut.pop(g, None)

    if any(lo[g] > hi[g] for g in free):
        return
    for ext in search(0, lo, hi):
        if not check or validate(ext):
            yield ext
