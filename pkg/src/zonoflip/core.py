"""Bundles, pseudolines and triangles of a zonotope (a1, ..., an).

Pseudolines are numbered globally in (bundle, rank) order.  Bundles and
ranks are 1-based in the public types and 0-based in the dense tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple, Sequence

MAX_BUNDLES = 16
MAX_TRIANGLES = 2**31


class SpecError(ValueError):
    """Raised for malformed zonotope specs or out-of-range references."""


def default_directions(n: int) -> tuple[tuple[int, int], ...]:
    """Exact integer directions with strictly increasing angles in the upper half-plane."""
    if n < 1:
        raise SpecError("need at least one bundle")
    return tuple((n - 1 - 2 * k, n) for k in range(n))


def render_directions(n: int) -> tuple[tuple[float, float], ...]:
    """Unit vectors at angles k*pi/n; for drawing only."""
    return tuple((math.cos(k * math.pi / n), math.sin(k * math.pi / n)) for k in range(n))


def cross(u: Sequence[int], v: Sequence[int]) -> int:
    return u[0] * v[1] - u[1] * v[0]


@dataclass(frozen=True)
class ZonotopeSpec:
    bundle_sizes: tuple[int, ...]
    directions: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        sizes = tuple(int(a) for a in self.bundle_sizes)
        object.__setattr__(self, "bundle_sizes", sizes)
        n = len(sizes)
        if n < 1:
            raise SpecError("need at least one bundle")
        if n > MAX_BUNDLES:
            raise SpecError(f"at most {MAX_BUNDLES} bundles supported")
        if any(a < 1 for a in sizes):
            raise SpecError(f"bundle sizes must be positive: {sizes}")
        if not self.directions:
            object.__setattr__(self, "directions", default_directions(n))
        dirs = tuple((int(x), int(y)) for x, y in self.directions)
        object.__setattr__(self, "directions", dirs)
        if len(dirs) != n:
            raise SpecError("one direction per bundle required")
        # increasing angle inside an open half-plane <=> every later vector is
        # strictly counter-clockwise of every earlier one
        for i in range(n):
            for j in range(i + 1, n):
                if cross(dirs[i], dirs[j]) <= 0:
                    raise SpecError("directions must be non-collinear with strictly increasing angles")
        if total_triangles(self) >= MAX_TRIANGLES:
            raise SpecError("too many triangles")

    @classmethod
    def parse(cls, text: str) -> "ZonotopeSpec":
        try:
            sizes = tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok != "")
        except ValueError as exc:
            raise SpecError(f"cannot parse zonotope spec {text!r}") from exc
        return cls(sizes)

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.bundle_sizes)

    @property
    def n(self) -> int:
        return len(self.bundle_sizes)

    @property
    def num_lines(self) -> int:
        return sum(self.bundle_sizes)


class PseudolineRef(NamedTuple):
    bundle: int
    rank: int

    def __str__(self) -> str:
        return f"{self.bundle}.{self.rank}"

    @classmethod
    def parse(cls, text: str) -> "PseudolineRef":
        b, r = text.split(".")
        return cls(int(b), int(r))


class TriangleRef(NamedTuple):
    first: PseudolineRef
    second: PseudolineRef
    third: PseudolineRef

    def __str__(self) -> str:
        return f"({self.first},{self.second},{self.third})"


def total_triangles(spec: ZonotopeSpec) -> int:
    # elementary symmetric polynomial e3 of the bundle sizes
    e0, e1, e2, e3 = 1, 0, 0, 0
    for a in spec.bundle_sizes:
        e3 += e2 * a
        e2 += e1 * a
        e1 += e0 * a
    return e3


def total_tiles(spec: ZonotopeSpec) -> int:
    s = sum(spec.bundle_sizes)
    return (s * s - sum(a * a for a in spec.bundle_sizes)) // 2


class TriangleTable:
    """Dense lexicographic indexing of lines, crossings and triangles of a spec."""

    def __init__(self, spec: ZonotopeSpec):
        self.spec = spec
        lines = []
        for b, a in enumerate(spec.bundle_sizes):
            for r in range(a):
                lines.append((b, r))
        self.lines: tuple[tuple[int, int], ...] = tuple(lines)
        self.bundle_of = tuple(b for b, _ in lines)
        self.rank_of = tuple(r for _, r in lines)
        starts, acc = [], 0
        for a in spec.bundle_sizes:
            starts.append(acc)
            acc += a
        self.bundle_start = tuple(starts)
        n = len(lines)
        tris = []
        for p in range(n):
            for q in range(p + 1, n):
                if self.bundle_of[q] == self.bundle_of[p]:
                    continue
                for s in range(q + 1, n):
                    if self.bundle_of[s] != self.bundle_of[q]:
                        tris.append((p, q, s))
        self.triangles: tuple[tuple[int, int, int], ...] = tuple(tris)
        self.index: dict[tuple[int, int, int], int] = {t: k for k, t in enumerate(tris)}
        self.crossings: tuple[tuple[int, int], ...] = tuple(
            (p, q) for p in range(n) for q in range(p + 1, n) if self.bundle_of[p] != self.bundle_of[q]
        )

    def __len__(self) -> int:
        return len(self.triangles)

    @property
    def num_lines(self) -> int:
        return len(self.lines)

    def line(self, ref: PseudolineRef) -> int:
        b, r = ref
        if not (1 <= b <= self.spec.n) or not (1 <= r <= self.spec.bundle_sizes[b - 1]):
            raise SpecError(f"pseudoline {ref} out of range for {self.spec}")
        return self.bundle_start[b - 1] + r - 1

    def line_ref(self, g: int) -> PseudolineRef:
        return PseudolineRef(self.bundle_of[g] + 1, self.rank_of[g] + 1)

    def triangle_index(self, tri: Sequence[PseudolineRef]) -> int:
        key = tuple(sorted(self.line(PseudolineRef(*p)) for p in tri))
        try:
            return self.index[key]
        except KeyError:
            raise SpecError(f"{tri} is not a triangle: bundles must be pairwise distinct") from None

    def triangle_ref(self, k: int) -> TriangleRef:
        if not 0 <= k < len(self.triangles):
            raise SpecError(f"triangle index {k} out of range")
        return TriangleRef(*(self.line_ref(g) for g in self.triangles[k]))

    def tri_of(self, a: int, b: int, c: int) -> int:
        """Index of the triangle on three global lines given in any order."""
        return self.index[tuple(sorted((a, b, c)))]

    @cached_property
    def tri_lookup(self) -> dict[frozenset, int]:
        return {frozenset(t): k for k, t in enumerate(self.triangles)}


@lru_cache(maxsize=None)
def triangle_table(spec: ZonotopeSpec) -> TriangleTable:
    return TriangleTable(spec)


def triangle_index(spec: ZonotopeSpec, tri: Sequence[PseudolineRef]) -> int:
    return triangle_table(spec).triangle_index(tri)


def triangle_ref(spec: ZonotopeSpec, k: int) -> TriangleRef:
    return triangle_table(spec).triangle_ref(k)
