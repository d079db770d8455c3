"""AND/OR proof trees over labelled pseudoline configurations.

A configuration is a small arrangement: one pseudoline per stable id, drawn
from a fixed set of run bundles, given as a concrete tiling ``t1`` of the
sub-zonotope of the bundles present.  Labels mark the inverted triangles;
they always come from a second tiling ``t2 = t1 ^ labels`` of the same
sub-zonotope, so every labelling produced here is exactly consistent.

An AND node distinguishes an inverted triangle that is inclusion-minimal in
its configuration.  Its children are all ways one more pseudoline can cut
that triangle.  The new line is an extreme one of its bundle, and the node's
rule says which: "inner" takes the line closest to the vertex it separates,
so no other line of that bundle crosses the two edge sections between the
vertex and the new line; "outer" takes the one closest to the opposite side,
so no other line of that bundle crosses both sections beyond it.  Both are
complete case splits, so an OR node may pick either rule for each triangle.
An AND node without children is TRUE, because its triangle is then minimal
in every arrangement matching the node.  An OR node has one AND child per
inverted minimal triangle not distinguished before; without any it is FALSE
and its configuration is a counterexample candidate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .core import SpecError, ZonotopeSpec, default_directions, total_triangles, triangle_table
from .space import (
    BudgetExceeded,
    DeficiencyCertificate,
    deficiency_certificate,
    enumerate_space,
    lemma_instances,
    lemma_violations,
    reflect_bundles,
    rotate_bundles,
)
from .tiling import (
    Tiling,
    _is_minimal,
    _side_bit,
    extensions,
    restrict,
    ribbon_orders,
)

INF = float("inf")


@dataclass(frozen=True)
class Weights:
    """Search priority: w_blocked * blocked fraction - w_freedom * freedom + w_depth * depth."""

    blocked: float = 4.0
    freedom: float = 1.0
    depth: float = 0.25


@dataclass(frozen=True)
class RunProfile:
    """Bundle count of a run and optional per-bundle caps on the number of pseudolines."""

    name: str
    caps: tuple[int | None, ...]

    @property
    def n(self) -> int:
        return len(self.caps)

    @property
    def directions(self) -> tuple[tuple[int, int], ...]:
        return default_directions(self.n)

    def cap(self, b: int) -> float:
        c = self.caps[b]
        return INF if c is None else c

    def caps_text(self) -> str:
        return ",".join("-" if c is None else str(c) for c in self.caps)


PROFILES = {
    "3": RunProfile("3", (None,) * 3),
    "4": RunProfile("4", (None,) * 4),
    "5": RunProfile("5", (None,) * 5),
    "5-size1": RunProfile("5-size1", (None, None, None, None, 1)),
    "5-le2": RunProfile("5-le2", (2,) * 5),
}


def run_profile(name: str | int | RunProfile) -> RunProfile:
    if isinstance(name, RunProfile):
        return name
    try:
        return PROFILES[str(name)]
    except KeyError:
        raise SpecError(f"unknown bundle profile {name!r}; choose from {sorted(PROFILES)}") from None


# ---------------------------------------------------------------------------
# configurations

# (bundle, sections): no line of the bundle outside the configuration crosses
# every section.  A section (line, end, end) is the part of `line` between its
# crossings with the two end lines; all entries but the bundle are line ids.
Section = tuple[int, int, int]
Mark = tuple[int, tuple[Section, ...]]
RULES = ("inner", "outer")


def mark_text(m: Mark) -> str:
    return f"{m[0]}:" + ",".join(".".join(map(str, sec)) for sec in m[1])


def parse_mark(text: str) -> Mark:
    b, secs = text.split(":")
    return int(b), tuple(tuple(int(x) for x in sec.split(".")) for sec in secs.split(","))


def mark_lines(m: Mark) -> set[int]:
    return {x for sec in m[1] for x in sec}


@dataclass(frozen=True)
class Configuration:
    profile: RunProfile
    bundles: tuple[int, ...]
    t1: Tiling
    labels: int
    ids: tuple[int, ...]
    marks: frozenset = frozenset()
    history: frozenset = frozenset()
    # ids of a triangle known to be inclusion-minimal among all inverted
    # triangles of the pair: nothing inside its closed region is inverted
    floor: tuple[int, int, int] | None = None

    def __post_init__(self):
        if len(self.ids) != self.t1.spec.num_lines:
            raise SpecError("one id per pseudoline required")
        if self.labels >> total_triangles(self.t1.spec):
            raise SpecError("labels longer than the triangle table")

    @cached_property
    def table(self):
        return triangle_table(self.t1.spec)

    @cached_property
    def t2(self) -> Tiling:
        return Tiling(self.t1.spec, self.t1.bits ^ self.labels)

    @cached_property
    def position(self) -> dict[int, int]:
        return {i: g for g, i in enumerate(self.ids)}

    def bundle_of(self, line_id: int) -> int:
        return self.bundles[self.table.bundle_of[self.position[line_id]]]

    def count(self, b: int) -> int:
        if b not in self.bundles:
            return 0
        return self.t1.spec.bundle_sizes[self.bundles.index(b)]

    def triangle_ids(self, k: int) -> tuple[int, int, int]:
        return tuple(self.ids[g] for g in self.table.triangles[k])

    def triangle_index(self, tri: Iterable[int]) -> int:
        return self.table.tri_of(*(self.position[i] for i in tri))

    def inverted(self, k: int) -> bool:
        return bool((self.labels >> k) & 1)

    def minimal(self, k: int) -> bool:
        return _is_minimal(self.t1, k)

    def inverted_minimal(self) -> list[int]:
        return [k for k in range(len(self.table)) if self.inverted(k) and self.minimal(k)]

    def describe(self) -> str:
        return (
            f"bundles={','.join(map(str, self.bundles))} "
            f"sizes={','.join(map(str, self.t1.spec.bundle_sizes))} "
            f"ids={','.join(map(str, self.ids))} "
            f"t1={self.t1.sign_string() or '.'} "
            f"labels={_mask_text(self.labels, len(self.table))} "
            f"marks={';'.join(mark_text(m) for m in sorted(self.marks)) or '-'} "
            f"hist={';'.join('.'.join(map(str, sorted(h))) for h in sorted(map(sorted, self.history))) or '-'} "
            f"floor={'.'.join(map(str, self.floor)) if self.floor else '-'}"
        )

    def inside_floor(self, k: int, t: Tiling | None = None, ids: Sequence[int] | None = None) -> bool:
        """Whether triangle k lies in the closed region of the floor triangle (and is not it)."""
        t = t or self.t1
        ids = ids or self.ids
        pos = {i: g for g, i in enumerate(ids)}
        return _inside(t, triangle_table(t.spec).triangles[k], [pos[i] for i in self.floor])


def _mask_text(mask: int, n: int) -> str:
    return "".join("+" if (mask >> k) & 1 else "." for k in range(n)) or "-"


def _sub_spec(profile: RunProfile, bundles: Sequence[int], sizes: Sequence[int]) -> ZonotopeSpec:
    dirs = profile.directions
    return ZonotopeSpec(tuple(sizes), tuple(dirs[b] for b in bundles))


@dataclass(frozen=True)
class Insertion:
    """Where a new pseudoline went: run bundle, rank among its bundle in the configuration, id, separated vertex."""

    bundle: int
    rank: int
    line: int
    vertex: tuple[int, int]

    def __str__(self) -> str:
        return f"{self.bundle}:{self.rank}:{self.line}:{self.vertex[0]}.{self.vertex[1]}"

    @classmethod
    def parse(cls, text: str) -> "Insertion":
        b, r, i, v = text.split(":")
        x, y = v.split(".")
        return cls(int(b), int(r), int(i), (int(x), int(y)))


def _slot(config: Configuration, b: int, r: int):
    """Spec, bundles and global index for a new line of run bundle b at rank r."""
    bundles = tuple(sorted(set(config.bundles) | {b}))
    sizes = [config.count(x) + (x == b) for x in bundles]
    spec = _sub_spec(config.profile, bundles, sizes)
    start = sum(sizes[: bundles.index(b)])
    return spec, bundles, start + r


def _vertex_sides(t: Tiling, tri: Sequence[int], s: int) -> list[int]:
    x, y, z = tri
    return [_side_bit(t, x, y, s), _side_bit(t, x, z, s), _side_bit(t, y, z, s)]


def separated_vertex(t: Tiling, tri: Sequence[int], s: int) -> tuple[int, int] | None:
    """The vertex of triangle ``tri`` (global lines) that line s cuts off, or None."""
    sides = _vertex_sides(t, tri, s)
    if sides[0] == sides[1] == sides[2]:
        return None
    x, y, z = tri
    verts = [(x, y), (x, z), (y, z)]
    odd = [v for v, sd in zip(verts, sides) if sides.count(sd) == 1]
    return odd[0]


def _inside(t: Tiling, tri: Sequence[int], outer: Sequence[int]) -> bool:
    if sorted(tri) == sorted(outer):
        return False
    x, y, z = outer
    # vertex of `outer` opposite each of its lines
    opposite = {x: (y, z), y: (x, z), z: (x, y)}
    a, b, c = tri
    for p, q in ((a, b), (a, c), (b, c)):
        for line, (u, v) in opposite.items():
            if line in (p, q):
                continue
            if _side_bit(t, p, q, line) != _side_bit(t, u, v, line):
                return False
    return True


def _crosses_section(t: Tiling, s: int, line: int, e1: int, e2: int) -> bool:
    return _side_bit(t, line, e1, s) != _side_bit(t, line, e2, s)


def _mark_ok(t: Tiling, pos: dict[int, int], marks: Iterable[Mark], b: int, s: int) -> bool:
    for mb, secs in marks:
        if mb == b and all(_crosses_section(t, s, pos[x], pos[e1], pos[e2]) for x, e1, e2 in secs):
            return False
    return True


def _new_marks(rule: str, b: int, tri_ids, a: int, c: int, s: int) -> set:
    """Marks from choosing s, which separates vertex a∩c, as the extreme line of bundle b.

    "inner": s is closest to the vertex, so no other such line crosses a or c
    between the vertex and s.  "outer": s is closest to the opposite side,
    so no other such line crosses both a and c between s and that side.
    """
    (far,) = set(tri_ids) - {a, c}
    if rule == "inner":
        return {(b, ((a, *sorted((c, s))),)), (b, ((c, *sorted((a, s))),))}
    return {(b, tuple(sorted(((a, *sorted((far, s))), (c, *sorted((far, s)))))))}


@lru_cache(maxsize=4096)
def _extension_bits(spec: ZonotopeSpec, bits: int, new_spec: ZonotopeSpec, new_line: int) -> tuple[int, ...]:
    return tuple(e.bits for e in extensions(Tiling(spec, bits), new_spec, new_line, check=False))


def insertions(config: Configuration, tri_ids: Sequence[int], extender=None, rule: str = "outer"):
    """Every legal (Insertion, child configuration) for a line cutting the triangle.

    Children are listed bundle by bundle, then by rank, then in extension
    order; equal (t1, labels) pairs are listed once.
    """
    extender = extender or _extension_bits
    out = []
    for b in range(config.profile.n):
        have = config.count(b)
        if have + 1 > config.profile.cap(b):
            continue
        for r in range(have + 1):
            spec, bundles, g = _slot(config, b, r)
            new_id = max(config.ids) + 1
            ids = config.ids[:g] + (new_id,) + config.ids[g:]
            pos = {i: k for k, i in enumerate(ids)}
            tri = sorted(pos[i] for i in tri_ids)
            firsts = extender(config.t1.spec, config.t1.bits, spec, g)
            seconds = None
            seen = set()
            for e1 in firsts:
                ext = Tiling(spec, e1)
                vert = separated_vertex(ext, tri, g)
                if vert is None or not _mark_ok(ext, pos, config.marks, b, g):
                    continue
                a, c = ids[vert[0]], ids[vert[1]]
                new_marks = _new_marks(rule, b, tri_ids, a, c, new_id)
                if seconds is None:
                    seconds = extender(config.t2.spec, config.t2.bits, spec, g)
                for e2 in seconds:
                    key = (e1, e1 ^ e2)
                    if key in seen:
                        continue
                    seen.add(key)
                    if config.floor and _breaks_floor(config, ext, ids, g, e1 ^ e2):
                        continue
                    child = Configuration(
                        config.profile,
                        bundles,
                        ext,
                        e1 ^ e2,
                        ids,
                        config.marks | new_marks,
                        config.history,
                        config.floor,
                    )
                    out.append((Insertion(b, r, new_id, (a, c)), child))
    return out


def _breaks_floor(config: Configuration, ext: Tiling, ids, g: int, labels: int) -> bool:
    """An inverted triangle through the new line g inside the floor triangle."""
    table = triangle_table(ext.spec)
    pos = {i: k for k, i in enumerate(ids)}
    outer = [pos[i] for i in config.floor]
    for k, tri in enumerate(table.triangles):
        if (labels >> k) & 1 and g in tri and _inside(ext, tri, outer):
            return True
    return False


# ---------------------------------------------------------------------------
# relaxed consistency


def relaxed_consistency(config: Configuration, labels: int | None = None) -> bool:
    """No violated implication of the two cut-triangle lemmas (one-sided filter).

    Kind 1: a line of the third bundle cuts off vertex X∩Y of an inverted
    (X, Y, Z), so (X, Y, S) is inverted.  Kind 2: a line crossing Z does, so
    (X, Y, S) is inverted or both (X, Z, S) and (Y, Z, S) are.
    """
    labels = config.labels if labels is None else labels
    return not lemma_violations(lemma_instances(config.t1), labels)


# ---------------------------------------------------------------------------
# nodes, weights and trees


@dataclass
class ProofNode:
    kind: str  # "AND" or "OR"
    config: Configuration
    triangle: tuple[int, int, int] | None = None  # AND: distinguished triangle (ids)
    insertion: Insertion | None = None  # OR: the line that created it
    parent: int = -1
    depth: int = 0
    id: int = -1
    children: list[int] | None = None
    evaluation: str = "unknown"
    weight: float = 0.0
    pn: float = 1.0
    dn: float = 1.0
    cutoff: bool = False  # too large to expand under the run's line limit
    rule: str = "outer"  # AND: which extreme line of each bundle is inserted

    @property
    def expanded(self) -> bool:
        return self.children is not None


def and_children(node: ProofNode, extender=None) -> list[ProofNode]:
    if node.kind != "AND":
        raise ValueError("and_children needs an AND node")
    return [
        ProofNode("OR", child, insertion=ins, parent=node.id, depth=node.depth + 1)
        for ins, child in insertions(node.config, node.triangle, extender, node.rule)
    ]


def project(config: Configuration, keep: Iterable[int]) -> Configuration:
    """Sub-configuration on the given line ids, with the marks and history they support.

    Forgetting lines only weakens what a node assumes, so a proof for the
    projection is a proof for the original.
    """
    keep = set(keep)
    globals_ = sorted(config.position[i] for i in keep)
    t1, sub = restrict(config.t1, globals_)
    t2, _ = restrict(config.t2, globals_)
    bundles = tuple(config.bundles[b] for b in sub)
    spec = _sub_spec(config.profile, bundles, t1.spec.bundle_sizes)
    return Configuration(
        config.profile,
        bundles,
        Tiling(spec, t1.bits),
        t1.bits ^ t2.bits,
        tuple(config.ids[g] for g in globals_),
        frozenset(m for m in config.marks if _survives(config, m, keep)),
        frozenset(h for h in config.history if h <= keep),
        config.floor,
    )


def _survives(config: Configuration, m: Mark, keep: set[int]) -> bool:
    # a forgotten line violating the mark could come back as a new line
    if not mark_lines(m) <= keep:
        return False
    pos = config.position
    for d in config.ids:
        if d in keep or config.bundle_of(d) != m[0]:
            continue
        if all(_crosses_section(config.t1, pos[d], pos[x], pos[e1], pos[e2]) for x, e1, e2 in m[1]):
            return False
    return True


def local_lines(config: Configuration, tri: Sequence[int]) -> set[int]:
    """The triangle's lines, closed under adding the end lines of marks on kept lines."""
    keep = set(tri) | set(config.floor or ())
    grew = True
    while grew:
        grew = False
        for m in config.marks:
            lines = mark_lines(m)
            if any(sec[0] in keep for sec in m[1]) and not lines <= keep:
                keep |= lines
                grew = True
    return keep


def or_children(node: ProofNode, local: bool = True, rules: Sequence[str] = RULES) -> list[ProofNode]:
    if node.kind != "OR":
        raise ValueError("or_children needs an OR node")
    cfg = node.config
    out = []
    for k in cfg.inverted_minimal():
        tri = cfg.triangle_ids(k)
        key = frozenset(tri)
        if key in cfg.history:
            continue
        child = replace(cfg, history=cfg.history | {key})
        if local:
            child = project(child, local_lines(child, tri))
        for rule in rules:
            out.append(ProofNode("AND", child, triangle=tri, parent=node.id, depth=node.depth + 1, rule=rule))
    return out


def blocked_fraction(config: Configuration, tri_ids: Sequence[int]) -> float:
    """Share of (bundle, side) slots of a triangle that no new line can use.

    A slot is blocked when the side lies on a line of that bundle or a mark
    of that bundle covers the whole side.
    """
    orders = ribbon_orders(config.t1)
    pos = config.position
    blocked = 0
    for side in tri_ids:
        g = pos[side]
        where = {h: i for i, h in enumerate(orders[g])}
        ends = [where[pos[o]] for o in tri_ids if o != side]
        lo, hi = min(ends), max(ends)
        for b in range(config.profile.n):
            if config.bundle_of(side) == b:
                blocked += 1
                continue
            for mb, secs in config.marks:
                if len(secs) != 1:
                    continue
                line, e1, e2 = secs[0]
                if mb == b and line == side:
                    a, c = where[pos[e1]], where[pos[e2]]
                    if min(a, c) <= lo and max(a, c) >= hi:
                        blocked += 1
                        break
    return blocked / (3 * config.profile.n)


def node_weight(node: ProofNode, weights: Weights) -> float:
    cfg = node.config
    tris = range(len(cfg.table))
    freedom = sum(1 for k in tris if cfg.inverted(k) and not cfg.minimal(k))
    if node.kind == "AND":
        frac = blocked_fraction(cfg, node.triangle)
    else:
        fr = [blocked_fraction(cfg, cfg.triangle_ids(k)) for k in cfg.inverted_minimal()]
        frac = max(fr, default=0.0)
    return weights.blocked * frac - weights.freedom * freedom + weights.depth * node.depth


class ProofTree:
    """Nodes of one search tree, indexed by creation order."""

    def __init__(self, profile: RunProfile, root: ProofNode):
        self.profile = profile
        self.nodes: list[ProofNode] = []
        self.root = self.add(root)

    def add(self, node: ProofNode) -> int:
        node.id = len(self.nodes)
        self.nodes.append(node)
        return node.id

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def proved(self) -> bool:
        return self.nodes[self.root].evaluation == "true"

    def stats(self, ids: Iterable[int] | None = None) -> dict:
        ids = list(range(len(self.nodes)) if ids is None else ids)
        leaves = sum(1 for i in ids if not self.nodes[i].children)
        return {"nodes": len(ids), "leaves": leaves}

    def proof_subtree(self) -> list[int]:
        """Node ids of a proof-subtree: all children of AND nodes, the first true child of OR nodes."""
        if not self.proved:
            return []
        out = []
        stack = [self.root]
        while stack:
            i = stack.pop()
            out.append(i)
            node = self.nodes[i]
            kids = node.children or []
            if node.kind == "AND":
                stack.extend(reversed(kids))
            else:
                stack.append(next(c for c in kids if self.nodes[c].evaluation == "true"))
        return sorted(out)

    def false_leaves(self) -> list[ProofNode]:
        return [n for n in self.nodes if n.kind == "OR" and n.children == []]


def evaluate(tree: ProofTree) -> str:
    """Recompute every evaluation bottom-up from the explicit children; returns the root's."""
    for node in reversed(tree.nodes):
        if node.children is None:
            node.evaluation = "unknown"
            continue
        vals = [tree.nodes[c].evaluation for c in node.children]
        if node.kind == "AND":
            node.evaluation = "false" if "false" in vals else "unknown" if "unknown" in vals else "true"
        else:
            node.evaluation = "true" if "true" in vals else "unknown" if "unknown" in vals else "false"
    return tree.nodes[tree.root].evaluation


# ---------------------------------------------------------------------------
# roots


def _triangle_states(profile: RunProfile):
    return [(b, bits) for b in itertools.combinations(range(profile.n), 3) for bits in (0, 1)]


def _image(profile: RunProfile, state, op: str):
    bundles, bits = state
    n = profile.n
    t = Tiling(ZonotopeSpec((1, 1, 1)), bits)
    if op == "reflect":
        return tuple(sorted(n - 1 - b for b in bundles)), reflect_bundles(t).bits
    if 0 in bundles:
        return tuple(b - 1 for b in bundles[1:]) + (n - 1,), rotate_bundles(t).bits
    return tuple(b - 1 for b in bundles), bits


def _symmetries(profile: RunProfile) -> list[str]:
    caps = profile.caps
    ops = []
    if caps[1:] + caps[:1] == caps:
        ops.append("rotate")
    if caps[::-1] == caps:
        ops.append("reflect")
    return ops


def root_states(profile: RunProfile) -> list[tuple[tuple[int, ...], int]]:
    """One (bundle triple, triangle sign) per orbit of the cap-preserving bundle symmetries."""
    ops = _symmetries(profile)
    seen = set()
    reps = []
    for state in _triangle_states(profile):
        if state in seen:
            continue
        reps.append(state)
        todo = [state]
        seen.add(state)
        while todo:
            cur = todo.pop()
            for op in ops:
                img = _image(profile, cur, op)
                if img not in seen:
                    seen.add(img)
                    todo.append(img)
    return reps


def root_node(
    profile: RunProfile, bundles: tuple[int, int, int], bits: int, rule: str = "outer", floor: bool = True
) -> ProofNode:
    spec = _sub_spec(profile, bundles, (1, 1, 1))
    cfg = Configuration(
        profile, bundles, Tiling(spec, bits), 1, (0, 1, 2), frozenset(), frozenset({frozenset((0, 1, 2))}),
        (0, 1, 2) if floor else None,
    )
    return ProofNode("AND", cfg, triangle=(0, 1, 2), rule=rule)


# ---------------------------------------------------------------------------
# proof-number search


@dataclass
class SearchResult:
    profile: RunProfile
    trees: list[ProofTree]
    expansions: int
    status: str  # "proved", "disproved" or "budget"
    candidates: list[ProofNode] = field(default_factory=list)

    @property
    def proved(self) -> bool:
        return self.status == "proved"

    def stats(self) -> dict:
        sub = [t.stats(t.proof_subtree()) for t in self.trees if t.proved]
        return {
            "trees": len(self.trees),
            "expanded": self.expansions,
            "tree_nodes": sum(len(t) for t in self.trees),
            "proof_nodes": sum(s["nodes"] for s in sub),
            "proof_leaves": sum(s["leaves"] for s in sub),
            "candidates": len(self.candidates),
        }


def _pick(tree: ProofTree, kids: list[int], key: str) -> int:
    # smallest proof (or disproof) number, then heavier, then older
    return min(kids, key=lambda c: (getattr(tree.nodes[c], key), -tree.nodes[c].weight, c))


def _update(tree: ProofTree, i: int):
    while i >= 0:
        node = tree.nodes[i]
        kids = [tree.nodes[c] for c in node.children]
        if node.kind == "AND":
            pn = sum(k.pn for k in kids)
            dn = min((k.dn for k in kids), default=INF)
        else:
            pn = min((k.pn for k in kids), default=INF)
            dn = sum(k.dn for k in kids)
        node.pn, node.dn = pn, dn
        node.evaluation = "true" if pn == 0 else "false" if dn == 0 else "unknown"
        i = node.parent


def _expand(
    tree: ProofTree,
    i: int,
    weights: Weights,
    extender=None,
    max_lines: int | None = None,
    rules: Sequence[str] = RULES,
):
    node = tree.nodes[i]
    if max_lines is not None and node.kind == "AND" and node.config.t1.spec.num_lines >= max_lines:
        node.cutoff = True
        node.pn = node.dn = INF
        return
    kids = and_children(node, extender) if node.kind == "AND" else or_children(node, rules=rules)
    node.children = []
    for k in kids:
        k.parent = i
        k.weight = node_weight(k, weights)
        tree.add(k)
        node.children.append(k.id)


def prove_tree(
    tree: ProofTree,
    budget: int,
    weights: Weights = Weights(),
    extender=None,
    max_lines: int | None = None,
    rules: Sequence[str] = RULES,
) -> int:
    """Expand most-proving nodes until the root is decided or ``budget`` expansions are spent.

    AND nodes whose configuration already has ``max_lines`` pseudolines are
    cut off: they can neither prove nor refute their parent.
    """
    spent = 0
    root = tree.nodes[tree.root]
    if root.weight == 0.0:
        root.weight = node_weight(root, weights)
    while root.pn not in (0, INF) and spent < budget:
        i = tree.root
        while tree.nodes[i].expanded:
            node = tree.nodes[i]
            i = _pick(tree, node.children, "pn" if node.kind == "OR" else "dn")
        _expand(tree, i, weights, extender, max_lines, rules)
        spent += 1
        _update(tree, tree.nodes[i].parent if tree.nodes[i].cutoff else i)
    return spent


def search(
    bundle_profile,
    budget: int = 10**5,
    weights: Weights = Weights(),
    max_lines: int | None = 12,
    rules: Sequence[str] = RULES,
    floor: bool = True,
) -> SearchResult:
    """Run one tree per root orbit; budget counts node expansions over all trees."""
    profile = run_profile(bundle_profile)
    trees = []
    spent = 0
    status = "proved"
    for bundles, bits in root_states(profile):
        # the root's own case split may use either rule: grow both trees in
        # turns with doubling slices and keep the first that is decided
        group = [ProofTree(profile, root_node(profile, bundles, bits, rule, floor)) for rule in rules]
        slice_ = 256
        tree = None
        while tree is None and spent < budget:
            open_ = [t for t in group if t.nodes[t.root].pn not in (0, INF)]
            for t in group:
                if t.nodes[t.root].pn == 0:
                    tree = t
            if tree is not None or not open_:
                break
            for t in open_:
                spent += prove_tree(t, min(slice_, budget - spent), weights, max_lines=max_lines, rules=rules)
                if t.nodes[t.root].pn == 0:
                    tree = t
                    break
            slice_ *= 2
        if tree is None:
            # nothing proved: report the tree that got furthest
            tree = min(group, key=lambda t: t.nodes[t.root].pn)
        trees.append(tree)
        root = tree.nodes[tree.root]
        if root.pn != 0:
            status = "disproved" if all(t.nodes[t.root].dn == 0 for t in group) else (
                "exhausted" if all(t.nodes[t.root].pn == INF for t in group) else "budget"
            )
            break
    candidates = [leaf for t in trees for leaf in t.false_leaves()]
    return SearchResult(profile, trees, spent, status, candidates)


# ---------------------------------------------------------------------------
# serialization


HEADER = "zonoflip-proof 1"


def _node_line(node: ProofNode, parent: int) -> str:
    tri = ",".join(map(str, node.triangle)) if node.triangle else "-"
    ins = str(node.insertion) if node.insertion else "-"
    return (
        f"node id={node.id} kind={node.kind} parent={parent if parent >= 0 else '-'} "
        f"eval={node.evaluation} depth={node.depth} tri={tri} ins={ins} rule={node.rule} {node.config.describe()}"
    )


def dumps_proof(result: SearchResult, subtree_only: bool = True) -> str:
    lines = [HEADER, f"profile {result.profile.name} caps={result.profile.caps_text()} status={result.status}"]
    for t, tree in enumerate(result.trees):
        ids = tree.proof_subtree() if subtree_only and tree.proved else range(len(tree))
        lines.append(f"tree {t}")
        for i in ids:
            node = tree.nodes[i]
            lines.append(_node_line(node, node.parent))
    return "\n".join(lines) + "\n"


def dumps_candidates(result: SearchResult) -> str:
    lines = [HEADER, f"profile {result.profile.name} caps={result.profile.caps_text()} status=candidates"]
    for node in result.candidates:
        lines.append(_node_line(node, -1))
    return "\n".join(lines) + "\n"


def _parse_fields(line: str) -> dict[str, str]:
    return dict(tok.split("=", 1) for tok in line.split()[1:])


def _ints(text: str) -> tuple[int, ...]:
    return () if text in ("", "-") else tuple(int(x) for x in text.split(","))


def _parse_config(profile: RunProfile, f: dict[str, str]) -> Configuration:
    bundles = _ints(f["bundles"])
    spec = _sub_spec(profile, bundles, _ints(f["sizes"]))
    t1 = Tiling.from_sign_string(spec, "" if f["t1"] == "." else f["t1"])
    labels = sum(1 << k for k, ch in enumerate(f["labels"]) if ch == "+")
    marks = frozenset() if f["marks"] == "-" else frozenset(parse_mark(m) for m in f["marks"].split(";"))
    hist = frozenset() if f["hist"] == "-" else frozenset(frozenset(map(int, h.split("."))) for h in f["hist"].split(";"))
    floor = None if f.get("floor", "-") == "-" else tuple(int(x) for x in f["floor"].split("."))
    return Configuration(profile, bundles, t1, labels, _ints(f["ids"]), marks, hist, floor)


@dataclass
class ParsedProof:
    profile: RunProfile
    status: str
    trees: list[dict[int, tuple[ProofNode, int]]]


def loads_proof(text: str) -> ParsedProof:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != HEADER:
        raise ValueError("not a proof file")
    head = lines[1].split()
    if head[0] != "profile":
        raise ValueError("missing profile line")
    meta = dict(tok.split("=", 1) for tok in head[2:])
    caps = tuple(None if c == "-" else int(c) for c in meta["caps"].split(","))
    profile = RunProfile(head[1], caps)
    trees: list[dict[int, tuple[ProofNode, int]]] = []
    for ln in lines[2:]:
        if ln.startswith("tree"):
            trees.append({})
            continue
        f = _parse_fields(ln)
        cfg = _parse_config(profile, f)
        tri = _ints(f["tri"]) or None
        ins = None if f["ins"] == "-" else Insertion.parse(f["ins"])
        parent = -1 if f["parent"] == "-" else int(f["parent"])
        node = ProofNode(
            f["kind"], cfg, tri, ins, parent, int(f["depth"]), int(f["id"]), evaluation=f["eval"], rule=f.get("rule", "outer")
        )
        if not trees:
            trees.append({})
        trees[-1][node.id] = (node, parent)
    return ParsedProof(profile, meta.get("status", "?"), trees)


# ---------------------------------------------------------------------------
# independent validation


class _RestrictionExtender:
    """Extensions found by deleting the new line from every tiling of the bigger space.

    Shares nothing with the cut-position search used while proving.  Spaces
    above ``limit`` tilings fall back to geometrically validated extensions.
    """

    def __init__(self, limit: int = 2 * 10**5):
        self.limit = limit
        self.cache: dict = {}

    def __call__(self, spec, bits, new_spec, new_line):
        key = (new_spec, new_line)
        if key not in self.cache:
            try:
                space = enumerate_space(new_spec, node_limit=self.limit)
            except BudgetExceeded:
                self.cache[key] = None
            else:
                keep = [g for g in range(new_spec.num_lines) if g != new_line]
                groups: dict[int, list[int]] = {}
                for t in space:
                    groups.setdefault(restrict(t, keep)[0].bits, []).append(t.bits)
                self.cache[key] = groups
        groups = self.cache[key]
        if groups is None:
            return tuple(e.bits for e in extensions(Tiling(spec, bits), new_spec, new_line, check=True))
        return tuple(groups.get(bits, ()))


def validate_proof(text: str, extender=None) -> list[str]:
    """Re-check a serialized proof-subtree from the file alone; returns the problems found."""
    try:
        proof = loads_proof(text)
    except (ValueError, KeyError, IndexError, SpecError) as exc:
        return [f"unreadable proof: {exc}"]
    extender = extender or _RestrictionExtender()
    problems: list[str] = []
    profile = proof.profile
    covered = set()
    for t, nodes in enumerate(proof.trees):
        roots = [i for i, (_, p) in nodes.items() if p < 0]
        if len(roots) != 1:
            problems.append(f"tree {t}: expected one root, found {len(roots)}")
            continue
        children: dict[int, list[int]] = {i: [] for i in nodes}
        for i, (_, p) in nodes.items():
            if p >= 0:
                if p not in nodes:
                    problems.append(f"tree {t}: node {i} has a missing parent {p}")
                    continue
                children[p].append(i)
        root, _ = nodes[roots[0]]
        cfg = root.config
        if (
            root.kind != "AND"
            or cfg.t1.spec.bundle_sizes != (1, 1, 1)
            or cfg.labels != 1
            or cfg.ids != (0, 1, 2)
            or cfg.marks
            or cfg.history != {frozenset((0, 1, 2))}
            or cfg.floor not in (None, (0, 1, 2))
        ):
            problems.append(f"tree {t}: root is not a single inverted triangle")
        else:
            covered.add((cfg.bundles, cfg.t1.bits))
        for i, (node, _) in nodes.items():
            problems.extend(f"tree {t} node {i}: {m}" for m in _check_node(node, [nodes[c][0] for c in children[i]], extender))
    # the roots must cover every triangle state up to the symmetries
    ops = _symmetries(profile)
    reach = set(covered)
    todo = list(covered)
    while todo:
        cur = todo.pop()
        for op in ops:
            img = _image(profile, cur, op)
            if img not in reach:
                reach.add(img)
                todo.append(img)
    missing = set(_triangle_states(profile)) - reach
    if missing:
        problems.append(f"root triangles not covered: {sorted(missing)}")
    return problems


def _check_node(node: ProofNode, kids: list[ProofNode], extender) -> list[str]:
    cfg = node.config
    out = []
    if node.evaluation != "true":
        out.append("retained node is not true")
    if not relaxed_consistency(cfg):
        out.append("labels violate the cut-triangle implications")
    if any(k.depth != node.depth + 1 for k in kids):
        out.append("child depth mismatch")
    if node.kind == "AND":
        k = cfg.triangle_index(node.triangle)
        if not cfg.inverted(k) or not cfg.minimal(k):
            out.append("distinguished triangle is not inverted and minimal")
        if frozenset(node.triangle) not in cfg.history:
            out.append("distinguished triangle missing from history")
        if node.rule not in RULES:
            out.append(f"unknown insertion rule {node.rule!r}")
            return out
        expected = {
            (ins.bundle, ins.rank, c.t1.bits, c.labels, c.marks)
            for ins, c in insertions(cfg, node.triangle, extender, node.rule)
        }
        got = {(c.insertion.bundle, c.insertion.rank, c.config.t1.bits, c.config.labels, c.config.marks) for c in kids if c.insertion}
        if any(c.kind != "OR" for c in kids):
            out.append("AND child of an AND node")
        if got != expected or len(kids) != len(expected):
            out.append(f"AND children differ from re-derivation ({len(kids)} kept, {len(expected)} derived)")
    elif node.kind == "OR":
        if not kids:
            out.append("OR leaf inside a proof")
        for c in kids:
            if c.kind != "AND":
                out.append("OR child of an OR node")
                continue
            key = frozenset(c.triangle)
            if key in cfg.history:
                out.append("OR child re-distinguishes an earlier triangle")
            if not key <= set(cfg.ids) or not set(c.config.ids) <= set(cfg.ids):
                out.append("OR child uses unknown lines")
                continue
            k = cfg.triangle_index(c.triangle)
            if not cfg.inverted(k) or not cfg.minimal(k):
                out.append("OR child triangle is not inverted and minimal in the parent")
            if not key <= set(c.config.ids) or not set(cfg.floor or ()) <= set(c.config.ids):
                out.append("OR child drops its own triangle or the floor")
                continue
            # the child must be exactly the parent's projection onto its lines
            if project(replace(cfg, history=cfg.history | {key}), c.config.ids) != c.config:
                out.append("OR child is not a projection of the parent")
    else:
        out.append(f"unknown node kind {node.kind!r}")
    return out


# ---------------------------------------------------------------------------
# realizing counterexample candidates


@dataclass
class RealizedPair:
    a: Tiling
    b: Tiling
    lines: tuple[int, ...]
    certificate: DeficiencyCertificate | None


def realize_candidate(config: Configuration, spec: ZonotopeSpec, budget: int = 10**7, space=None) -> RealizedPair | None:
    """Find tilings (a, b) of ``spec`` whose inverted set is exactly the candidate's labels.

    Pseudolines of the candidate are identified with order-preserving choices
    of lines of ``spec`` in the same bundles.  Returns None when no choice
    works; raises BudgetExceeded after ``budget`` tiling checks.
    """
    profile = config.profile
    if spec.n != profile.n:
        raise SpecError("candidate and spec have different bundle counts")
    space = space or enumerate_space(spec)
    members = {t.bits for t in space}
    table = triangle_table(spec)
    ctable = config.table
    choices = []
    for b in range(profile.n):
        k = config.count(b)
        if k > spec.bundle_sizes[b]:
            return None
        start = table.bundle_start[b]
        choices.append([tuple(start + r for r in c) for c in itertools.combinations(range(spec.bundle_sizes[b]), k)])
    work = 0
    for pick in itertools.product(*choices):
        keep = [g for part in pick for g in part]
        # candidate triangle k -> spec triangle on the chosen lines
        lifted = 0
        for k, tri in enumerate(ctable.triangles):
            if (config.labels >> k) & 1:
                lifted |= 1 << table.tri_of(*(keep[g] for g in tri))
        for t in space:
            work += 1
            if work > budget:
                raise BudgetExceeded(f"realization budget of {budget} checks exceeded")
            if restrict(t, keep)[0].bits != config.t1.bits:
                continue
            if t.bits ^ lifted in members:
                b = Tiling(spec, t.bits ^ lifted)
                return RealizedPair(t, b, tuple(keep), deficiency_certificate(t, b) if lifted else None)
    return None
