import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import sweep_tilings, triangle_signs
from zonoflip.core import PseudolineRef, SpecError, ZonotopeSpec, total_triangles, triangle_table
from zonoflip.tiling import (
    Side,
    Sign,
    Tiling,
    TilingError,
    dumps_placements,
    extensions,
    flip,
    is_inclusion_minimal,
    loads_placements,
    minimal_mask,
    minimal_triangles,
    placements_from_signs,
    restrict,
    ribbon_orders,
    seed_tiling,
    side_of,
    signs_from_placements,
    validate,
)

SMALL = [(1, 1, 1), (2, 1, 1), (2, 2, 2), (1, 1, 1, 1), (2, 1, 2, 1), (1, 1, 1, 1, 1), (3, 2, 2)]


@pytest.mark.parametrize("sizes", SMALL + [(2, 2, 2, 2, 2), (1,) * 7, (3, 2, 2, 2, 2)])
def test_seed_is_valid(sizes):
    assert validate(seed_tiling(ZonotopeSpec(sizes)))


@pytest.mark.parametrize("sizes", [(1, 1, 1), (2, 2, 2), (2, 1, 2, 1), (1, 1, 1, 1, 1)])
def test_space_matches_placement_oracle(sizes, space_of):
    """Sign vectors read off swept tile placements are exactly the enumerated space."""
    oracle = {triangle_signs(tiles, sizes) for tiles in sweep_tilings(sizes)}
    ours = {tuple(s is Sign.POSITIVE for s in t.signs) for t in space_of(*sizes)}
    assert ours == oracle


@pytest.mark.parametrize("sizes", SMALL)
def test_placements_round_trip(sizes, space_of):
    spec = ZonotopeSpec(sizes)
    for t in space_of(*sizes):
        text = dumps_placements(t)
        assert signs_from_placements(spec, loads_placements(text)) == t


def test_overlapping_placements_rejected():
    t = seed_tiling(ZonotopeSpec((2, 2, 2)))
    pls = placements_from_signs(t)
    bad = [pls[0]._replace(coords=pls[1].coords if pls[1].coords != pls[0].coords else (9, 9, 9))] + pls[1:]
    with pytest.raises(TilingError):
        signs_from_placements(t.spec, bad)


def test_validate_brute_force_on_four_lines(space_of):
    spec = ZonotopeSpec((1, 1, 1, 1))
    reachable = {t.bits for t in space_of(1, 1, 1, 1)}
    accepted = {bits for bits in range(1 << total_triangles(spec)) if validate(Tiling(spec, bits))}
    assert accepted == reachable
    assert len(accepted) == 8


def test_sign_strings():
    spec = ZonotopeSpec((2, 1, 1))
    t = Tiling.from_sign_string(spec, "+-")
    assert t.sign(0) is Sign.POSITIVE and t.sign(1) is Sign.NEGATIVE
    assert Tiling.loads(t.dumps()) == t
    assert Tiling.from_signs(spec, t.signs) == t
    for bad in ("+", "+-+", "+x"):
        with pytest.raises(TilingError):
            Tiling.from_sign_string(spec, bad)
    with pytest.raises(TilingError):
        Tiling.loads("+-\n")


def test_flip_needs_minimal_triangle(space_of):
    for t in space_of(2, 2, 2):
        mins = set(minimal_triangles(t))
        assert mins == {k for k in range(t.num_triangles) if is_inclusion_minimal(t, k)}
        assert minimal_mask(t) == sum(1 << k for k in mins)
        for k in range(t.num_triangles):
            if k in mins:
                assert validate(flip(t, k))
            else:
                with pytest.raises(TilingError):
                    flip(t, k)


def test_side_of_queries():
    t = seed_tiling(ZonotopeSpec((1, 1, 1)))
    a, b, c = PseudolineRef(1, 1), PseudolineRef(2, 1), PseudolineRef(3, 1)
    expected = Side.PLUS if t.sign(0) is Sign.POSITIVE else Side.MINUS
    assert side_of(t, (a, b), c) is expected
    assert side_of(flip(t, 0), (a, b), c) is not expected
    with pytest.raises(SpecError):
        side_of(t, (a, b), a)


def test_restriction_lands_in_subspace(space_of):
    spec = ZonotopeSpec((2, 2, 2))
    sub = {t.bits for t in space_of(2, 2, 1)}
    for t in space_of(2, 2, 2):
        r, bundles = restrict(t, [0, 1, 2, 3, 4])
        assert bundles == [0, 1, 2] and r.spec.bundle_sizes == (2, 2, 1)
        assert r.bits in sub
    assert spec.num_lines == 6


@pytest.mark.parametrize(
    "old, new, line, expected",
    [
        ((2, 2, 2), (2, 2, 2, 1), 6, 480),
        ((2, 1, 1, 1), (2, 2, 1, 1), 2, 75),
        ((2, 1, 1, 1), (2, 2, 1, 1), 3, 75),
        ((1,) * 5, (2, 1, 1, 1, 1), 0, 268),
        ((1,) * 4, (1,) * 5, 4, 62),
        ((1,) * 5, (1,) * 6, 5, 908),
    ],
)
def test_extensions_are_exact(old, new, line, expected, space_of):
    """Extensions of all tilings partition the bigger space."""
    new_spec = ZonotopeSpec(new)
    target = {t.bits for t in space_of(*new)}
    seen = []
    for t in space_of(*old):
        exts = list(extensions(t, new_spec, line))
        keep = [g for g in range(new_spec.num_lines) if g != line]
        for e in exts:
            assert restrict(e, keep)[0].bits == t.bits
        seen.extend(e.bits for e in exts)
    assert len(seen) == len(set(seen)) == expected
    assert set(seen) == target


@pytest.mark.parametrize("sizes", [(2, 2, 2), (2, 1, 2, 1)])
def test_ribbon_orders_list_every_crossing_once(sizes, space_of):
    table = triangle_table(ZonotopeSpec(sizes))
    for t in space_of(*sizes):
        for g, order in enumerate(ribbon_orders(t)):
            others = [h for h in range(table.num_lines) if table.bundle_of[h] != table.bundle_of[g]]
            assert sorted(order) == others


def test_ribbon_order_agrees_with_sides(space_of):
    """Along line a, s (of a later bundle) lies before q iff crossing a∩q is on the plus side of s."""
    table = triangle_table(ZonotopeSpec((1, 1, 1, 1)))
    for t in space_of(1, 1, 1, 1):
        for a, order in enumerate(ribbon_orders(t)):
            for x, y in itertools.combinations(order, 2):
                for s, q, before in ((x, y, True), (y, x, False)):
                    if table.bundle_of[s] == table.bundle_of[q]:
                        continue
                    ref = lambda g: table.line_ref(g)  # noqa: E731
                    plus = side_of(t, (ref(a), ref(q)), ref(s)) is Side.PLUS
                    later = table.bundle_of[s] > table.bundle_of[a]
                    assert plus == (before == later)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_random_flip_walks_stay_valid(seed):
    rng = random.Random(seed)
    t = seed_tiling(ZonotopeSpec((2, 2, 1, 1)))
    for _ in range(15):
        t = flip(t, rng.choice(minimal_triangles(t)))
    assert validate(t)
    assert signs_from_placements(t.spec, placements_from_signs(t)) == t
