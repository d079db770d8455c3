import pytest
from hypothesis import given
from hypothesis import strategies as st

from zonoflip.core import (
    PseudolineRef,
    SpecError,
    ZonotopeSpec,
    cross,
    default_directions,
    render_directions,
    total_tiles,
    total_triangles,
    triangle_index,
    triangle_ref,
    triangle_table,
)


def test_parse_and_str():
    spec = ZonotopeSpec.parse(" 2, 2,1 ")
    assert spec.bundle_sizes == (2, 2, 1)
    assert str(spec) == "2,2,1"
    assert spec.n == 3 and spec.num_lines == 5


@pytest.mark.parametrize("bad", ["", "a,b", "1,0", "2,-1"])
def test_bad_specs(bad):
    with pytest.raises(SpecError):
        ZonotopeSpec.parse(bad)


def test_directions_must_turn_counter_clockwise():
    with pytest.raises(SpecError):
        ZonotopeSpec((1, 1), ((1, 0), (-1, 0)))
    with pytest.raises(SpecError):
        ZonotopeSpec((1, 1), ((0, 1), (1, 1)))


@pytest.mark.parametrize("n", range(1, 9))
def test_default_directions_increase_in_angle(n):
    dirs = default_directions(n)
    assert all(cross(dirs[i], dirs[j]) > 0 for i in range(n) for j in range(i + 1, n))
    assert len(render_directions(n)) == n


def test_triangle_counts():
    assert total_triangles(ZonotopeSpec((1, 1, 1))) == 1
    assert total_triangles(ZonotopeSpec((2, 2, 2))) == 8
    assert total_triangles(ZonotopeSpec((2, 2, 2, 2, 2))) == 80
    assert total_triangles(ZonotopeSpec((1,) * 6)) == 20
    assert total_tiles(ZonotopeSpec((2, 2, 2))) == 12


@given(st.lists(st.integers(1, 3), min_size=1, max_size=6))
def test_triangle_table_matches_count(sizes):
    spec = ZonotopeSpec(tuple(sizes))
    table = triangle_table(spec)
    assert len(table) == total_triangles(spec)
    for k, (p, q, s) in enumerate(table.triangles):
        assert p < q < s
        assert len({table.bundle_of[x] for x in (p, q, s)}) == 3
        assert table.tri_of(s, p, q) == k


def test_triangle_refs_round_trip():
    spec = ZonotopeSpec((2, 1, 2))
    for k in range(total_triangles(spec)):
        ref = triangle_ref(spec, k)
        assert triangle_index(spec, ref) == k
        assert triangle_index(spec, (ref.third, ref.first, ref.second)) == k


def test_triangle_errors():
    spec = ZonotopeSpec((2, 1, 1))
    with pytest.raises(SpecError):
        triangle_index(spec, (PseudolineRef(1, 1), PseudolineRef(1, 2), PseudolineRef(2, 1)))
    with pytest.raises(SpecError):
        triangle_index(spec, (PseudolineRef(1, 3), PseudolineRef(2, 1), PseudolineRef(3, 1)))
    with pytest.raises(SpecError):
        triangle_ref(spec, 99)
