import re

import pytest
from shapely.geometry import Polygon
from shapely.ops import unary_union

from zonoflip.cli import main
from zonoflip.core import ZonotopeSpec, render_directions
from zonoflip.render import midline_segments, tile_polygons, to_svg
from zonoflip.space import enumerate_space
from zonoflip.tiling import Tiling, seed_tiling


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def space_file(tmp_path):
    path = tmp_path / "space.txt"
    assert main(["enum", "2,2,2", "-o", str(path)]) == 0
    return path


def test_count(capsys):
    assert run(capsys, "count", "1,1,1") == (0, "2\n", "")
    assert run(capsys, "count", "1,1,1,1,1,1")[1] == "908\n"


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "count", "1,x")[0] == 2
    assert run(capsys, "count", "2,2,2,2", "--node-limit", "10")[0] == 3
    assert run(capsys, "dist", str(tmp_path / "missing"), str(tmp_path / "missing"))[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "count", "1,1,1", "--node-limit", "0")[0] == 2


def test_enum_round_trip(space_file, capsys):
    rows = space_file.read_text().splitlines()
    assert rows[0] == "zonotope: 2,2,2" and len(rows) == 21
    assert run(capsys, "validate", str(space_file))[0] == 0


def test_validate_rejects_non_tilings(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("zonotope: 1,1,1,1\n+-+-\n")
    good = {t.sign_string() for t in enumerate_space(ZonotopeSpec((1, 1, 1, 1)))}
    assert ("+-+-" in good) == (run(capsys, "validate", str(path))[0] == 0)


def test_dist_identical_and_witness(space_file, capsys):
    code, out, _ = run(capsys, "dist", str(space_file), str(space_file))
    assert code == 0 and "hamming 0" in out and "flip 0" in out
    code, out, _ = run(capsys, "dist", str(space_file), str(space_file), "--index-b", "7", "--witness")
    h = int(re.search(r"hamming (\d+)", out).group(1))
    f = int(re.search(r"^flip (\d+)$", out, re.M).group(1))
    assert f >= h and (f - h) % 2 == 0 and "parity ok" in out
    assert len(re.findall(r"^flip \(", out, re.M)) == f
    code, out, _ = run(capsys, "dist", str(space_file), str(space_file), "--index-b", "7", "--csv")
    assert out.splitlines()[0] == "hamming,flip,parity_ok,deficient"


def test_dist_spec_mismatch(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_text(seed_tiling(ZonotopeSpec((1, 1, 1))).dumps())
    b.write_text(seed_tiling(ZonotopeSpec((2, 1, 1))).dumps())
    assert run(capsys, "dist", str(a), str(b))[0] == 2


def test_certify_adjacent_pair(tmp_path, capsys):
    t = seed_tiling(ZonotopeSpec((2, 2, 2)))
    from zonoflip.tiling import flip, minimal_triangles

    u = flip(t, minimal_triangles(t)[0])
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_text(t.dumps())
    b.write_text(u.dumps())
    code, out, _ = run(capsys, "certify", str(a), str(b))
    assert code == 1 and "no certificate" in out


def test_certify_deficient_pair(tmp_path, capsys):
    assert main(["search", "1,1,1,1,1,1", "-o", str(tmp_path / "c.csv"), "--dump-dir", str(tmp_path / "pairs")]) == 0
    rows = (tmp_path / "c.csv").read_text().splitlines()
    assert len(rows) == 33
    capsys.readouterr()
    code, out, _ = run(capsys, "certify", str(tmp_path / "pairs" / "pair0_a.tiling"), str(tmp_path / "pairs" / "pair0_b.tiling"))
    assert code == 0 and "flip >=" in out and "triangle" in out


def test_search_on_equal_space_is_empty(capsys):
    code, out, _ = run(capsys, "search", "2,2,2")
    assert code == 0
    assert out.splitlines() == ["pair_id,tiling_a_file,tiling_b_file,hamming,flip,certified_side,isometry_class"]


def test_convert_round_trip(tmp_path, capsys):
    t = enumerate_space(ZonotopeSpec((2, 1, 2, 1))).tiling(9)
    src, mid, back = tmp_path / "t", tmp_path / "p", tmp_path / "b"
    src.write_text(t.dumps())
    assert main(["convert", str(src), "-o", str(mid)]) == 0
    assert main(["convert", str(mid), "-o", str(back)]) == 0
    assert Tiling.loads(back.read_text()) == t
    # rendering accepts placement files too
    assert main(["render", str(mid), "-o", str(tmp_path / "x.svg")]) == 0


def test_prove_three_bundles(tmp_path, capsys):
    out_file = tmp_path / "proof.txt"
    code, out, _ = run(capsys, "prove", "--bundles", "3", "--no-floor", "-o", str(out_file), "--weights", "4,1,0.25")
    assert code == 0 and "validator ok" in out
    assert run(capsys, "validate", str(out_file))[0] == 0
    assert run(capsys, "prove", "--bundles", "4", "--budget", "3")[0] == 3
    assert run(capsys, "prove", "--weights", "1,2")[0] == 2


def test_render_is_deterministic(space_file, tmp_path, capsys):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for path in (a, b):
        assert main(["render", str(space_file), "--index", "3", "-o", str(path)]) == 0
    assert a.read_text() == b.read_text()
    assert a.read_text().startswith("<svg") and a.read_text().count("<polygon") == 12


@pytest.mark.parametrize("sizes", [(2, 2, 2), (2, 1, 2, 1), (1,) * 5])
def test_tiles_cover_the_zonotope(sizes):
    spec = ZonotopeSpec(sizes)
    dirs = render_directions(spec.n)
    area = sum(
        sizes[i] * sizes[j] * abs(dirs[i][0] * dirs[j][1] - dirs[i][1] * dirs[j][0])
        for i in range(spec.n)
        for j in range(i + 1, spec.n)
    )
    for t in list(enumerate_space(spec))[:40]:
        polys = [Polygon(cs) for _, cs in tile_polygons(t)]
        assert sum(p.area for p in polys) == pytest.approx(area)
        assert unary_union(polys).area == pytest.approx(area)
        # one midline piece per tile and bundle of the tile
        assert len(midline_segments(t)) == 2 * len(polys)


def test_svg_without_pseudolines():
    svg = to_svg(seed_tiling(ZonotopeSpec((1, 1, 1))), pseudolines=False)
    assert "<line" not in svg and svg.count("<polygon") == 3
