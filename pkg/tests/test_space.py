import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import bfs, count_tilings_by_sweep, flip_graph, sweep_tilings, triangle_signs
from zonoflip.core import ZonotopeSpec
from zonoflip.space import (
    BudgetExceeded,
    SpecMismatch,
    TilingSpace,
    census_csv,
    check_lemma_config1,
    check_lemma_config2,
    count_tilings,
    deficiency_certificate,
    enumerate_space,
    flip_distance,
    greedy_reduce,
    hamming_distance,
    inverted_triangles,
    isometry_classes,
    lemma_instances,
    lemma_violations,
    predicts_equality,
    replay,
    search_deficient_pairs,
    symmetry_images,
    uncertified_pair_count,
    verify_equality,
)
from zonoflip.tiling import Tiling, is_inclusion_minimal, seed_tiling, validate


@pytest.mark.parametrize("sizes", [(1, 1, 1), (1, 1, 1, 1), (2, 2, 2), (1,) * 5, (2, 1, 1, 1), (3, 1, 2)])
def test_counts_match_sweep_oracle(sizes):
    assert count_tilings(ZonotopeSpec(sizes)) == count_tilings_by_sweep(sizes)


def test_flip_graph_matches_hexagon_oracle(space_of):
    sizes = (1,) * 6
    space = space_of(*sizes)
    tilings = sweep_tilings(sizes)
    graph = flip_graph(tilings, 6)
    assert len(tilings) == len(space) == 908
    assert sum(map(len, graph.values())) == len(space.flip_graph[1]) == 4288
    # distances from one tiling, compared through the sign vectors
    src = next(iter(tilings))
    d_oracle = bfs(graph, src)
    signs = {t: sum(1 << k for k, s in enumerate(triangle_signs(t, sizes)) if s) for t in tilings}
    i = space.index_of(Tiling(space.spec, signs[src]))
    d_ours = space.distances_from(i)
    for t, d in d_oracle.items():
        assert d_ours[space.index_of(Tiling(space.spec, signs[t]))] == d


@pytest.mark.parametrize("sizes", [(2, 2, 2), (1,) * 5, (2, 2, 1, 1)])
def test_space_is_connected_and_valid(sizes, space_of):
    space = space_of(*sizes)
    assert space.is_connected()
    assert all(validate(t) for t in list(space)[:200])


def test_node_limit_raises_with_partial():
    with pytest.raises(BudgetExceeded) as info:
        enumerate_space(ZonotopeSpec((2, 2, 2, 2)), node_limit=50)
    assert info.value.partial is not None and not info.value.partial.complete


def test_space_dump_round_trip(space_of):
    space = space_of(2, 2, 2)
    back = TilingSpace.loads(space.dumps())
    assert [t.bits for t in back] == [t.bits for t in space]
    assert seed_tiling(space.spec) in back


def test_spec_mismatch():
    a = seed_tiling(ZonotopeSpec((1, 1, 1)))
    b = seed_tiling(ZonotopeSpec((2, 1, 1)))
    with pytest.raises(SpecMismatch):
        hamming_distance(a, b)


def _pairs(space, count, seed):
    rng = random.Random(seed)
    n = len(space)
    return [(space.tiling(rng.randrange(n)), space.tiling(rng.randrange(n))) for _ in range(count)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_distance_invariants(seed):
    from conftest import _SPACES

    space = _SPACES.get((2, 2, 1, 1)) or enumerate_space(ZonotopeSpec((2, 2, 1, 1)))
    _SPACES[(2, 2, 1, 1)] = space
    (a, b), = _pairs(space, 1, seed)
    rep = flip_distance(a, b)
    assert rep.flip >= rep.hamming and (rep.flip - rep.hamming) % 2 == 0
    assert (rep.flip == 0) == (rep.hamming == 0) == (a == b)
    assert replay(a, rep.path) == b
    assert inverted_triangles(a, b) == inverted_triangles(b, a)
    assert len(inverted_triangles(a, b)) == rep.hamming


def test_search_methods_agree_with_bfs(space_of):
    space = space_of(1, 1, 1, 1, 1)
    for i in range(0, len(space), 7):
        dist = space.distances_from(i)
        for j in range(len(space)):
            a, b = space.tiling(i), space.tiling(j)
            for method in ("astar", "bfs", "bidirectional"):
                rep = flip_distance(a, b, method)
                assert rep.flip == dist[j]
                assert replay(a, rep.path) == b


def test_unknown_method():
    t = seed_tiling(ZonotopeSpec((1, 1, 1)))
    with pytest.raises(ValueError):
        flip_distance(t, t, "dijkstra")


def test_greedy_on_equal_distance_space(space_of):
    space = space_of(2, 2, 2)
    for a in space:
        for b in space:
            steps, reached = greedy_reduce(a, b)
            assert reached and steps == hamming_distance(a, b)


def test_certificates_imply_gap(space_of):
    space = space_of(*(1,) * 6)
    census = search_deficient_pairs(space.spec, space=space)
    pairs = [(e.a, e.b) for e in census] + _pairs(space, 500, 1)
    found = 0
    for a, b in pairs:
        if a == b:
            with pytest.raises(ValueError):
                deficiency_certificate(a, b)
            continue
        cert = deficiency_certificate(a, b)
        if cert is not None:
            found += 1
            assert flip_distance(a, b).flip >= cert.lower_bound
            certified = a if cert.side == "a" else b
            assert all(is_inclusion_minimal(certified, tri) for tri in cert.minimal)
            assert "triangle" in cert.table()
    assert found >= len(census) > 0


def test_adjacent_pair_has_no_certificate(space_of):
    space = space_of(2, 2, 2)
    indptr, indices, _ = space.flip_graph
    assert deficiency_certificate(space.tiling(0), space.tiling(int(indices[indptr[0]]))) is None


@pytest.mark.parametrize("sizes", [(2, 2, 2), (1, 1, 1, 1), (2, 1, 1, 1)])
def test_equality_methods_agree(sizes, space_of):
    space = space_of(*sizes)
    reports = [verify_equality(space.spec, space, m, samples=2000) for m in ("bfs", "sweep", "sampled")]
    assert all(r.violations == 0 and r.confirmed for r in reports)


def test_sweep_finds_exactly_the_deficient_pairs(space_of):
    space = space_of(*(1,) * 6)
    total, sample = uncertified_pair_count(space, keep=64)
    deficient = {(e.a.bits, e.b.bits) for e in search_deficient_pairs(space.spec, space=space)}
    assert total == len(deficient) == 32
    assert {(space.tiling(int(i)).bits, space.tiling(int(j)).bits) for i, j in sample} == deficient
    rep = verify_equality(space.spec, space, "sweep")
    assert rep.violations == 32 and rep.confirmed and not predicts_equality(space.spec)


def test_six_line_census_matches_oracle(space_of):
    """Deficient ordered pairs recomputed on the hexagon-flip graph."""
    sizes = (1,) * 6
    tilings = list(sweep_tilings(sizes))
    graph = flip_graph(set(tilings), 6)
    signs = {t: triangle_signs(t, sizes) for t in tilings}
    oracle = Counter()
    for t in tilings:
        for u, d in bfs(graph, t).items():
            h = sum(x != y for x, y in zip(signs[t], signs[u]))
            if d != h:
                oracle[(h, d)] += 1
    ours = search_deficient_pairs(ZonotopeSpec(sizes), space=space_of(*sizes))
    assert Counter((e.report.hamming, e.report.flip) for e in ours) == oracle
    assert len({e.isometry_class for e in ours}) == 2
    assert census_csv(ours).splitlines()[0] == (
        "pair_id,tiling_a_file,tiling_b_file,hamming,flip,certified_side,isometry_class"
    )


def test_random_census_mode_is_seeded():
    spec = ZonotopeSpec((1,) * 6)
    a = search_deficient_pairs(spec, mode="random", samples=300, seed=3)
    b = search_deficient_pairs(spec, mode="random", samples=300, seed=3)
    assert [(e.a.bits, e.b.bits) for e in a] == [(e.a.bits, e.b.bits) for e in b]
    assert all(e.report.flip >= e.report.hamming + 2 for e in a)


def test_symmetry_images_are_tilings(space_of):
    for t in list(space_of(2, 1, 2, 1))[:30]:
        images = symmetry_images(t)
        assert len(images) == 16
        assert all(validate(x) for x in images)
    t = seed_tiling(ZonotopeSpec((1, 1, 1, 1)))
    assert isometry_classes([(t, t), (symmetry_images(t)[2], symmetry_images(t)[2])]) == [0, 0]


@pytest.mark.parametrize("sizes", [(2, 2, 2), (3, 3, 2)])
def test_first_cut_lemma(sizes, space_of):
    rep = check_lemma_config1(ZonotopeSpec(sizes), space_of(*sizes))
    assert rep.ok and rep.instances_checked > 0


def test_second_cut_lemma(space_of):
    rep = check_lemma_config2(ZonotopeSpec((2, 2, 1, 1)), space_of(2, 2, 1, 1))
    assert rep.ok and rep.instances_checked > 0


def test_corrupted_sign_is_caught(space_of):
    space = space_of(2, 2, 2)
    for i in range(len(space)):
        for j in range(len(space)):
            a, b = space.tiling(i), space.tiling(j)
            insts = [x for x in lemma_instances(a) if x.kind == 1]
            diff = a.bits ^ b.bits
            assert not lemma_violations(insts, diff)
            for inst in insts:
                if (diff >> inst.antecedent) & 1:
                    # corrupt the forced sign of the second tiling
                    assert inst in lemma_violations(insts, diff & ~inst.conclusions[0])
                    return
    pytest.fail("no cut configuration found")


def test_sampled_lemma_sweep(space_of):
    rep = check_lemma_config2(ZonotopeSpec((2, 2, 1, 1)), space_of(2, 2, 1, 1), samples=500, seed=1)
    assert rep.ok and not rep.exhaustive and rep.pairs == 500


def test_minimal_masks_match_scalar(space_of):
    space = space_of(2, 2, 1, 1)
    masks = space.minimal_masks
    for i in range(0, len(space), 13):
        t = space.tiling(i)
        bits = int(masks[i, 0])
        assert bits == sum(1 << k for k in range(t.num_triangles) if is_inclusion_minimal(t, k))
    assert isinstance(masks, np.ndarray)
