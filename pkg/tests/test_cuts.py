"""Bottleneck sets, alpha/beta edges, parallelism and small min-cuts."""

import random

import pytest

from genutils import (
    brute_alpha,
    brute_beta,
    brute_bottlenecks,
    brute_pair_cut,
    brute_parallel,
    random_connected_scenario,
    random_scenario,
)
from netalign import load_corpus
from netalign.cuts import (
    DisconnectedError,
    alpha_beta,
    alpha_edge,
    bottleneck_set,
    cut_by_pair,
    min_cut,
    parallel,
)
from netalign.xfer import oracle_transfer_poly


# -- bottleneck sets ------------------------------------------------------------


def test_bottlenecks_on_shared_bottleneck():
    sc = load_corpus("shared_bottleneck")
    assert bottleneck_set(sc, 1, 5).members == [1, 4, 5]
    assert bottleneck_set(sc, 2, 7).members == [2, 4, 7]
    assert 4 in bottleneck_set(sc, 3, 6)
    assert 1 not in bottleneck_set(sc, 2, 7)


def test_bottlenecks_edge_cases():
    sc = load_corpus("three_disjoint")
    assert bottleneck_set(sc, 1, 2).members == [1, 2]
    assert bottleneck_set(sc, 1, 4).members == []  # no path
    assert bottleneck_set(sc, 3, 3).members == [3]


def test_bottlenecks_match_removal_oracle():
    rng = random.Random(83)
    for _ in range(30):
        sc = random_scenario(rng) if rng.random() < 0.5 else random_connected_scenario(rng)
        ids = [e.id for e in sc.edges]
        pairs = [(sc.sigma(j), sc.tau(i)) for j in (1, 2, 3) for i in (1, 2, 3)]
        pairs += [(rng.choice(ids), rng.choice(ids)) for _ in range(5)]
        for src, dst in pairs:
            got = bottleneck_set(sc, src, dst).members
            assert got == brute_bottlenecks(sc, src, dst)
            pos = [sc.topo_pos[e] for e in got]
            assert pos == sorted(pos)


def test_bottlenecks_lie_on_every_path():
    rng = random.Random(89)
    for _ in range(10):
        sc = random_connected_scenario(rng)
        for j in (1, 2, 3):
            for i in (1, 2, 3):
                src, dst = sc.sigma(j), sc.tau(i)
                members = set(bottleneck_set(sc, src, dst).members)
                for mono in oracle_transfer_poly(sc, src, dst).monos:
                    path_edges = {src} | {var[1] for var, _ in mono}
                    assert members <= path_edges


def test_bottleneck_cache_returns_shared_instances():
    sc = load_corpus("two_corridor")
    cache = {}
    first = bottleneck_set(sc, 2, 11, cache)
    again = bottleneck_set(sc, 2, 11, cache)
    assert first is again
    assert first.members == bottleneck_set(sc, 2, 11).members


# -- alpha and beta edges --------------------------------------------------------


def test_alpha_beta_single_shared_edge():
    sc = load_corpus("shared_bottleneck")
    ab213 = alpha_beta(sc, 2, 1, 3)
    ab312 = alpha_beta(sc, 3, 1, 2)
    assert (ab213.alpha, ab213.beta) == (4, 4)
    assert (ab312.alpha, ab312.beta) == (4, 4)


def test_alpha_beta_two_edge_corridor():
    sc = load_corpus("two_corridor")
    ab213 = alpha_beta(sc, 2, 1, 3)
    ab312 = alpha_beta(sc, 3, 1, 2)
    assert (ab213.alpha, ab213.beta) == (4, 7)
    assert (ab312.alpha, ab312.beta) == (4, 7)


def test_alpha_edges_on_type_two_gadget():
    sc = load_corpus("type_two_gadget")
    assert alpha_edge(sc, 2, 1, 3) == 8
    assert alpha_edge(sc, 3, 1, 2) == 11


def test_alpha_beta_match_brute_oracle():
    rng = random.Random(97)
    for _ in range(25):
        sc = random_connected_scenario(rng)
        cache = {}
        for (i, j, k) in ((1, 2, 3), (2, 1, 3), (3, 1, 2), (1, 3, 2), (2, 3, 1), (3, 2, 1)):
            assert alpha_edge(sc, i, j, k, cache) == brute_alpha(sc, i, j, k)
            ab = alpha_beta(sc, i, j, k, cache)
            assert ab.alpha == brute_alpha(sc, i, j, k)
            assert ab.beta == brute_beta(sc, i, j, k)


def test_alpha_requires_connectivity():
    sc = load_corpus("three_disjoint")
    with pytest.raises(DisconnectedError):
        alpha_edge(sc, 2, 1, 3)
    with pytest.raises(DisconnectedError):
        alpha_beta(sc, 2, 1, 3)
    dead = load_corpus("m21_dead")
    with pytest.raises(DisconnectedError):
        alpha_edge(sc, 2, 1, 3)
    assert alpha_edge(dead, 1, 2, 3) == 1


# -- parallel predicate -----------------------------------------------------------


def test_parallel_anchors():
    sc = load_corpus("type_two_gadget")
    assert parallel(sc, 8, 11)
    assert parallel(sc, 4, 5)
    assert not parallel(sc, 8, 12)  # consecutive
    assert not parallel(sc, 2, 13)  # sigma_2 eventually reaches v1 -> r3
    with pytest.raises(ValueError):
        parallel(sc, 8, 8)


def test_parallel_matches_brute():
    rng = random.Random(101)
    for _ in range(15):
        sc = random_scenario(rng)
        ids = [e.id for e in sc.edges]
        for _ in range(10):
            a, b = rng.sample(ids, 2)
            assert parallel(sc, a, b) == brute_parallel(sc, a, b)


# -- min-cut -----------------------------------------------------------------------


def test_min_cut_frozen_values():
    hub = load_corpus("shared_bottleneck")
    sigmas = [hub.sigma(i) for i in (1, 2, 3)]
    taus = [hub.tau(i) for i in (1, 2, 3)]
    assert min_cut(hub, sigmas, taus) == 1
    rich = load_corpus("rich_type3")
    assert min_cut(rich, [rich.sigma(i) for i in (1, 2, 3)],
                   [rich.tau(i) for i in (1, 2, 3)]) == 3
    corridor = load_corpus("two_corridor")
    assert min_cut(corridor, [corridor.sigma(i) for i in (1, 2, 3)],
                   [corridor.tau(i) for i in (1, 2, 3)]) == 2


def test_cut_by_pair_frozen_values():
    hub = load_corpus("shared_bottleneck")
    corridor = load_corpus("two_corridor")
    for src_pair in ((1, 2), (1, 3), (2, 3)):
        for dst_pair in ((1, 2), (1, 3), (2, 3)):
            assert cut_by_pair(hub, src_pair, dst_pair) == 1
            assert cut_by_pair(load_corpus("rich_type3"), src_pair, dst_pair) == 2
    assert cut_by_pair(corridor, (2, 3), (2, 3)) == 1
    assert cut_by_pair(corridor, (1, 2), (1, 3)) == 2


def test_min_cut_single_source_bounds():
    rng = random.Random(103)
    for _ in range(10):
        sc = random_scenario(rng)
        for i in (1, 2, 3):
            value = min_cut(sc, [sc.sigma(i)], [sc.tau(i)])
            connected = sc.connects(sc.sigma(i), sc.tau(i))
            assert value == (1 if connected else 0)


def test_pair_cuts_match_subset_oracle():
    rng = random.Random(107)
    for _ in range(30):
        sc = random_scenario(rng) if rng.random() < 0.5 else random_connected_scenario(rng)
        for src_pair in ((1, 2), (1, 3), (2, 3)):
            for dst_pair in ((1, 2), (1, 3), (2, 3)):
                got = cut_by_pair(sc, src_pair, dst_pair)
                want = brute_pair_cut(sc,
                                      [sc.sigma(a) for a in src_pair],
                                      [sc.tau(b) for b in dst_pair])
                assert got == want
