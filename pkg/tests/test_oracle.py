import random

import pytest

from subexp_fvs.graph import Graph, is_fvs
from subexp_fvs.instance import AnnInstance
from subexp_fvs.oracle import (
    OracleRefused,
    brute_force_annotated,
    brute_force_fvs,
    min_annotated_size,
    min_fvs_size,
    reference_exact_fvs,
)

from planted import random_annotated, random_graph


def grid(w, h):
    edges = []
    for x in range(w):
        for y in range(h):
            v = x * h + y
            if x + 1 < w:
                edges.append((v, v + h))
            if y + 1 < h:
                edges.append((v, v + 1))
    return Graph.from_edges(range(w * h), edges)


def test_brute_force_examples():
    c5 = Graph.from_edges(range(5), [(i, (i + 1) % 5) for i in range(5)])
    assert len(brute_force_fvs(c5, 1)) == 1
    k4 = Graph.from_edges(range(4), [(i, j) for i in range(4) for j in range(i + 1, 4)])
    assert brute_force_fvs(k4, 1) is None
    assert len(brute_force_fvs(k4, 2)) == 2


def test_brute_force_respects_h():
    c5 = Graph.from_edges(range(5), [(i, (i + 1) % 5) for i in range(5)])
    s = brute_force_annotated(AnnInstance(c5, 2, c5.vertex_set(), ({3},)))
    assert s == {3}
    # two disjoint demands on a single cycle cost two vertices
    s = brute_force_annotated(AnnInstance(c5, 2, c5.vertex_set(), ({0}, {2})))
    assert s == {0, 2}
    assert brute_force_annotated(AnnInstance(c5, 1, c5.vertex_set(), ({0}, {2}))) is None


def test_brute_force_refuses_large():
    g = Graph.from_edges(range(21), [])
    with pytest.raises(OracleRefused):
        brute_force_fvs(g, 0)


def test_reference_examples():
    forest = Graph.from_edges(range(6), [(0, 1), (1, 2), (3, 4)])
    assert reference_exact_fvs(forest, 0) == frozenset()
    bowtie = Graph.from_edges(range(5), [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
    assert reference_exact_fvs(bowtie, 1) == {2}
    g = grid(4, 4)
    best = len(brute_force_fvs(g, 16))
    assert reference_exact_fvs(g, best - 1) is None
    s = reference_exact_fvs(g, best)
    assert len(s) == best and is_fvs(g, s)
    assert reference_exact_fvs(g, -1) is None


def test_reference_matches_brute_force():
    rng = random.Random(4)
    for _ in range(250):
        g = random_graph(rng, rng.randint(0, 13), rng.choice([0.1, 0.2, 0.3, 0.5, 0.8]))
        best = len(brute_force_fvs(g, g.n))
        assert min_fvs_size(g) == best
        for k in range(max(0, best - 1), best + 2):
            s = reference_exact_fvs(g, k)
            assert (s is not None) == (k >= best)
            if s is not None:
                assert len(s) <= k and is_fvs(g, s)


def test_min_annotated_size_with_demands():
    inst = random_annotated(random.Random(2), 8, nonempty_h=True)
    assert min_annotated_size(inst) is not None
    assert min_annotated_size(inst) >= 1
