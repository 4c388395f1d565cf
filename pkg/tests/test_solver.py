import random

import pytest

from subexp_fvs.generators import gen_instance
from subexp_fvs.graph import Graph, is_fvs
from subexp_fvs.instance import AnnInstance, is_solution
from subexp_fvs.oracle import brute_force_annotated, min_fvs_size, reference_exact_fvs
from subexp_fvs.params import PSEUDO_DISK, derive_thresholds, s_string
from subexp_fvs.rules import termination_measure
from subexp_fvs.solver import SolverContext, SolverTimeout, algorithm_a, solve

from planted import annotate, random_graph


def cycle(n, start=0):
    return [(start + i, start + (i + 1) % n) for i in range(n)]


def test_algorithm_a_examples():
    tree = Graph.from_edges(range(5), [(0, 1), (1, 2), (1, 3), (3, 4)])
    th = derive_thresholds(PSEUDO_DISK, 0)
    assert algorithm_a(AnnInstance(tree, 0, frozenset()), th) == frozenset()
    c6 = Graph.from_edges(range(6), cycle(6))
    th = derive_thresholds(PSEUDO_DISK, 1)
    s = algorithm_a(AnnInstance(c6, 1, {0}), th)
    assert len(s) == 1 and is_fvs(c6, s)
    assert algorithm_a(AnnInstance(c6, 0, {0}), th) is None
    assert algorithm_a(AnnInstance(c6, 1, {0, 3}, ({0}, {3})), th) is None


def test_solve_examples():
    forest = Graph.from_edges(range(6), [(0, 1), (2, 3), (3, 4)])
    for k in range(3):
        assert solve(forest, k).solution == frozenset()
    two = Graph.from_edges(range(6), cycle(3) + cycle(3, 3))
    assert solve(two, 1).solution is None
    s = solve(two, 2).solution
    assert len(s) == 2 and is_fvs(two, s)
    assert solve(two, -1).solution is None
    for shortcut in (True, False):
        assert solve(two, 1, shortcut=shortcut).decision is False
        assert solve(two, 2, shortcut=shortcut).decision is True


def mixed_instances(seed, count):
    rng = random.Random(seed)
    for i in range(count):
        n = rng.randint(1, 14)
        if i % 2:
            g = random_graph(rng, n, rng.choice([0.15, 0.25, 0.35, 0.5]))
        else:
            g, _ = gen_instance(rng.choice(["segment", "2dir"]), n, i, degree=rng.choice([2.0, 3.0, 4.0]))
        inst = annotate(rng, g, nonempty_h=rng.random() < 0.5)
        yield rng, inst.with_(k=rng.randint(0, 5))


def test_algorithm_a_matches_oracle():
    transitions = []
    for rng, inst in mixed_instances(1, 300):
        th = derive_thresholds(PSEUDO_DISK, inst.k, r=2, t=rng.choice([2, 3, 8]))
        ctx = SolverContext(check_invariants=True, on_transition=transitions.append)
        got = algorithm_a(inst, th, ctx)
        want = brute_force_annotated(inst)
        assert (got is not None) == (want is not None)
        if got is not None:
            assert is_solution(inst, got)
    assert transitions
    for out in transitions:
        assert all(termination_measure(c) < termination_measure(out.parent) for c in out.children)


def test_solve_matches_reference():
    rng = random.Random(2)
    for i in range(120):
        n = rng.randint(0, 20)
        g = random_graph(rng, n, rng.choice([0.1, 0.2, 0.3]))
        k = rng.randint(0, 6)
        want = reference_exact_fvs(g, k) is not None
        for shortcut in (True, False):
            res = solve(g, k, shortcut=shortcut)
            assert res.decision == want
            if res.decision:
                assert len(res.solution) <= k and is_fvs(g, res.solution)


def test_s_string_preset_and_overrides():
    g, _ = gen_instance("segment", 14, 9)
    k = min_fvs_size(g)
    for kwargs in ({}, {"t": 2, "c1": 0.01, "p3_scale": 1e-3}):
        assert solve(g, k, s_string(1), shortcut=False, **kwargs).decision
        assert not solve(g, k - 1, s_string(1), shortcut=False, **kwargs).decision


def test_stats_recorded():
    g, _ = gen_instance("er", 12, 3, p=0.4)
    k = min_fvs_size(g)
    res = solve(g, k, shortcut=False)
    stats = res.stats.to_json()
    assert stats["family_size"] >= 1 and stats["millis"] >= 0
    assert stats["rule_counts"].get("DP", 0) == len(stats["dp_leaf_n"]) == len(stats["width"])


def test_jobs_give_identical_answers():
    rng = random.Random(5)
    for i in range(6):
        g = random_graph(rng, 13, 0.35)
        k = min_fvs_size(g)
        for kk in (k - 1, k):
            a = solve(g, kk, shortcut=False).solution
            b = solve(g, kk, shortcut=False, jobs=2).solution
            assert a == b


def test_timeout():
    g, _ = gen_instance("er", 40, 1, p=0.3)
    with pytest.raises(SolverTimeout):
        solve(g, 20, shortcut=False, timeout=0.0)
