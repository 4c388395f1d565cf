import random

import networkx as nx
import pytest

from subexp_fvs.graph import Graph
from subexp_fvs.instance import AnnInstance
from subexp_fvs.oracle import brute_force_annotated, min_annotated_size
from subexp_fvs.treewidth import (
    DecompositionError,
    TreeDecomposition,
    decompose,
    dp_annotated_fvs,
    dp_minimum_solution,
    elimination_order,
    make_nice,
    validate_decomposition,
)

from planted import random_annotated, random_graph


def naive_valid(g, td):
    """Independent recheck: vertex cover, edge cover, tree shape, running intersection."""
    bags = td.bags
    if not bags or len(td.edges) != len(bags) - 1:
        return False
    t = nx.Graph()
    t.add_nodes_from(range(len(bags)))
    t.add_edges_from(td.edges)
    if not nx.is_tree(t):
        return False
    if not set(g.vertices()) <= set().union(*bags) or not set().union(*bags) <= set(g.vertices()):
        return False
    for u, v in g.edges():
        if not any(u in b and v in b for b in bags):
            return False
    for v in g.vertices():
        holding = [i for i, b in enumerate(bags) if v in b]
        if not nx.is_connected(t.subgraph(holding)):
            return False
    return True


def test_width_examples():
    tree = Graph.from_edges(range(7), [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
    assert decompose(tree).width == 1
    for n in (3, 5, 9):
        c = Graph.from_edges(range(n), [(i, (i + 1) % n) for i in range(n)])
        assert decompose(c).width == 2


@pytest.mark.parametrize("heuristic", ["min-fill", "min-degree"])
def test_random_decompositions_valid(heuristic):
    rng = random.Random(7)
    for _ in range(40):
        g = random_graph(rng, 30, rng.choice([0.05, 0.1, 0.2]))
        td = decompose(g, heuristic)
        assert validate_decomposition(g, td) and naive_valid(g, td)
        ng = nx.Graph(g.edges())
        ng.add_nodes_from(g.vertices())
        clique = max((len(c) for c in nx.find_cliques(ng)), default=1)
        assert td.width >= clique - 1
        assert sorted(elimination_order(g, heuristic)) == g.vertices()


def test_validator_examples():
    g = Graph.from_edges(range(3), [(0, 1), (1, 2)])
    assert validate_decomposition(g, TreeDecomposition((frozenset({0, 1, 2}),), ()))
    bad = TreeDecomposition((frozenset({0, 1}), frozenset({2})), ((0, 1),))
    assert not validate_decomposition(g, bad)


def test_validator_catches_mutations():
    rng = random.Random(8)
    caught = 0
    for _ in range(300):
        g = random_graph(rng, 12, 0.3)
        td = decompose(g)
        bags = [set(b) for b in td.bags]
        edges = list(td.edges)
        kind = rng.choice(["drop", "add", "edge"])
        if kind == "drop":
            i = rng.randrange(len(bags))
            if bags[i]:
                bags[i].discard(rng.choice(sorted(bags[i])))
        elif kind == "add":
            bags[rng.randrange(len(bags))].add(rng.randrange(12))
        elif edges:
            edges.pop(rng.randrange(len(edges)))
        mutated = TreeDecomposition(tuple(frozenset(b) for b in bags), tuple(edges))
        expected = naive_valid(g, mutated)
        assert validate_decomposition(g, mutated) == expected
        caught += not expected
    assert caught > 100


def test_pace_round_trip():
    g = random_graph(random.Random(1), 15, 0.25)
    td = decompose(g)
    back = TreeDecomposition.from_pace(td.to_pace(g.n))
    assert back == td
    with pytest.raises(DecompositionError):
        TreeDecomposition.from_pace("b 1 2 3\n")


def test_nice_shape():
    rng = random.Random(3)
    for _ in range(30):
        g = random_graph(rng, 14, 0.25)
        nodes, root = make_nice(decompose(g))
        assert nodes[root].bag == ()
        for i, node in enumerate(nodes):
            assert all(c < i for c in node.children)
            kids = [set(nodes[c].bag) for c in node.children]
            bag = set(node.bag)
            if node.kind == "leaf":
                assert not node.children and bag == set()
            elif node.kind == "introduce":
                assert kids[0] | {node.vertex} == bag and node.vertex not in kids[0]
            elif node.kind == "forget":
                assert kids[0] - {node.vertex} == bag and node.vertex in kids[0]
            else:
                assert node.kind == "join" and len(kids) == 2 and kids[0] == kids[1] == bag


def test_dp_examples():
    c4 = Graph.from_edges(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)])
    s = dp_annotated_fvs(AnnInstance(c4, 1, c4.vertex_set()))
    assert len(s) == 1
    assert dp_annotated_fvs(AnnInstance(c4, 1, c4.vertex_set(), ({2},))) == {2}
    assert dp_annotated_fvs(AnnInstance(c4, 0, c4.vertex_set())) is None
    empty = Graph.from_edges([], [])
    assert dp_annotated_fvs(AnnInstance(empty, 0, frozenset())) == frozenset()


def test_dp_matches_brute_force():
    rng = random.Random(10)
    for _ in range(150):
        inst = random_annotated(rng, rng.randint(1, 13), nonempty_h=rng.random() < 0.7)
        best = min_annotated_size(inst)
        sol = dp_minimum_solution(inst)
        assert len(sol) == best
        assert brute_force_annotated(inst.with_(k=len(sol))) is not None
        got = dp_annotated_fvs(inst)
        assert (got is not None) == (best <= inst.k)


def test_dp_with_limit_and_bad_td():
    g = Graph.from_edges(range(4), [(0, 1), (1, 2), (2, 0), (2, 3)])
    inst = AnnInstance(g, 4, g.vertex_set())
    assert dp_minimum_solution(inst, limit=0) is None
    with pytest.raises(DecompositionError):
        dp_minimum_solution(inst, TreeDecomposition((frozenset({0, 1}),), ()))
