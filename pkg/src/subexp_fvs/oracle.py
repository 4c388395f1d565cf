"""Ground truth: exhaustive annotated FVS and a classical branching FVS solver."""

from __future__ import annotations

import itertools
from collections import Counter, deque
from typing import Dict, List, Optional

from .graph import Graph, is_fvs
from .instance import AnnInstance, VertexSet, is_solution

BRUTE_FORCE_LIMIT = 20


class OracleRefused(ValueError):
    """The instance is too large for exhaustive search."""


def brute_force_annotated(inst: AnnInstance, limit: int = BRUTE_FORCE_LIMIT) -> Optional[VertexSet]:
    """Smallest solution of size at most ``k`` by subset enumeration, or ``None``."""
    g = inst.graph
    if g.n > limit:
        raise OracleRefused(f"brute force refuses {g.n} > {limit} vertices")
    vs = g.vertices()
    for size in range(0, min(inst.k, g.n) + 1):
        for combo in itertools.combinations(vs, size):
            if is_solution(inst, combo):
                return frozenset(combo)
    return None


def brute_force_fvs(g: Graph, k: int) -> Optional[VertexSet]:
    return brute_force_annotated(AnnInstance(g, k, g.vertex_set()))


def min_annotated_size(inst: AnnInstance) -> Optional[int]:
    """Optimum ignoring the budget; ``None`` if no solution exists at all."""
    s = brute_force_annotated(inst.with_(k=inst.graph.n))
    return None if s is None else len(s)


def min_fvs_size(g: Graph) -> int:
    k = 0
    while True:
        if reference_exact_fvs(g, k) is not None:
            return k
        k += 1


# -- reference bounded search tree ---------------------------------------------


def reference_exact_fvs(g: Graph, k: int) -> Optional[VertexSet]:
    """FVS of size at most ``k`` by reductions and branching on a shortest cycle.

    Works on a multigraph copy: self-loops force their vertex, vertices of
    degree at most one are dropped and degree-two vertices are bypassed.
    """
    if k < 0:
        return None
    adj: Dict[int, Counter] = {v: Counter({u: 1 for u in g.neighbors(v)}) for v in g.vertices()}
    found = _search(adj, k)
    if found is None:
        return None
    sol = frozenset(found)
    if len(sol) > k or not is_fvs(g, sol):
        raise AssertionError("reference solver produced an invalid certificate")
    return sol


def _copy(adj: Dict[int, Counter]) -> Dict[int, Counter]:
    return {v: Counter(c) for v, c in adj.items()}


def _remove(adj: Dict[int, Counter], v: int) -> None:
    for u in adj.pop(v):
        if u != v:
            del adj[u][v]


def _degree(adj: Dict[int, Counter], v: int) -> int:
    return sum(adj[v].values()) + adj[v][v]


def _reduce(adj: Dict[int, Counter], k: int, taken: List[int]) -> int:
    changed = True
    while changed and k >= 0:
        changed = False
        for v in sorted(adj):
            if v not in adj:
                continue
            if adj[v][v]:
                _remove(adj, v)
                taken.append(v)
                k -= 1
                changed = True
                continue
            d = _degree(adj, v)
            if d <= 1:
                _remove(adj, v)
                changed = True
            elif d == 2:
                ends = list(adj[v].elements())
                a, b = ends
                _remove(adj, v)
                if a == b:
                    adj[a][a] += 1
                else:
                    adj[a][b] += 1
                    adj[b][a] += 1
                changed = True
    return k


def _shortest_cycle(adj: Dict[int, Counter]) -> List[int]:
    best: Optional[List[int]] = None
    for s in sorted(adj):
        for u, mult in adj[s].items():
            if mult >= 2:
                return [s, u]
        parent = {s: None}
        dist = {s: 0}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if best is not None and 2 * dist[x] + 1 >= len(best):
                break
            for y in sorted(adj[x]):
                if y == parent[x]:
                    continue
                if y in dist:
                    cyc = _tree_cycle(parent, x, y)
                    if best is None or len(cyc) < len(best):
                        best = cyc
                else:
                    parent[y] = x
                    dist[y] = dist[x] + 1
                    queue.append(y)
    # the reductions leave minimum degree three, so a cycle always exists
    assert best is not None
    return best


def _tree_cycle(parent, x: int, y: int) -> List[int]:
    px = [x]
    while parent[px[-1]] is not None:
        px.append(parent[px[-1]])
    on = {v: i for i, v in enumerate(px)}
    py = [y]
    while py[-1] not in on:
        py.append(parent[py[-1]])
    return px[: on[py[-1]] + 1] + list(reversed(py[:-1]))


def _search(adj: Dict[int, Counter], k: int) -> Optional[List[int]]:
    adj = _copy(adj)
    taken: List[int] = []
    k = _reduce(adj, k, taken)
    if k < 0:
        return None
    if not adj:
        return taken
    if k == 0:
        return None
    for v in _shortest_cycle(adj):
        child = _copy(adj)
        _remove(child, v)
        sub = _search(child, k - 1)
        if sub is not None:
            return taken + [v] + sub
    return None
