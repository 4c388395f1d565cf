"""Bootstrap: a 2-approximate FVS, K_{r,r} detection and the biclique branching."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Set, Tuple, Union

from .graph import Graph, is_fvs

log = logging.getLogger(__name__)

VertexSet = FrozenSet[int]


# -- 2-approximation -----------------------------------------------------------


def two_approx_fvs(g: Graph) -> VertexSet:
    """Local-ratio 2-approximation (unit weights) with reverse-delete cleanup.

    Each round either finds a cycle with at most one vertex of degree > 2 and
    charges it uniformly, or charges every vertex proportionally to
    ``degree - 1``. Vertices whose residual weight reaches zero join the
    solution; redundant ones are dropped in reverse order of insertion.
    """
    adj: Dict[int, Set[int]] = {v: set(g.neighbors(v)) for v in g.vertices()}
    weight: Dict[int, Fraction] = {v: Fraction(1) for v in adj}
    picked: List[int] = []

    def delete(v: int) -> None:
        for u in adj.pop(v):
            adj[u].discard(v)

    def prune() -> None:
        stack = [v for v in adj if len(adj[v]) <= 1]
        while stack:
            v = stack.pop()
            if v not in adj or len(adj[v]) > 1:
                continue
            nbrs = list(adj[v])
            delete(v)
            stack.extend(u for u in nbrs if len(adj[u]) <= 1)

    prune()
    while adj:
        cycle = _semidisjoint_cycle(adj)
        if cycle is not None:
            gamma = min(weight[v] for v in cycle)
            for v in cycle:
                weight[v] -= gamma
        else:
            gamma = min(weight[v] / (len(adj[v]) - 1) for v in adj)
            for v in adj:
                weight[v] -= gamma * (len(adj[v]) - 1)
        for v in sorted(adj):
            if weight[v] == 0:
                picked.append(v)
                delete(v)
        prune()

    solution = set(picked)
    for v in reversed(picked):
        if is_fvs(g, solution - {v}):
            solution.discard(v)
    return frozenset(solution)


def _semidisjoint_cycle(adj: Dict[int, Set[int]]) -> Optional[List[int]]:
    """A cycle in which at most one vertex has degree above 2, if any."""
    seen: Set[int] = set()
    for s in sorted(adj):
        if len(adj[s]) != 2 or s in seen:
            continue
        # walk the maximal chain of degree-2 vertices through s in both directions
        a, b = sorted(adj[s])
        chain = [s]
        seen.add(s)
        ends = []
        for start in (a, b):
            prev, cur = s, start
            part = []
            while len(adj[cur]) == 2 and cur != s:
                part.append(cur)
                seen.add(cur)
                nxt = next(iter(adj[cur] - {prev}))
                prev, cur = cur, nxt
            ends.append((cur, part))
            if cur == s:
                # the whole component is a cycle of degree-2 vertices
                return [s] + part
        (end_a, part_a), (end_b, part_b) = ends
        if end_a == end_b:
            return [end_a] + list(reversed(part_a)) + chain + part_b
    return None


# -- K_{r,r} -------------------------------------------------------------------


def find_krr(g: Graph, M: VertexSet, r: int) -> Optional[Tuple[VertexSet, VertexSet]]:
    """Find a K_{r,r} subgraph, assuming ``G - M`` is acyclic.

    One side of any copy has at least ``r - 1`` vertices in ``M``, so it is
    enough to try every ``(r-1)``-subset of ``M`` extended by one vertex.
    """
    if r < 1:
        raise ValueError("r must be positive")
    vertices = g.vertices()
    for core in itertools.combinations(sorted(M), r - 1):
        core_set = frozenset(core)
        common_core = _common_neighbors(g, core_set, vertices)
        if len(common_core) < r - 1:
            continue
        for x in vertices:
            if x in core_set:
                continue
            nx = g.neighbors(x)
            if len(nx) < r:
                continue
            A = core_set | {x}
            common = [v for v in common_core if v in nx and v not in A]
            if len(common) >= r:
                return A, frozenset(common[:r])
    return None


def _common_neighbors(g: Graph, S: VertexSet, vertices: List[int]) -> List[int]:
    if not S:
        return list(vertices)
    it = iter(S)
    acc = set(g.neighbors(next(it)))
    for v in it:
        acc &= g.neighbors(v)
    return sorted(acc)


def is_krr(g: Graph, A: VertexSet, B: VertexSet, r: int) -> bool:
    return (
        len(A) == r
        and len(B) == r
        and not (A & B)
        and all(g.has_edge(a, b) for a in A for b in B)
    )


@dataclass(frozen=True)
class FamilyMember:
    """An instance ``(G, k, M)`` together with the vertices deleted to reach it."""

    graph: Graph
    k: int
    M: VertexSet
    lift: VertexSet = frozenset()

    def lift_solution(self, solution: VertexSet) -> VertexSet:
        return frozenset(solution) | self.lift


def branch_krr(member: FamilyMember, A: VertexSet, B: VertexSet, r: int) -> List[FamilyMember]:
    """Biclique branching: drop ``r - 1`` vertices of one side, in ``2r`` ways."""
    if not is_krr(member.graph, A, B, r):
        raise ValueError("(A, B) is not a K_{r,r} of the member graph")
    if member.k < r - 1:
        return []
    out = []
    for side in (A, B):
        for keep in sorted(side):
            X = side - {keep}
            out.append(
                FamilyMember(
                    member.graph.remove_vertices(X),
                    member.k - (r - 1),
                    member.M - X,
                    member.lift | X,
                )
            )
    return out


@dataclass(frozen=True)
class EarlyAnswer:
    """The bootstrap already decided: ``solution`` is a certificate or ``None``."""

    solution: Optional[VertexSet]


@dataclass
class InstanceFamily:
    members: List[FamilyMember]
    M0: VertexSet
    branchings: int = 0


BranchHook = Callable[[FamilyMember, Tuple[VertexSet, VertexSet], List[FamilyMember]], None]


def iter_instance_family(
    g0: Graph,
    k0: int,
    r: int,
    M0: VertexSet,
    on_branch: Optional[BranchHook] = None,
) -> Iterator[FamilyMember]:
    """Depth-first generation of the K_{r,r}-free family, deduplicated by lift set."""
    stack = [FamilyMember(g0, k0, M0)]
    seen: Set[VertexSet] = set()
    while stack:
        member = stack.pop()
        if member.lift in seen:
            continue
        seen.add(member.lift)
        hit = find_krr(member.graph, member.M, r)
        if hit is None:
            yield member
            continue
        children = branch_krr(member, hit[0], hit[1], r)
        if on_branch is not None:
            on_branch(member, hit, children)
        stack.extend(reversed(children))


def build_instance_family(
    g0: Graph, k0: int, r: int, on_branch: Optional[BranchHook] = None
) -> Union[InstanceFamily, EarlyAnswer]:
    M0 = two_approx_fvs(g0)
    if len(M0) <= k0:
        return EarlyAnswer(M0)
    if len(M0) > 2 * k0:
        return EarlyAnswer(None)
    count = [0]

    def hook(member, hit, children):
        count[0] += 1
        if on_branch is not None:
            on_branch(member, hit, children)

    members = list(iter_instance_family(g0, k0, r, M0, hook))
    bound = (2 * r) ** (k0 / (r - 1)) if r > 1 else float("inf")
    if len(members) > bound:
        log.warning("instance family has %d members, above (2r)^(k0/(r-1)) = %.1f", len(members), bound)
    return InstanceFamily(members, M0, count[0])
