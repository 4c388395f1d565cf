"""Annotated instances and the forest measurements the rules are stated in.

An annotated instance is ``(G, k, M, H)``: ``M`` is a feedback vertex set of
``G`` and ``H`` a packing of disjoint connected subsets of ``M`` that every
solution must hit. Subtrees of ``G - M`` are represented as vertex sets.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .graph import Graph, GraphInputError, connected_components, has_cycle, is_tree

VertexSet = FrozenSet[int]


class InstanceError(ValueError):
    """Raised when an annotated instance violates its invariants."""


@dataclass(frozen=True)
class AnnInstance:
    graph: Graph
    k: int
    M: VertexSet
    H: Tuple[VertexSet, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "M", frozenset(self.M))
        object.__setattr__(self, "H", tuple(sorted((frozenset(h) for h in self.H), key=lambda h: min(h, default=-1))))

    @property
    def forest(self) -> VertexSet:
        """Vertices of ``G - M``."""
        return self.graph.vertex_set() - self.M

    def validate(self) -> None:
        g = self.graph
        if self.k < 0:
            raise InstanceError("negative budget")
        if not self.M <= g.vertex_set():
            raise InstanceError("M is not a subset of V(G)")
        if has_cycle(g, self.forest):
            raise InstanceError("G - M contains a cycle")
        seen: set = set()
        for h in self.H:
            if not h:
                raise InstanceError("empty hyperedge")
            if not h <= self.M:
                raise InstanceError("hyperedge leaves M")
            if seen & h:
                raise InstanceError("hyperedges are not disjoint")
            seen |= h
            if len(connected_components(g, h)) != 1:
                raise InstanceError("hyperedge is not connected")

    def with_(self, **changes) -> "AnnInstance":
        fields = dict(graph=self.graph, k=self.k, M=self.M, H=self.H)
        fields.update(changes)
        return AnnInstance(**fields)


def hyperedges_avoiding(H: Iterable[VertexSet], xs: Iterable[int]) -> Tuple[VertexSet, ...]:
    """``H - X``: the members of ``H`` not intersected by ``X``."""
    drop = frozenset(xs)
    return tuple(h for h in H if not (h & drop))


def neighbors_in(g: Graph, T: Iterable[int], target: VertexSet) -> VertexSet:
    """``N_target(T)``: vertices of ``target`` outside ``T`` adjacent to ``T``."""
    t = frozenset(T)
    out: set = set()
    for v in t:
        out |= g.neighbors(v) & target
    return frozenset(out - t)


def d_M(inst: AnnInstance, T: Iterable[int]) -> int:
    return len(neighbors_in(inst.graph, T, inst.M))


def border(inst: AnnInstance, T: Iterable[int]) -> VertexSet:
    """Vertices of ``T`` with a neighbour outside ``M`` and ``T``."""
    t = frozenset(T)
    inside = inst.M | t
    return frozenset(v for v in t if not inst.graph.neighbors(v) <= inside)


@dataclass(frozen=True)
class SubtreeMeasure:
    d_M: int
    b: int

    @property
    def db(self) -> int:
        return max(self.d_M, self.b)


def measure_subtree(inst: AnnInstance, T: Iterable[int]) -> SubtreeMeasure:
    t = frozenset(T)
    if not t <= inst.forest:
        raise GraphInputError("subtree leaves G - M")
    if not is_tree(inst.graph, t):
        raise GraphInputError("vertex set does not induce a tree")
    return SubtreeMeasure(d_M(inst, t), len(border(inst, t)))


def is_weakly_connected(inst: AnnInstance, T: Iterable[int]) -> bool:
    """Every vertex of ``M`` has at most one neighbour in ``T``."""
    return max(m_vertex_counts(inst, T).values(), default=0) <= 1


def m_vertex_counts(inst: AnnInstance, T: Iterable[int]) -> Counter:
    """For each ``u`` in ``M``, the number of neighbours it has in ``T``."""
    c: Counter = Counter()
    for v in T:
        c.update(inst.graph.neighbors(v) & inst.M)
    return c


# -- rooted forest -------------------------------------------------------------


@dataclass
class RootedForest:
    """``G - M`` with every component rooted at its smallest vertex."""

    parent: Dict[int, Optional[int]]
    roots: List[int]
    children: Dict[int, List[int]] = field(default_factory=dict)
    depth: Dict[int, int] = field(default_factory=dict)

    def subtree(self, v: int) -> VertexSet:
        """``T_v``: ``v`` and all its descendants."""
        out = [v]
        stack = [v]
        while stack:
            x = stack.pop()
            for c in self.children[x]:
                out.append(c)
                stack.append(c)
        return frozenset(out)

    def component_of(self, v: int) -> VertexSet:
        while self.parent[v] is not None:
            v = self.parent[v]
        return self.subtree(v)

    def top(self, T: Iterable[int]) -> int:
        """The vertex of subtree ``T`` closest to its forest root."""
        t = frozenset(T)
        tops = [v for v in t if self.parent[v] not in t]
        if len(tops) != 1:
            raise GraphInputError("vertex set is not a connected subtree of the forest")
        return tops[0]

    def children_within(self, v: int, T: VertexSet) -> List[int]:
        return [c for c in self.children[v] if c in T]

    def is_downward_closed(self, F: Iterable[int]) -> bool:
        f = frozenset(F)
        return all(c in f for v in f for c in self.children[v])

    def layers(self) -> List[List[int]]:
        h = max(self.depth.values(), default=-1)
        out: List[List[int]] = [[] for _ in range(h + 1)]
        for v in sorted(self.depth):
            out[self.depth[v]].append(v)
        return out


def root_forest(inst: AnnInstance) -> RootedForest:
    g = inst.graph
    forest = inst.forest
    if has_cycle(g, forest):
        raise InstanceError("M is not a feedback vertex set")
    parent: Dict[int, Optional[int]] = {}
    children: Dict[int, List[int]] = {v: [] for v in forest}
    depth: Dict[int, int] = {}
    roots = []
    for comp in connected_components(g, forest):
        root = comp[0]
        roots.append(root)
        parent[root] = None
        depth[root] = 0
        queue = [root]
        for x in queue:
            for y in sorted(g.neighbors(x) & forest):
                if y not in parent:
                    parent[y] = x
                    depth[y] = depth[x] + 1
                    children[x].append(y)
                    queue.append(y)
    return RootedForest(parent, roots, children, depth)


# -- sharp decomposition -------------------------------------------------------


def sharp_decompose(
    inst: AnnInstance, T: Iterable[int], forest: Optional[RootedForest] = None
) -> List[VertexSet]:
    """Peel lowest sharp subtrees off ``T`` until a weakly connected rest remains.

    Returns the sharp parts in removal order, followed by the remainder when it
    is non-empty. The parts tile ``T``.
    """
    forest = forest or root_forest(inst)
    rest = set(T)
    parts: List[VertexSet] = []
    while rest:
        v = _lowest_sharp_vertex(inst, forest, frozenset(rest))
        if v is None:
            parts.append(frozenset(rest))
            break
        part = _subtree_within(forest, v, rest)
        parts.append(part)
        rest -= part
    return parts


def _subtree_within(forest: RootedForest, v: int, T: Iterable[int]) -> VertexSet:
    t = frozenset(T) if not isinstance(T, frozenset) else T
    out = [v]
    stack = [v]
    while stack:
        x = stack.pop()
        for c in forest.children[x]:
            if c in t:
                out.append(c)
                stack.append(c)
    return frozenset(out)


def _lowest_sharp_vertex(inst: AnnInstance, forest: RootedForest, T: VertexSet) -> Optional[int]:
    top = forest.top(T)
    order = [top]
    for x in order:
        order.extend(forest.children_within(x, T))
    counts: Dict[int, Counter] = {}
    weak: Dict[int, bool] = {}
    for x in reversed(order):
        c = Counter(inst.graph.neighbors(x) & inst.M)
        for ch in forest.children_within(x, T):
            c.update(counts[ch])
        counts[x] = c
        weak[x] = max(c.values(), default=0) <= 1
    sharp = [
        x
        for x in order
        if not weak[x] and all(weak[ch] for ch in forest.children_within(x, T))
    ]
    if not sharp:
        return None
    return max(sharp, key=lambda x: (forest.depth[x], -x))


def solution_problem(inst: AnnInstance, S: Iterable[int]) -> Optional[str]:
    """Why ``S`` is not a solution of ``inst``, or ``None`` when it is one."""
    s = frozenset(S)
    if not s <= inst.graph.vertex_set():
        return "solution uses vertices outside the graph"
    if len(s) > inst.k:
        return f"solution has {len(s)} vertices but the budget is {inst.k}"
    if has_cycle(inst.graph, inst.graph.vertex_set() - s):
        return "graph minus solution still has a cycle"
    for h in inst.H:
        if not (h & s):
            return f"hyperedge {sorted(h)} is not hit"
    return None


def is_solution(inst: AnnInstance, S: Iterable[int]) -> bool:
    return solution_problem(inst, S) is None
