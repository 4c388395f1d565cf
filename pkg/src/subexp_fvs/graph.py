"""Simple undirected graphs with stable integer vertex ids.

Graph values are treated as immutable: every mutation returns a new graph.
Iteration over vertices and neighbours is always in increasing id order so
that every "arbitrary" choice made downstream is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple


class GraphInputError(ValueError):
    """Raised when an operation references vertices that are not in the graph."""


class RuleInapplicable(Exception):
    """Raised when a mutation is requested whose precondition does not hold."""


class Graph:
    __slots__ = ("_adj",)

    def __init__(self, adjacency: Optional[Mapping[int, Iterable[int]]] = None):
        adj: Dict[int, FrozenSet[int]] = {}
        if adjacency:
            for v, nbrs in adjacency.items():
                adj[v] = frozenset(nbrs)
        self._adj = adj
        self._symmetrize()

    def _symmetrize(self) -> None:
        pending: Dict[int, set] = {}
        for v, nbrs in self._adj.items():
            if v in nbrs:
                raise GraphInputError(f"self-loop at {v}")
            for u in nbrs:
                if u not in self._adj or v not in self._adj[u]:
                    pending.setdefault(u, set()).add(v)
        for u, extra in pending.items():
            self._adj[u] = self._adj.get(u, frozenset()) | extra

    @classmethod
    def _raw(cls, adj: Dict[int, FrozenSet[int]]) -> "Graph":
        g = cls.__new__(cls)
        g._adj = adj
        return g

    @classmethod
    def from_edges(cls, vertices: Iterable[int], edges: Iterable[Tuple[int, int]]) -> "Graph":
        adj: Dict[int, set] = {v: set() for v in vertices}
        for u, v in edges:
            if u == v:
                raise GraphInputError(f"self-loop at {u}")
            if u not in adj or v not in adj:
                raise GraphInputError(f"edge ({u}, {v}) uses an unknown vertex")
            adj[u].add(v)
            adj[v].add(u)
        return cls._raw({v: frozenset(n) for v, n in adj.items()})

    # -- queries -----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def vertices(self) -> List[int]:
        return sorted(self._adj)

    def vertex_set(self) -> FrozenSet[int]:
        return frozenset(self._adj)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices())

    def neighbors(self, v: int) -> FrozenSet[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise GraphInputError(f"unknown vertex {v}") from None

    def sorted_neighbors(self, v: int) -> List[int]:
        return sorted(self.neighbors(v))

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((u, v) for u, nb in self._adj.items() for v in nb if u < v)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash(frozenset(self._adj.items()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # -- derived graphs ----------------------------------------------------

    def _check_known(self, vs: Iterable[int]) -> FrozenSet[int]:
        s = frozenset(vs)
        unknown = s - self._adj.keys()
        if unknown:
            raise GraphInputError(f"unknown vertices {sorted(unknown)}")
        return s

    def induced_subgraph(self, vs: Iterable[int]) -> "Graph":
        keep = self._check_known(vs)
        return Graph._raw({v: self._adj[v] & keep for v in keep})

    def remove_vertices(self, vs: Iterable[int]) -> "Graph":
        drop = self._check_known(vs)
        if not drop:
            return self
        return Graph._raw({v: nb - drop for v, nb in self._adj.items() if v not in drop})

    def add_edges(self, edges: Iterable[Tuple[int, int]]) -> "Graph":
        adj = {v: set(nb) for v, nb in self._adj.items()}
        for u, v in edges:
            if u == v or u not in adj or v not in adj:
                raise GraphInputError(f"bad edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        return Graph._raw({v: frozenset(nb) for v, nb in adj.items()})

    def relabeled(self, mapping: Mapping[int, int]) -> "Graph":
        return Graph._raw({mapping[v]: frozenset(mapping[u] for u in nb) for v, nb in self._adj.items()})

    def validate(self) -> None:
        """Walk the adjacency and raise ``GraphInputError`` on asymmetry or loops."""
        for v, nb in self._adj.items():
            if v in nb:
                raise GraphInputError(f"self-loop at {v}")
            for u in nb:
                if u not in self._adj:
                    raise GraphInputError(f"dangling neighbour {u} of {v}")
                if v not in self._adj[u]:
                    raise GraphInputError(f"asymmetric edge {v}->{u}")


def induced_subgraph(g: Graph, vs: Iterable[int]) -> Graph:
    return g.induced_subgraph(vs)


# -- degree-2 contraction ------------------------------------------------------


@dataclass(frozen=True)
class Contraction:
    """Undo record for :func:`contract_degree2_edge`.

    ``merged`` is the id carried by the new vertex; it is ``min(u, v)``.
    ``outer_u``/``outer_v`` are the neighbours of ``u``/``v`` other than each other.
    """

    u: int
    v: int
    merged: int
    outer_u: int
    outer_v: int


def contraction_record(g: Graph, u: int, v: int) -> Contraction:
    if u not in g or v not in g:
        raise GraphInputError(f"unknown vertex in ({u}, {v})")
    if not g.has_edge(u, v):
        raise RuleInapplicable(f"{u}{v} is not an edge")
    if g.degree(u) != 2 or g.degree(v) != 2:
        raise RuleInapplicable(f"{u} and {v} must both have degree 2")
    (a,) = g.neighbors(u) - {v}
    (b,) = g.neighbors(v) - {u}
    if a == b:
        raise RuleInapplicable(f"{u}{v} lies in a triangle")
    return Contraction(u, v, min(u, v), a, b)


def contract_degree2_edge(g: Graph, u: int, v: int) -> Tuple[Graph, int]:
    """Contract the edge ``uv`` between two degree-2 vertices without a common neighbour.

    The merged vertex reuses the smaller of the two ids; the other id disappears
    for good. Returns the new graph and the merged vertex id.
    """
    rec = contraction_record(g, u, v)
    return apply_contraction(g, rec), rec.merged


def apply_contraction(g: Graph, rec: Contraction) -> Graph:
    adj = dict(g._adj)
    gone = rec.v if rec.merged == rec.u else rec.u
    del adj[gone]
    adj[rec.merged] = frozenset((rec.outer_u, rec.outer_v))
    for x, old in ((rec.outer_u, rec.u), (rec.outer_v, rec.v)):
        adj[x] = (adj[x] - {old}) | {rec.merged}
    return Graph._raw(adj)


def expand_contraction(g: Graph, rec: Contraction) -> Graph:
    """Inverse of :func:`apply_contraction` on the stored record."""
    adj = dict(g._adj)
    w = rec.merged
    if adj.get(w) != frozenset((rec.outer_u, rec.outer_v)):
        raise GraphInputError("graph does not match the contraction record")
    adj[rec.outer_u] = (adj[rec.outer_u] - {w}) | {rec.u}
    adj[rec.outer_v] = (adj[rec.outer_v] - {w}) | {rec.v}
    adj[rec.u] = frozenset((rec.outer_u, rec.v))
    adj[rec.v] = frozenset((rec.outer_v, rec.u))
    return Graph._raw(adj)


# -- cycles and components -----------------------------------------------------


def connected_components(g: Graph, within: Optional[Iterable[int]] = None) -> List[List[int]]:
    """Components of ``g`` (or of ``g[within]``), each sorted, ordered by smallest id."""
    allowed = g.vertex_set() if within is None else frozenset(within)
    seen: set = set()
    comps = []
    for s in sorted(allowed):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            x = stack.pop()
            for y in g.neighbors(x):
                if y in allowed and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def find_cycle(g: Graph, within: Optional[Iterable[int]] = None) -> Optional[List[int]]:
    """Return the vertices of some cycle of ``g`` (or ``g[within]``) in cyclic order."""
    allowed = g.vertex_set() if within is None else frozenset(within)
    parent: Dict[int, Optional[int]] = {}
    for s in sorted(allowed):
        if s in parent:
            continue
        parent[s] = None
        stack = [s]
        while stack:
            x = stack.pop()
            for y in sorted(g.neighbors(x)):
                if y not in allowed or y == parent[x]:
                    continue
                if y in parent:
                    return _cycle_from_tree_paths(parent, x, y)
                parent[y] = x
                stack.append(y)
    return None


def _cycle_from_tree_paths(parent: Dict[int, Optional[int]], x: int, y: int) -> List[int]:
    # x and y lie in the same search tree and are adjacent by a non-tree edge
    path_x = [x]
    while parent[path_x[-1]] is not None:
        path_x.append(parent[path_x[-1]])
    on_x = {v: i for i, v in enumerate(path_x)}
    path_y = [y]
    while path_y[-1] not in on_x:
        path_y.append(parent[path_y[-1]])
    lca = path_y[-1]
    return path_x[: on_x[lca] + 1] + list(reversed(path_y[:-1]))


def has_cycle(g: Graph, within: Optional[Iterable[int]] = None) -> bool:
    allowed = g.vertex_set() if within is None else frozenset(within)
    # union-find is cheaper than a full search
    parent = {v: v for v in allowed}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u in allowed:
        for v in g.neighbors(u):
            if u < v and v in allowed:
                ru, rv = find(u), find(v)
                if ru == rv:
                    return True
                parent[ru] = rv
    return False


def is_forest(g: Graph, within: Optional[Iterable[int]] = None) -> bool:
    return not has_cycle(g, within)


def is_fvs(g: Graph, s: Iterable[int]) -> bool:
    """True iff deleting ``s`` from ``g`` leaves an acyclic graph."""
    drop = frozenset(s)
    return not has_cycle(g, g.vertex_set() - drop)


def is_tree(g: Graph, vs: Iterable[int]) -> bool:
    s = frozenset(vs)
    if not s:
        return False
    edges = sum(1 for u in s for w in g.neighbors(u) if w in s) // 2
    return edges == len(s) - 1 and len(connected_components(g, s)) == 1


def tree_path(g: Graph, within: Iterable[int], a: int, b: int) -> List[int]:
    """Unique path from ``a`` to ``b`` inside the tree ``g[within]``."""
    allowed = frozenset(within)
    prev: Dict[int, Optional[int]] = {a: None}
    stack = [a]
    while stack:
        x = stack.pop()
        if x == b:
            break
        for y in g.neighbors(x):
            if y in allowed and y not in prev:
                prev[y] = x
                stack.append(y)
    if b not in prev:
        raise GraphInputError(f"{a} and {b} are not connected")
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]
