"""Heuristic tree decompositions and an exact annotated-FVS dynamic program over them.

The DP is the usual deletion-based forest DP. A state records, for each bag
vertex, either "deleted" or the block of the surviving forest it belongs to,
plus the set of ``H`` members already hit. Edges are introduced when the first
of their endpoints is forgotten, and a member of ``H`` must be hit by the time
all of its vertices have been forgotten.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .graph import Graph
from .instance import AnnInstance, VertexSet, solution_problem


class DecompositionError(ValueError):
    """The decomposition does not fit the graph."""


@dataclass(frozen=True)
class TreeDecomposition:
    bags: Tuple[FrozenSet[int], ...]
    edges: Tuple[Tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def to_pace(self, n: int) -> str:
        lines = [f"s td {len(self.bags)} {self.width + 1} {n}"]
        for i, bag in enumerate(self.bags, 1):
            lines.append(" ".join(["b", str(i)] + [str(v) for v in sorted(bag)]))
        for a, b in self.edges:
            lines.append(f"{a + 1} {b + 1}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_pace(cls, text: str) -> "TreeDecomposition":
        bags: Dict[int, FrozenSet[int]] = {}
        edges = []
        declared = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            tok = line.split()
            try:
                if tok[0] == "s":
                    if tok[1] != "td" or len(tok) != 5:
                        raise ValueError
                    declared = int(tok[2])
                elif tok[0] == "b":
                    bags[int(tok[1])] = frozenset(int(x) for x in tok[2:])
                else:
                    a, b = int(tok[0]), int(tok[1])
                    if len(tok) != 2:
                        raise ValueError
                    edges.append((a - 1, b - 1))
            except (ValueError, IndexError):
                raise DecompositionError(f"line {lineno}: cannot parse {raw!r}") from None
        if declared is None:
            raise DecompositionError("missing 's td' header")
        if sorted(bags) != list(range(1, declared + 1)):
            raise DecompositionError("bag indices must be 1..#bags")
        return cls(tuple(bags[i] for i in range(1, declared + 1)), tuple(edges))


def elimination_order(g: Graph, heuristic: str = "min-fill") -> List[int]:
    if heuristic not in ("min-fill", "min-degree"):
        raise ValueError(f"unknown heuristic {heuristic!r}")
    adj = {v: set(g.neighbors(v)) for v in g.vertices()}
    order = []
    while adj:
        def fill(v: int) -> int:
            nb = list(adj[v])
            return sum(1 for i, a in enumerate(nb) for b in nb[i + 1 :] if b not in adj[a])

        if heuristic == "min-fill":
            v = min(adj, key=lambda x: (fill(x), len(adj[x]), x))
        else:
            v = min(adj, key=lambda x: (len(adj[x]), x))
        nb = adj.pop(v)
        for a in nb:
            adj[a].discard(v)
            adj[a] |= nb - {a}
        order.append(v)
    return order


def decompose(g: Graph, heuristic: str = "min-fill") -> TreeDecomposition:
    """Tree decomposition from an elimination ordering; always a single tree."""
    if g.n == 0:
        return TreeDecomposition((frozenset(),), ())
    order = elimination_order(g, heuristic)
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(g.neighbors(v)) for v in g.vertices()}
    bags: List[FrozenSet[int]] = []
    for v in order:
        later = {u for u in adj[v] if pos[u] > pos[v]}
        bags.append(frozenset(later | {v}))
        for a in later:
            adj[a] |= later - {a}
    edges = []
    roots = []
    for i, v in enumerate(order):
        rest = bags[i] - {v}
        if rest:
            j = min(pos[u] for u in rest)
            edges.append((i, j))
        else:
            roots.append(i)
    # chain the component roots so that the result is a tree
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(tuple(bags), tuple(edges))


def validate_decomposition(g: Graph, td: TreeDecomposition) -> bool:
    try:
        check_decomposition(g, td)
    except DecompositionError:
        return False
    return True


def check_decomposition(g: Graph, td: TreeDecomposition) -> None:
    nb = len(td.bags)
    if nb == 0:
        raise DecompositionError("no bags")
    if len(td.edges) != nb - 1:
        raise DecompositionError("decomposition is not a tree (edge count)")
    nbrs: List[List[int]] = [[] for _ in range(nb)]
    for a, b in td.edges:
        if not (0 <= a < nb and 0 <= b < nb) or a == b:
            raise DecompositionError(f"bad tree edge ({a}, {b})")
        nbrs[a].append(b)
        nbrs[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in nbrs[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != nb:
        raise DecompositionError("decomposition is not connected")
    where: Dict[int, List[int]] = {}
    for i, bag in enumerate(td.bags):
        for v in bag:
            if v not in g:
                raise DecompositionError(f"bag {i} has unknown vertex {v}")
            where.setdefault(v, []).append(i)
    for v in g.vertices():
        if v not in where:
            raise DecompositionError(f"vertex {v} is in no bag")
    for u, v in g.edges():
        if not any(v in td.bags[i] for i in where[u]):
            raise DecompositionError(f"edge ({u}, {v}) is not covered")
    for v, idx in where.items():
        inside = set(idx)
        seen = {idx[0]}
        stack = [idx[0]]
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y in inside and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != inside:
            raise DecompositionError(f"bags containing {v} are not connected")


# -- nice form -----------------------------------------------------------------

LEAF, INTRO, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass
class NiceNode:
    kind: str
    bag: Tuple[int, ...]
    vertex: Optional[int] = None
    children: Tuple[int, ...] = ()


def make_nice(td: TreeDecomposition) -> Tuple[List[NiceNode], int]:
    """Nice decomposition in post-order (children before parents); root bag is empty."""
    nb = len(td.bags)
    nbrs: List[List[int]] = [[] for _ in range(nb)]
    for a, b in td.edges:
        nbrs[a].append(b)
        nbrs[b].append(a)
    nodes: List[NiceNode] = []

    def add(kind: str, bag: Iterable[int], vertex: Optional[int] = None, children: Tuple[int, ...] = ()) -> int:
        nodes.append(NiceNode(kind, tuple(sorted(bag)), vertex, children))
        return len(nodes) - 1

    def morph(node: int, src: FrozenSet[int], dst: FrozenSet[int]) -> int:
        # forget what the parent does not have, then introduce what it adds
        cur = set(src)
        for v in sorted(src - dst):
            cur.discard(v)
            node = add(FORGET, cur, v, (node,))
        for v in sorted(dst - src):
            cur.add(v)
            node = add(INTRO, cur, v, (node,))
        return node

    # iterative post-order over the decomposition tree rooted at bag 0
    parent = {0: None}
    order = [0]
    for x in order:
        for y in nbrs[x]:
            if y not in parent:
                parent[y] = x
                order.append(y)
    top: Dict[int, int] = {}
    for x in reversed(order):
        bag = td.bags[x]
        kids = [y for y in nbrs[x] if parent.get(y) == x]
        if not kids:
            node = morph(add(LEAF, ()), frozenset(), bag)
        else:
            branches = [morph(top[y], td.bags[y], bag) for y in kids]
            node = branches[0]
            for other in branches[1:]:
                node = add(JOIN, bag, None, (node, other))
        top[x] = node
    root = morph(top[0], td.bags[0], frozenset())
    return nodes, root


# -- the dynamic program -------------------------------------------------------

DELETED = -1
State = Tuple[Tuple[int, ...], int]


def _canon(labels: Sequence[int]) -> Tuple[int, ...]:
    remap: Dict[int, int] = {}
    out = []
    for x in labels:
        if x == DELETED:
            out.append(DELETED)
        else:
            if x not in remap:
                remap[x] = len(remap)
            out.append(remap[x])
    return tuple(out)


def dp_annotated_fvs(
    inst: AnnInstance, td: Optional[TreeDecomposition] = None
) -> Optional[VertexSet]:
    """Minimum solution of the annotated instance if its size is at most ``k``."""
    sol = dp_minimum_solution(inst, td)
    if sol is None or len(sol) > inst.k:
        return None
    return sol


def dp_minimum_solution(
    inst: AnnInstance, td: Optional[TreeDecomposition] = None, limit: Optional[int] = None
) -> Optional[VertexSet]:
    """Minimum FVS hitting every member of ``H``, ignoring the budget.

    States whose cost exceeds ``limit`` are pruned; ``None`` then means that no
    solution of size at most ``limit`` exists.
    """
    g = inst.graph
    if td is None:
        td = decompose(g)
    else:
        check_decomposition(g, td)
    if limit is None:
        limit = g.n
    nodes, root = make_nice(td)
    member: Dict[int, int] = {}
    for i, h in enumerate(inst.H):
        for v in h:
            member[v] = i
    h_size = [len(h) for h in inst.H]

    # per node: how many vertices of each H have been forgotten below it
    forgotten_count: List[Dict[int, int]] = [dict() for _ in nodes]

    tables: List[Optional[Dict[State, Tuple[int, tuple]]]] = [None] * len(nodes)

    for idx, node in enumerate(nodes):
        bag = node.bag
        table: Dict[State, Tuple[int, tuple]] = {}
        if node.kind == LEAF:
            table[((), 0)] = (0, ("leaf",))
        elif node.kind == INTRO:
            (c,) = node.children
            v = node.vertex
            at = bag.index(v)
            flag = (1 << member[v]) if v in member else 0
            forgotten_count[idx] = forgotten_count[c]
            for (labels, hits), (cost, _) in tables[c].items():
                fresh = max(labels, default=-1) + 1
                kept = labels[:at] + (fresh,) + labels[at:]
                _relax(table, (_canon(kept), hits), cost, (c, (labels, hits), None))
                gone = labels[:at] + (DELETED,) + labels[at:]
                _relax(table, (gone, hits | flag), cost, (c, (labels, hits), v))
        elif node.kind == FORGET:
            (c,) = node.children
            child_bag = nodes[c].bag
            v = node.vertex
            at = child_bag.index(v)
            others = [i for i, u in enumerate(child_bag) if u != v and g.has_edge(u, v)]
            counts = dict(forgotten_count[c])
            closing = 0
            if v in member:
                i = member[v]
                counts[i] = counts.get(i, 0) + 1
                if counts[i] == h_size[i]:
                    closing = 1 << i
            forgotten_count[idx] = counts
            for (labels, hits), (cost, _) in tables[c].items():
                merged = _add_edges(labels, at, others)
                if merged is None:
                    continue
                if closing and not hits & closing:
                    continue
                new_cost = cost + (labels[at] == DELETED)
                if new_cost > limit:
                    continue
                rest = merged[:at] + merged[at + 1 :]
                _relax(table, (_canon(rest), hits & ~closing), new_cost, (c, (labels, hits), None))
        else:
            a, b = node.children
            counts = dict(forgotten_count[a])
            for i, x in forgotten_count[b].items():
                counts[i] = counts.get(i, 0) + x
            forgotten_count[idx] = counts
            right: Dict[Tuple[bool, ...], List[Tuple[State, int]]] = {}
            for key, (cost, _) in tables[b].items():
                pattern = tuple(x == DELETED for x in key[0])
                right.setdefault(pattern, []).append((key, cost))
            for lk, (lcost, _) in tables[a].items():
                pattern = tuple(x == DELETED for x in lk[0])
                for rk, rcost in right.get(pattern, ()):
                    labels = _join_blocks(lk[0], rk[0])
                    if labels is None or lcost + rcost > limit:
                        continue
                    _relax(table, (labels, lk[1] | rk[1]), lcost + rcost, (a, lk, b, rk))
        tables[idx] = table

    final = tables[root].get(((), 0))
    if final is None:
        return None
    solution = _backtrack(nodes, tables, root)
    problem = solution_problem(inst.with_(k=len(solution)), solution)
    if problem is not None or len(solution) != final[0]:
        raise AssertionError(f"DP certificate failed verification: {problem}")
    return solution


def _relax(table: Dict[State, Tuple[int, tuple]], key: State, cost: int, back: tuple) -> None:
    cur = table.get(key)
    if cur is None or cost < cur[0]:
        table[key] = (cost, back)


def _add_edges(labels: Tuple[int, ...], at: int, others: List[int]) -> Optional[Tuple[int, ...]]:
    if labels[at] == DELETED:
        return labels
    out = list(labels)
    for j in others:
        if out[j] == DELETED:
            continue
        a, b = out[at], out[j]
        if a == b:
            return None
        out = [a if x == b else x for x in out]
    return tuple(out)


def _join_blocks(left: Tuple[int, ...], right: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
    n = len(left)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for labels in (left, right):
        first: Dict[int, int] = {}
        for i, x in enumerate(labels):
            if x == DELETED:
                continue
            if x in first:
                ra, rb = find(first[x]), find(i)
                if ra == rb:
                    return None
                parent[ra] = rb
            else:
                first[x] = i
    out = [DELETED if left[i] == DELETED else find(i) for i in range(n)]
    return _canon(out)


def _backtrack(nodes: List[NiceNode], tables, root: int) -> VertexSet:
    deleted = set()
    stack = [(root, ((), 0))]
    while stack:
        idx, key = stack.pop()
        _, back = tables[idx][key]
        kind = nodes[idx].kind
        if kind == LEAF:
            continue
        if kind == JOIN:
            a, lk, b, rk = back
            stack.append((a, lk))
            stack.append((b, rk))
            continue
        c, ck, vertex = back
        if vertex is not None:
            deleted.add(vertex)
        stack.append((c, ck))
    return frozenset(deleted)
