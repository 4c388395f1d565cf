"""Kernelization rules KR1-KR5 and the virtual branching rule BR2.

Every rule returns a :class:`RuleOutcome` holding the child instances and one
lift per child. Lifts are checked against the parent instance every time they
run, so a wrong lift surfaces as :class:`SafetyError` rather than a wrong answer.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .graph import GraphInputError, connected_components, contract_degree2_edge, is_fvs, is_tree, tree_path
from .instance import (
    AnnInstance,
    RootedForest,
    VertexSet,
    border,
    d_M,
    hyperedges_avoiding,
    neighbors_in,
    root_forest,
    sharp_decompose,
    solution_problem,
)

Lift = Callable[[VertexSet], VertexSet]


class SafetyError(AssertionError):
    """A lift produced something that is not a solution of the parent."""


def _identity(s: VertexSet) -> VertexSet:
    return frozenset(s)


@dataclass
class RuleOutcome:
    tag: str
    parent: AnnInstance
    children: List[AnnInstance]
    lifts: List[Lift]
    detail: Dict[str, object] = field(default_factory=dict)

    @property
    def is_no(self) -> bool:
        return not self.children

    def lift(self, index: int, solution: VertexSet) -> VertexSet:
        out = frozenset(self.lifts[index](frozenset(solution)))
        problem = solution_problem(self.parent, out)
        if problem is not None:
            raise SafetyError(f"{self.tag} lift from child {index}: {problem}")
        return out


def termination_measure(inst: AnnInstance) -> Tuple[int, int, int]:
    return (2 * inst.k - len(inst.H), len(inst.forest), inst.graph.n)


# -- KR1, KR2, KR3 -------------------------------------------------------------


def apply_kr1(inst: AnnInstance) -> Optional[RuleOutcome]:
    g = inst.graph
    v = min((v for v in inst.forest if g.degree(v) <= 1), default=None)
    if v is None:
        return None
    child = inst.with_(graph=g.remove_vertices([v]))
    return RuleOutcome("KR1", inst, [child], [_identity], {"vertex": v})


def find_kr2(inst: AnnInstance) -> Optional[Tuple[int, int]]:
    """Smallest edge ``uv`` in the middle of a path ``q u v w`` of degree-2 forest vertices."""
    g = inst.graph
    forest = inst.forest
    deg2 = {v for v in forest if g.degree(v) == 2}
    for u in sorted(deg2):
        for v in sorted(g.neighbors(u)):
            if v not in deg2:
                continue
            (q,) = g.neighbors(u) - {v}
            (w,) = g.neighbors(v) - {u}
            if q in deg2 and w in deg2 and q != w:
                return u, v
    return None


def apply_kr2(inst: AnnInstance) -> Optional[RuleOutcome]:
    hit = find_kr2(inst)
    if hit is None:
        return None
    u, v = hit
    g2, merged = contract_degree2_edge(inst.graph, u, v)
    # the merged vertex keeps the id min(u, v), which is a vertex of the parent
    # lying on every cycle through the contracted edge, so the lift is the identity
    child = inst.with_(graph=g2)
    return RuleOutcome("KR2", inst, [child], [_identity], {"edge": (u, v), "merged": merged})


def apply_kr3(inst: AnnInstance, t: int) -> Optional[RuleOutcome]:
    if t < 1:
        raise ValueError("t must be positive")
    g = inst.graph
    for v in sorted(inst.forest):
        if len(g.neighbors(v) & inst.M) >= t:
            child = inst.with_(M=inst.M | {v})
            return RuleOutcome("KR3", inst, [child], [_identity], {"vertex": v})
    return None


# -- KR4 -----------------------------------------------------------------------


@dataclass(frozen=True)
class KR4Witness:
    X: VertexSet
    trees: Tuple[VertexSet, ...]
    common_parent: Optional[int]


def _subtree_neighborhoods(inst: AnnInstance, forest: RootedForest) -> Dict[int, VertexSet]:
    """``N_M(T_v)`` for every forest vertex ``v``, by one post-order pass."""
    g = inst.graph
    out: Dict[int, VertexSet] = {}
    order = []
    for root in forest.roots:
        stack = [root]
        while stack:
            x = stack.pop()
            order.append(x)
            stack.extend(forest.children[x])
    for x in reversed(order):
        acc = set(g.neighbors(x) & inst.M)
        for c in forest.children[x]:
            acc |= out[c]
        out[x] = frozenset(acc)
    return out


def find_kr4(inst: AnnInstance, forest: Optional[RootedForest] = None) -> Optional[KR4Witness]:
    forest = forest or root_forest(inst)
    nbhd = _subtree_neighborhoods(inst, forest)

    def pick(groups: Dict[VertexSet, List[int]], parent: Optional[int]) -> Optional[KR4Witness]:
        for X in sorted(groups, key=lambda s: (len(s), sorted(s))):
            roots = groups[X]
            if X and len(roots) >= len(X) + 2:
                trees = tuple(forest.subtree(v) for v in sorted(roots))
                return KR4Witness(X, trees, parent)
        return None

    by_component: Dict[VertexSet, List[int]] = defaultdict(list)
    for root in forest.roots:
        by_component[nbhd[root]].append(root)
    found = pick(by_component, None)
    if found is not None:
        return found
    for p in sorted(forest.parent):
        kids = forest.children[p]
        if len(kids) < 3:
            continue
        groups: Dict[VertexSet, List[int]] = defaultdict(list)
        for c in kids:
            groups[nbhd[c]].append(c)
        found = pick(groups, p)
        if found is not None:
            return found
    return None


def _d_tree(inst: AnnInstance, T: VertexSet, x: int) -> int:
    return len(inst.graph.neighbors(x) & T)


def pick_redundant(inst: AnnInstance, trees: Sequence[VertexSet], X: VertexSet) -> VertexSet:
    """A tree whose every doubly-attached ``M`` vertex is doubly attached to another tree too."""
    if len(trees) <= len(X):
        raise ValueError("need more trees than |X|")
    for T in trees:
        if neighbors_in(inst.graph, T, inst.M) != X:
            raise ValueError("every tree must have N_M(T) = X")
    marked = set()
    for x in sorted(X):
        for i, T in enumerate(trees):
            if _d_tree(inst, T, x) >= 2:
                marked.add(i)
                break
    for i in sorted(range(len(trees)), key=lambda i: min(trees[i])):
        if i not in marked:
            return trees[i]
    raise AssertionError("pigeonhole guarantees an unmarked tree")


def is_redundant(inst: AnnInstance, trees: Sequence[VertexSet], T: VertexSet) -> bool:
    for v in inst.M:
        if _d_tree(inst, T, v) >= 2 and not any(
            U != T and _d_tree(inst, U, v) >= 2 for U in trees
        ):
            return False
    return True


def apply_kr4(
    inst: AnnInstance, witness: KR4Witness, base: Optional[AnnInstance] = None
) -> RuleOutcome:
    """Delete a redundant tree of the witness family.

    ``base`` is the instance the child is built from; it defaults to ``inst``.
    It only differs when the witness was found with respect to an enlarged
    feedback vertex set; graph, budget and ``H`` must agree.
    """
    base = base or inst
    X, trees = witness.X, witness.trees
    T = pick_redundant(inst, trees, X)
    g = inst.graph
    others = [U for U in trees if U != T]
    in_trees = frozenset().union(*trees)

    def lift(S: VertexSet) -> VertexSet:
        if is_fvs(g, S):
            return S
        missing = X - S
        if len(missing) >= 2:
            return (S - in_trees) | X
        if len(missing) == 1:
            (x,) = missing
            if _d_tree(inst, T, x) >= 2:
                pool = [U for U in others if _d_tree(inst, U, x) >= 2]
            else:
                pool = others
            for U in pool:
                hit = sorted(U & S)
                if hit:
                    return (S - {hit[0]}) | {x}
        return S

    child = base.with_(graph=base.graph.remove_vertices(T))
    return RuleOutcome(
        "KR4",
        base,
        [child],
        [lift],
        {"X": X, "removed": T, "family": len(trees), "common_parent": witness.common_parent},
    )


# -- KR5 -----------------------------------------------------------------------


def find_kr5_paths(
    inst: AnnInstance, T: VertexSet, forest: Optional[RootedForest] = None
) -> Optional[Tuple[int, List[List[int]]]]:
    """Look for ``d_M(T) + b(T)`` disjoint paths in ``T`` whose ends all see one ``u``.

    Each sharp part of the decomposition of ``T`` contributes, for every ``u``
    with two neighbours in it, one path joining two of those neighbours.
    """
    T = frozenset(T)
    need = d_M(inst, T) + len(border(inst, T))
    if need == 0:
        return None
    g = inst.graph
    paths: Dict[int, List[List[int]]] = defaultdict(list)
    for part in sharp_decompose(inst, T, forest):
        touching: Dict[int, List[int]] = defaultdict(list)
        for v in sorted(part):
            for u in g.neighbors(v) & inst.M:
                touching[u].append(v)
        for u, ends in touching.items():
            if len(ends) >= 2:
                paths[u].append(tree_path(g, part, ends[0], ends[1]))
    for u in sorted(paths):
        if len(paths[u]) >= need:
            return u, paths[u][:need]
    return None


def check_kr5_certificate(inst: AnnInstance, T: VertexSet, u: int, paths: Sequence[Sequence[int]]) -> None:
    T = frozenset(T)
    g = inst.graph
    if u not in inst.M:
        raise GraphInputError("u must belong to M")
    need = d_M(inst, T) + len(border(inst, T))
    if need == 0 or len(paths) < need:
        raise GraphInputError(f"need {need} paths, got {len(paths)}")
    used: set = set()
    for p in paths:
        if len(p) < 2 or len(set(p)) != len(p):
            raise GraphInputError("paths must be simple with at least one edge")
        if not set(p) <= T or used & set(p):
            raise GraphInputError("paths must be disjoint and inside T")
        used |= set(p)
        if any(not g.has_edge(a, b) for a, b in zip(p, p[1:])):
            raise GraphInputError("path uses a non-edge")
        if not (g.has_edge(u, p[0]) and g.has_edge(u, p[-1])):
            raise GraphInputError("path endpoints must be adjacent to u")


def apply_kr5(
    inst: AnnInstance,
    T: VertexSet,
    u: int,
    paths: Sequence[Sequence[int]],
    base: Optional[AnnInstance] = None,
) -> RuleOutcome:
    """Take ``u`` into the solution; ``base`` plays the same role as in :func:`apply_kr4`."""
    check_kr5_certificate(inst, T, u, paths)
    base = base or inst
    detail = {"u": u, "tree": frozenset(T), "paths": len(paths)}
    if base.k < 1:
        return RuleOutcome("KR5", base, [], [], detail)
    child = AnnInstance(
        base.graph.remove_vertices([u]),
        base.k - 1,
        base.M - {u},
        hyperedges_avoiding(base.H, [u]),
    )
    return RuleOutcome("KR5", base, [child], [lambda S: S | {u}], detail)


# -- BR2 -----------------------------------------------------------------------


@dataclass(frozen=True)
class KttTilde:
    X: VertexSet
    trees: Tuple[VertexSet, ...]

    @property
    def t(self) -> int:
        return len(self.X)

    def validate(self, inst: AnnInstance, size_bound: Optional[float] = None) -> None:
        g = inst.graph
        if len(self.trees) != len(self.X) or not self.X:
            raise GraphInputError("need |X| = number of trees > 0")
        if not self.X <= inst.M:
            raise GraphInputError("X must lie in M")
        seen: set = set()
        for T in self.trees:
            if not T <= inst.forest or not is_tree(g, T):
                raise GraphInputError("each part must be a subtree of G - M")
            if seen & T:
                raise GraphInputError("trees must be disjoint")
            seen |= T
            if not self.X <= neighbors_in(g, T, inst.M):
                raise GraphInputError("X must lie in the M-neighbourhood of every tree")
            if size_bound is not None and len(T) > size_bound:
                raise GraphInputError("tree exceeds the size bound")
        for i, T in enumerate(self.trees):
            for U in self.trees[i + 1 :]:
                if neighbors_in(g, T, U):
                    raise GraphInputError("trees must be pairwise non-adjacent")


def branch_br2(inst: AnnInstance, ktt: KttTilde) -> RuleOutcome:
    """Either ``t - 1`` vertices of ``X`` go, or all but one tree must be hit."""
    ktt.validate(inst)
    t = ktt.t
    children: List[AnnInstance] = []
    lifts: List[Lift] = []
    kinds: List[str] = []
    g = inst.graph
    if inst.k >= t - 1:
        for v in sorted(ktt.X):
            Xv = ktt.X - {v}
            children.append(
                AnnInstance(g.remove_vertices(Xv), inst.k - (t - 1), inst.M - Xv, hyperedges_avoiding(inst.H, Xv))
            )
            lifts.append(lambda S, Xv=Xv: S | Xv)
            kinds.append("a")
    if inst.k >= len(inst.H) + t - 1:
        for i in range(t):
            rest = [T for j, T in enumerate(ktt.trees) if j != i]
            R = frozenset().union(*rest)
            children.append(AnnInstance(g, inst.k, inst.M | R, tuple(inst.H) + tuple(rest)))
            lifts.append(_identity)
            kinds.append("b")
    return RuleOutcome("BR2", inst, children, lifts, {"t": t, "kinds": kinds, "X": ktt.X})


def first_kernel_rule(inst: AnnInstance, t: int) -> Optional[RuleOutcome]:
    """KR1, KR2, KR3, KR4 in that order; the first that applies."""
    out = apply_kr1(inst) or apply_kr2(inst) or apply_kr3(inst, t)
    if out is not None:
        return out
    witness = find_kr4(inst)
    if witness is not None:
        return apply_kr4(inst, witness)
    return None


def forest_components(inst: AnnInstance) -> List[VertexSet]:
    return [frozenset(c) for c in connected_components(inst.graph, inst.forest)]
