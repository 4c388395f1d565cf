"""Layered construction of t-uniform partitions, K~_{t,t} extraction and Z-sets."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from .graph import connected_components, is_tree
from .instance import AnnInstance, RootedForest, VertexSet, border, neighbors_in, root_forest
from .params import Thresholds
from .rules import KttTilde, RuleOutcome, apply_kr4, apply_kr5, find_kr4, find_kr5_paths

log = logging.getLogger(__name__)


class PartitionError(ValueError):
    """A partition or its input violates the routine's contract."""


class ExtractionFailed(Exception):
    """The pigeonhole step found no ``t`` trees with a common neighbourhood."""


@dataclass(frozen=True)
class Part:
    root: int
    vertices: VertexSet
    nbhd: VertexSet
    plus: bool

    def dump(self, inst: AnnInstance) -> str:
        ids = ",".join(str(v) for v in sorted(self.vertices))
        b = len(border(inst, self.vertices))
        sign = "+" if self.plus else "-"
        return f"{sign} root={self.root} d_M={len(self.nbhd)} b={b} size={len(self.vertices)} vertices={ids}"


@dataclass
class UniformPartition:
    parts: List[Part]
    waivers: FrozenSet[int] = frozenset()

    @property
    def plus(self) -> List[Part]:
        return [p for p in self.parts if p.plus]

    @property
    def minus(self) -> List[Part]:
        return [p for p in self.parts if not p.plus]

    @property
    def covered(self) -> VertexSet:
        return frozenset().union(*(p.vertices for p in self.parts)) if self.parts else frozenset()

    def dump(self, inst: AnnInstance) -> str:
        return "\n".join(p.dump(inst) for p in sorted(self.parts, key=lambda p: p.root))

    def validate(
        self,
        inst: AnnInstance,
        thresholds: Thresholds,
        forest: Optional[RootedForest] = None,
        F: Optional[Iterable[int]] = None,
    ) -> None:
        """Check the three t-uniform conditions; trees rooted in ``waivers`` skip the size bound."""
        forest = forest or root_forest(inst)
        t, r = thresholds.t, thresholds.r
        target = inst.forest if F is None else frozenset(F)
        seen: set = set()
        roots: Dict[int, Part] = {}
        for p in self.parts:
            if seen & p.vertices:
                raise PartitionError(f"trees overlap at root {p.root}")
            seen |= p.vertices
            if not is_tree(inst.graph, p.vertices) or forest.top(p.vertices) != p.root:
                raise PartitionError(f"part rooted at {p.root} is not a subtree rooted there")
            nbhd = neighbors_in(inst.graph, p.vertices, inst.M)
            if nbhd != p.nbhd or p.plus != (len(nbhd) >= t):
                raise PartitionError(f"stale classification at root {p.root}")
            if len(nbhd) > 2 * t:
                raise PartitionError(f"d_M = {len(nbhd)} exceeds 2t at root {p.root}")
            db = max(len(nbhd), len(border(inst, p.vertices)))
            if p.root not in self.waivers and len(p.vertices) > thresholds.p1(r, db):
                raise PartitionError(f"tree at root {p.root} exceeds p1(r, db)")
            roots[p.root] = p
        if seen != target:
            raise PartitionError("parts do not tile the forest")
        if not forest.is_downward_closed(target):
            raise PartitionError("covered forest is not downward closed")
        for p in self.parts:
            par = forest.parent[p.root]
            if p.plus or par is None or par not in target:
                continue
            owner = roots.get(par)
            if owner is None or not owner.plus:
                raise PartitionError(f"minus tree at {p.root} hangs below a non-root or a minus tree")


@dataclass(frozen=True)
class Case1:
    tree: VertexSet
    root: int


@dataclass(frozen=True)
class Case2:
    ktt: KttTilde


@dataclass(frozen=True)
class Case3:
    partition: UniformPartition


PartitionOutcome = Union[Case1, Case2, Case3]


def partition_trees(
    inst: AnnInstance,
    thresholds: Thresholds,
    forest: Optional[RootedForest] = None,
    waivers: FrozenSet[int] = frozenset(),
    check: bool = False,
) -> PartitionOutcome:
    """Deepest layer first, grow trees upward absorbing minus-children.

    ``check`` validates the partial partition after every layer.
    """
    g = inst.graph
    forest = forest or root_forest(inst)
    t, r = thresholds.t, thresholds.r
    for v in inst.forest:
        if len(g.neighbors(v) & inst.M) >= t:
            raise PartitionError(f"vertex {v} has d_M >= t; apply KR3 first")
    parts: Dict[int, Part] = {}
    n_plus = 0
    m_size = len(inst.M)
    processed: set = set()
    for layer in reversed(forest.layers()):
        for v in layer:
            own = g.neighbors(v) & inst.M
            minus_kids = [c for c in forest.children[v] if not parts[c].plus]
            union = set(own)
            for c in minus_kids:
                union |= parts[c].nbhd
            if len(union) < t:
                chosen = minus_kids
            else:
                chosen = _minimal_reaching(own, [parts[c] for c in minus_kids], t)
            vertices = frozenset([v]).union(*(parts[c].vertices for c in chosen))
            nbhd = frozenset(own).union(*(parts[c].nbhd for c in chosen))
            db = max(len(nbhd), len(border(inst, vertices)))
            if v not in waivers and len(vertices) > thresholds.p1(r, db):
                return Case1(vertices, v)
            for c in chosen:
                del parts[c]
            part = Part(v, vertices, nbhd, len(nbhd) >= t)
            parts[v] = part
            processed.update(vertices)
            if part.plus:
                n_plus += 1
                if n_plus >= thresholds.p3(r, t) * m_size:
                    current = UniformPartition(list(parts.values()), waivers)
                    try:
                        return Case2(extract_ktt(inst, current, thresholds))
                    except ExtractionFailed as exc:
                        thresholds.p3_scale *= 2
                        log.info("K~tt extraction failed (%s); p3 scale now %g", exc, thresholds.p3_scale)
        if check:
            UniformPartition(list(parts.values()), waivers).validate(inst, thresholds, forest, processed)
    return Case3(UniformPartition(sorted(parts.values(), key=lambda p: p.root), waivers))


def _minimal_reaching(own: FrozenSet[int], kids: List[Part], t: int) -> List[int]:
    """Inclusion-wise minimal set of child parts lifting ``|N_M|`` to at least ``t``."""
    chosen: List[Part] = []
    acc = set(own)
    for p in kids:
        chosen.append(p)
        acc |= p.nbhd
        if len(acc) >= t:
            break
    # one pruning pass is enough: d_M is monotone under inclusion
    for p in list(chosen):
        rest = [q for q in chosen if q is not p]
        if len(frozenset(own).union(*(q.nbhd for q in rest))) >= t:
            chosen = rest
    return [p.root for p in chosen]


def extract_ktt(inst: AnnInstance, partition: UniformPartition, thresholds: Thresholds) -> KttTilde:
    t, r = thresholds.t, thresholds.r
    plus = sorted(partition.plus, key=lambda p: p.root)
    if len(plus) < thresholds.p3(r, t) * len(inst.M):
        raise PartitionError("too few plus trees for extraction")
    g = inst.graph
    owner = {v: i for i, p in enumerate(plus) for v in p.vertices}
    adj: List[set] = [set() for _ in plus]
    for i, p in enumerate(plus):
        for v in p.vertices:
            for w in g.neighbors(v):
                j = owner.get(w)
                if j is not None and j != i:
                    adj[i].add(j)
    colour: Dict[int, int] = {}
    for s in range(len(plus)):
        if s in colour:
            continue
        colour[s] = 0
        queue = [s]
        for x in queue:
            for y in sorted(adj[x]):
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    queue.append(y)
    low_degree = [i for i in range(len(plus)) if len(adj[i]) <= 2]
    classes = [[i for i in low_degree if colour[i] == c] for c in (0, 1)]
    picked = classes[0] if len(classes[0]) >= len(classes[1]) else classes[1]
    bound = thresholds.p2(r, t)
    groups: Dict[VertexSet, List[int]] = {}
    for i in picked:
        if len(plus[i].vertices) <= bound:
            groups.setdefault(plus[i].nbhd, []).append(i)
    best = sorted(groups.items(), key=lambda kv: (-len(kv[1]), sorted(kv[0])))
    for X, members in best:
        if len(members) >= t and len(X) >= t:
            chosen = members[:t]
            ktt = KttTilde(frozenset(sorted(X)[:t]), tuple(plus[i].vertices for i in chosen))
            ktt.validate(inst, bound)
            return ktt
        break
    raise ExtractionFailed(f"largest common-neighbourhood group has {len(best[0][1]) if best else 0} < {t} trees")


def compute_z_sets(
    inst: AnnInstance, partition: UniformPartition, forest: Optional[RootedForest] = None
) -> Tuple[VertexSet, VertexSet]:
    """``Z1`` = plus roots; ``Z2`` = other forest vertices with three branches reaching ``Z1``.

    In a forest, edge-disjoint paths leaving a vertex use distinct incident
    edges, so counting branches that contain a ``Z1`` vertex is exact.
    """
    forest = forest or root_forest(inst)
    z1 = frozenset(p.root for p in partition.plus)
    below: Dict[int, int] = {}
    z2 = set()
    for root in forest.roots:
        order = [root]
        for x in order:
            order.extend(forest.children[x])
        for x in reversed(order):
            below[x] = (x in z1) + sum(below[c] for c in forest.children[x])
        total = below[root]
        for x in order:
            if x in z1:
                continue
            branches = sum(1 for c in forest.children[x] if below[c] > 0)
            if forest.parent[x] is not None and total - below[x] > 0:
                branches += 1
            if branches >= 3:
                z2.add(x)
    return z1, frozenset(z2)


@dataclass
class FinalCheck:
    """What the M~ step measured when no rule fired."""

    m_tilde: VertexSet
    component_degrees: List[int] = field(default_factory=list)
    forest_size: int = 0


def finalize_with_ztilde(
    inst: AnnInstance, partition: UniformPartition, forest: Optional[RootedForest] = None
) -> Tuple[Optional[RuleOutcome], FinalCheck]:
    """Try KR4 then KR5 with respect to ``M~ = M + Z1 + Z2``; children keep ``M``.

    The KR5 child deletes ``u`` only (the printed variant deleting the whole
    component is not safe in general).
    """
    z1, z2 = compute_z_sets(inst, partition, forest)
    m_tilde = inst.M | z1 | z2
    tilde = inst.with_(M=m_tilde)
    tilde_forest = root_forest(tilde)
    witness = find_kr4(tilde, tilde_forest)
    check = FinalCheck(m_tilde)
    if witness is not None:
        out = apply_kr4(tilde, witness, base=inst)
        out.detail["ztilde"] = True
        return out, check
    comps = [frozenset(c) for c in connected_components(inst.graph, tilde.forest)]
    for T in comps:
        hit = find_kr5_paths(tilde, T, tilde_forest)
        if hit is not None:
            u, paths = hit
            out = apply_kr5(tilde, T, u, paths, base=inst)
            out.detail["ztilde"] = True
            return out, check
    check.component_degrees = [len(neighbors_in(inst.graph, T, m_tilde)) for T in comps]
    check.forest_size = len(tilde.forest)
    return None, check
