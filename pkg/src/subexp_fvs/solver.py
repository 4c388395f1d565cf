"""Algorithm A over annotated instances and the top-level FVS solve."""

from __future__ import annotations

import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from .graph import Graph, is_fvs
from .instance import AnnInstance, VertexSet, is_weakly_connected, measure_subtree, root_forest, solution_problem
from .params import PSEUDO_DISK, NiceClassParams, Thresholds, derive_thresholds
from .partition import Case1, Case2, finalize_with_ztilde, partition_trees
from .preprocess import FamilyMember, iter_instance_family, two_approx_fvs
from .rules import RuleOutcome, apply_kr5, branch_br2, find_kr5_paths, first_kernel_rule, termination_measure
from .treewidth import decompose, dp_annotated_fvs

log = logging.getLogger(__name__)


class SolverTimeout(Exception):
    pass


class InvariantViolation(AssertionError):
    pass


TransitionHook = Callable[[RuleOutcome], None]


@dataclass
class SolverStats:
    rule_counts: Counter = field(default_factory=Counter)
    depth: int = 0
    max_M: int = 0
    dp_leaf_n: List[int] = field(default_factory=list)
    width: List[int] = field(default_factory=list)
    millis: float = 0.0
    family_size: int = 0
    waivers: int = 0
    soft_violations: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "rule_counts": dict(sorted(self.rule_counts.items())),
            "depth": self.depth,
            "max_M": self.max_M,
            "dp_leaf_n": list(self.dp_leaf_n),
            "width": list(self.width),
            "millis": round(self.millis, 3),
            "family_size": self.family_size,
            "waivers": self.waivers,
            "soft_violations": list(self.soft_violations),
        }

    def merge(self, other: "SolverStats") -> None:
        self.rule_counts.update(other.rule_counts)
        self.depth = max(self.depth, other.depth)
        self.max_M = max(self.max_M, other.max_M)
        self.dp_leaf_n.extend(other.dp_leaf_n)
        self.width.extend(other.width)
        self.waivers += other.waivers
        self.soft_violations.extend(other.soft_violations)


@dataclass
class SolverContext:
    """Per-run knobs and counters.

    ``check_invariants`` validates every instance and partition on the way and
    asserts the structural size lemmas; ``on_transition`` sees every rule
    outcome before the solver descends into it.
    """

    stats: SolverStats = field(default_factory=SolverStats)
    on_transition: Optional[TransitionHook] = None
    deadline: Optional[float] = None
    check_invariants: bool = False
    max_soft_logs: int = 50

    def tick(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverTimeout("deadline reached")

    def soft(self, message: str) -> None:
        if len(self.stats.soft_violations) < self.max_soft_logs:
            self.stats.soft_violations.append(message)
            log.info("soft bound violated: %s", message)


def _record(ctx: SolverContext, outcome: RuleOutcome) -> None:
    tag = outcome.tag + ("~" if outcome.detail.get("ztilde") else "")
    ctx.stats.rule_counts[tag] += 1
    before = termination_measure(outcome.parent)
    for child in outcome.children:
        if not termination_measure(child) < before:
            raise InvariantViolation(f"{outcome.tag} did not decrease the termination measure")
    if ctx.on_transition is not None:
        ctx.on_transition(outcome)


def _monitor(inst: AnnInstance, th: Thresholds, ctx: SolverContext) -> None:
    ctx.stats.max_M = max(ctx.stats.max_M, len(inst.M))
    if len(inst.M) > th.m_bound():
        ctx.soft(f"|M| = {len(inst.M)} above 4k0 + 2k0 p2 = {th.m_bound():.3g}")
    if ctx.check_invariants:
        inst.validate()


def _check_weak_trees(inst: AnnInstance, ctx: SolverContext) -> None:
    """After KR1/KR2 every weakly connected subtree has at most 16 db(T) vertices.

    Checking all subtrees is exponential; the subtrees ``T_v`` of the rooted
    forest and the components are checked instead.
    """
    forest = root_forest(inst)
    for v in forest.parent:
        T = forest.subtree(v)
        if is_weakly_connected(inst, T):
            m = measure_subtree(inst, T)
            if len(T) > 16 * m.db:
                raise InvariantViolation(f"weak tree at {v} has {len(T)} > 16 db = {16 * m.db}")


def algorithm_a(inst: AnnInstance, th: Thresholds, ctx: Optional[SolverContext] = None, depth: int = 0) -> Optional[VertexSet]:
    """Solve one annotated instance; the answer is a verified solution or ``None``."""
    ctx = ctx or SolverContext()
    ctx.stats.depth = max(ctx.stats.depth, depth)
    chain: List[RuleOutcome] = []
    cur = inst
    sol: Optional[VertexSet] = None
    while True:
        ctx.tick()
        if cur.k < 0 or len(cur.H) > cur.k:
            break
        _monitor(cur, th, ctx)
        outcome = first_kernel_rule(cur, th.t)
        if outcome is None:
            if ctx.check_invariants:
                _check_weak_trees(cur, ctx)
            outcome, leaf = _partition_step(cur, th, ctx)
            if outcome is None:
                sol = leaf
                break
        _record(ctx, outcome)
        if len(outcome.children) == 1:
            chain.append(outcome)
            cur = outcome.children[0]
            continue
        for i, child in enumerate(outcome.children):
            found = algorithm_a(child, th, ctx, depth + 1)
            if found is not None:
                sol = outcome.lift(i, found)
                break
        break
    if sol is not None:
        for outcome in reversed(chain):
            sol = outcome.lift(0, sol)
        problem = solution_problem(inst, sol)
        if problem is not None:
            raise InvariantViolation(f"assembled solution invalid: {problem}")
    return sol


def _partition_step(cur: AnnInstance, th: Thresholds, ctx: SolverContext):
    """Returns ``(outcome, None)`` when a rule fires, else ``(None, dp_answer)``."""
    forest = root_forest(cur)
    waivers: frozenset = frozenset()
    while True:
        ctx.tick()
        result = partition_trees(cur, th, forest, waivers, check=ctx.check_invariants)
        if isinstance(result, Case1):
            hit = find_kr5_paths(cur, result.tree, forest)
            if hit is not None:
                u, paths = hit
                return apply_kr5(cur, result.tree, u, paths), None
            log.debug("oversized tree at %d without KR5 certificate; waiving", result.root)
            ctx.stats.waivers += 1
            waivers = waivers | {result.root}
            continue
        if isinstance(result, Case2):
            return branch_br2(cur, result.ktt), None
        break
    partition = result.partition
    if ctx.check_invariants:
        partition.validate(cur, th, forest)
    outcome, final = finalize_with_ztilde(cur, partition, forest)
    if outcome is not None:
        return outcome, None
    plus = len(partition.plus)
    z_total = len(final.m_tilde) - len(cur.M)
    if z_total > 2 * plus:
        raise InvariantViolation(f"|Z1| + |Z2| = {z_total} > 2|T+| = {2 * plus}")
    worst = max(final.component_degrees, default=0)
    if worst > 2 * th.t + 2:
        raise InvariantViolation(f"component of G - M~ with d = {worst} > 2t + 2")
    if plus >= th.p3(th.r, th.t) * len(cur.M) and cur.M:
        ctx.soft(f"|T+| = {plus} not below p3 |M|")
    if final.forest_size > th.p4(th.r, th.t) * len(final.m_tilde):
        ctx.soft(f"|G - M~| = {final.forest_size} above p4 |M~|")
    if cur.graph.n > th.leaf_bound():
        ctx.soft(f"DP leaf has {cur.graph.n} vertices, above k0 p6")
    td = decompose(cur.graph)
    ctx.stats.dp_leaf_n.append(cur.graph.n)
    ctx.stats.width.append(td.width)
    ctx.stats.rule_counts["DP"] += 1
    return None, dp_annotated_fvs(cur, td)


# -- top level -----------------------------------------------------------------


@dataclass
class SolveResult:
    solution: Optional[VertexSet]
    stats: SolverStats
    thresholds: Thresholds
    early: bool = False

    @property
    def decision(self) -> bool:
        return self.solution is not None


def _verify_top(g0: Graph, k0: int, sol: VertexSet) -> VertexSet:
    if len(sol) > k0 or not is_fvs(g0, sol):
        raise InvariantViolation("final certificate failed verification")
    return sol


def _solve_member(args):
    member, th, check, deadline = args
    ctx = SolverContext(check_invariants=check, deadline=deadline)
    sol = algorithm_a(AnnInstance(member.graph, member.k, member.M), th, ctx)
    return sol, ctx.stats


def solve(
    g0: Graph,
    k0: int,
    params: NiceClassParams = PSEUDO_DISK,
    *,
    r: Optional[int] = None,
    t: Optional[int] = None,
    c1: float = 16.0,
    p3_scale: float = 1.0,
    ctx: Optional[SolverContext] = None,
    jobs: int = 1,
    timeout: Optional[float] = None,
    shortcut: bool = True,
) -> SolveResult:
    """Decide whether ``g0`` has a feedback vertex set of size at most ``k0``.

    With ``shortcut=False`` the bootstrap never answers by itself, so every
    instance goes through the family and algorithm A (used by the tests).
    """
    start = time.monotonic()
    ctx = ctx or SolverContext()
    if timeout is not None:
        ctx.deadline = start + timeout
    th = derive_thresholds(params, max(k0, 0), r=r, t=t, c1=c1, p3_scale=p3_scale)

    def done(sol, early=False):
        ctx.stats.millis = (time.monotonic() - start) * 1000
        return SolveResult(sol, ctx.stats, th, early)

    if k0 < 0:
        return done(None, True)
    M0 = two_approx_fvs(g0)
    if shortcut and len(M0) <= k0:
        return done(_verify_top(g0, k0, M0), True)
    if shortcut and len(M0) > 2 * k0:
        return done(None, True)

    def on_branch(member, hit, children):
        ctx.tick()
        outcome = _br1_outcome(member, children)
        before = termination_measure(outcome.parent)
        if not all(termination_measure(c) < before for c in outcome.children):
            raise InvariantViolation("BR1 did not decrease the termination measure")
        ctx.stats.rule_counts["BR1"] += 1
        if ctx.on_transition is not None:
            ctx.on_transition(outcome)

    members = iter_instance_family(g0, k0, th.r, M0, on_branch)
    if jobs > 1:
        members = list(members)
        ctx.stats.family_size = len(members)
        pool = ProcessPoolExecutor(max_workers=jobs)
        try:
            tasks = [(m, th, ctx.check_invariants, ctx.deadline) for m in members]
            # map yields in submission order, so the first YES seen is the first in family order
            for member, (sol, stats) in zip(members, pool.map(_solve_member, tasks)):
                ctx.stats.merge(stats)
                if sol is not None:
                    return done(_verify_top(g0, k0, member.lift_solution(sol)))
        finally:
            pool.shutdown(wait=False, cancel_futures=True)
        return done(None)
    for member in members:
        ctx.stats.family_size += 1
        sol = algorithm_a(AnnInstance(member.graph, member.k, member.M), th, ctx)
        if sol is not None:
            return done(_verify_top(g0, k0, member.lift_solution(sol)))
    return done(None)


def _br1_outcome(member: FamilyMember, children: List[FamilyMember]) -> RuleOutcome:
    parent = AnnInstance(member.graph, member.k, member.M)
    kids = [AnnInstance(c.graph, c.k, c.M) for c in children]
    lifts = [lambda S, X=c.lift - member.lift: S | X for c in children]
    return RuleOutcome("BR1", parent, kids, lifts)
