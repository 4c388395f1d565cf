"""Instance generators with exact integer geometry.

All randomness comes from ``random.Random(seed)`` (Mersenne Twister), whose
output for a given seed is fixed across platforms and Python versions, so a
corpus is reproducible from ``(kind, n, seed, params)`` alone.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .graph import Graph

GRID = 10**6

Point = Tuple[int, int]


@dataclass(frozen=True)
class Segment:
    p: Point
    q: Point

    def __post_init__(self) -> None:
        if self.p == self.q:
            raise ValueError("segment endpoints must be distinct")


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: int

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError("radius must be positive")


Shape = Union[Segment, Disk]


def _orient(a: Point, b: Point, c: Point) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def _on_segment(a: Point, b: Point, c: Point) -> bool:
    """``c`` is collinear with ``ab`` and lies in its bounding box."""
    return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])


def segments_intersect(s: Segment, t: Segment) -> bool:
    """Closed-segment intersection; touching counts."""
    a, b, c, d = s.p, s.q, t.p, t.q
    o1, o2, o3, o4 = _orient(a, b, c), _orient(a, b, d), _orient(c, d, a), _orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    return (
        (o1 == 0 and _on_segment(a, b, c))
        or (o2 == 0 and _on_segment(a, b, d))
        or (o3 == 0 and _on_segment(c, d, a))
        or (o4 == 0 and _on_segment(c, d, b))
    )


def disks_intersect(a: Disk, b: Disk) -> bool:
    dx = a.center[0] - b.center[0]
    dy = a.center[1] - b.center[1]
    return dx * dx + dy * dy <= (a.radius + b.radius) ** 2


def _intersection_graph(shapes: Sequence[Shape], meets) -> Graph:
    edges = [
        (i, j)
        for i in range(len(shapes))
        for j in range(i + 1, len(shapes))
        if meets(shapes[i], shapes[j])
    ]
    return Graph.from_edges(range(len(shapes)), edges)


def segment_intersection_graph(segments: Sequence[Segment]) -> Graph:
    return _intersection_graph(segments, segments_intersect)


def disk_intersection_graph(disks: Sequence[Disk]) -> Graph:
    return _intersection_graph(disks, disks_intersect)


def geometry_graph(shapes: Sequence[Shape]) -> Graph:
    def meets(a: Shape, b: Shape) -> bool:
        if isinstance(a, Segment) and isinstance(b, Segment):
            return segments_intersect(a, b)
        if isinstance(a, Disk) and isinstance(b, Disk):
            return disks_intersect(a, b)
        raise ValueError("mixed segment/disk sets are not supported")

    return _intersection_graph(shapes, meets)


# -- random instances ----------------------------------------------------------

KINDS = ("er", "segment", "2dir", "unit-disk", "disk")

# Geometric kinds are sized from a target average degree unless an explicit
# length/radius is given; the scale factors are rough uniform-square estimates.
DEFAULTS: Dict[str, Dict[str, Optional[float]]] = {
    "er": {"p": 0.3},
    "segment": {"degree": 3.0, "length": None},
    "2dir": {"degree": 3.0, "length": None},
    "unit-disk": {"degree": 3.0, "radius": None},
    "disk": {"degree": 3.0, "spread": 0.5},
}


def _scale(kind: str, n: int, degree: float) -> float:
    n = max(n, 2)
    if kind == "segment":
        return min(1.0, (math.pi * degree / (2 * (n - 1))) ** 0.5 * 1.7)
    if kind == "2dir":
        return min(1.0, (2 * degree / (n - 1)) ** 0.5 * 1.9)
    # disks of radius R meet when centres are within 2R
    return min(0.5, (degree / (4 * math.pi * (n - 1))) ** 0.5)


def _clip(x: float) -> int:
    return max(0, min(GRID, int(round(x))))


def _random_segment(rng: random.Random, length: float, axis: Optional[int]) -> Segment:
    while True:
        x, y = rng.randrange(GRID + 1), rng.randrange(GRID + 1)
        ell = rng.uniform(0.5, 1.0) * length * GRID
        if axis is None:
            dx, dy = rng.uniform(-1, 1), rng.uniform(-1, 1)
            norm = (dx * dx + dy * dy) ** 0.5 or 1.0
            dx, dy = dx / norm, dy / norm
        elif axis == 0:
            dx, dy = 1.0, 0.0
        else:
            dx, dy = 0.0, 1.0
        q = (_clip(x + dx * ell), _clip(y + dy * ell))
        if q != (x, y):
            return Segment((x, y), q)


def gen_instance(
    kind: str, n: int, seed: int, **params: float
) -> Tuple[Graph, Optional[List[Shape]]]:
    """Deterministic random graph; geometric kinds also return their shapes.

    Lengths and radii are fractions of the grid side.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    opts = dict(DEFAULTS[kind])
    unknown = set(params) - set(opts)
    if unknown:
        raise ValueError(f"unknown parameters for {kind}: {sorted(unknown)}")
    opts.update(params)
    rng = random.Random(f"{kind}:{n}:{seed}")
    if kind == "er":
        p = opts["p"]
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        return Graph.from_edges(range(n), edges), None
    shapes: List[Shape]
    if kind in ("segment", "2dir"):
        length = opts["length"] or _scale(kind, n, opts["degree"])
        if kind == "segment":
            shapes = [_random_segment(rng, length, None) for _ in range(n)]
        else:
            shapes = [_random_segment(rng, length, rng.randrange(2)) for _ in range(n)]
    elif kind == "unit-disk":
        rad = max(1, int((opts["radius"] or _scale(kind, n, opts["degree"])) * GRID))
        shapes = [Disk((rng.randrange(GRID + 1), rng.randrange(GRID + 1)), rad) for _ in range(n)]
    else:
        mean = _scale(kind, n, opts["degree"]) * GRID
        lo, hi = int(mean * (1 - opts["spread"])), int(mean * (1 + opts["spread"]))
        shapes = [
            Disk((rng.randrange(GRID + 1), rng.randrange(GRID + 1)), max(1, rng.randint(lo, hi)))
            for _ in range(n)
        ]
    return geometry_graph(shapes), shapes


# -- neighbourhood complexity --------------------------------------------------


def gen_outerstring_counterexample(r: int, limit: int = 12) -> Tuple[Graph, frozenset]:
    """Clique ``A`` on ``r`` vertices plus one vertex per subset of ``A`` seeing exactly it."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r > limit:
        raise ValueError(f"r = {r} exceeds the 2^r growth guard {limit}")
    A = list(range(r))
    edges = [(a, b) for a in A for b in A if a < b]
    for mask in range(2**r):
        v = r + mask
        edges.extend((a, v) for a in A if mask >> a & 1)
    return Graph.from_edges(range(r + 2**r), edges), frozenset(A)


def neighborhood_complexity(g: Graph, A: Iterable[int]) -> int:
    a = frozenset(A)
    missing = a - g.vertex_set()
    if missing:
        raise ValueError(f"A has vertices outside the graph: {sorted(missing)}")
    return len({g.neighbors(v) & a for v in g.vertices()})


# -- geometry files ------------------------------------------------------------


class GeometryFormatError(ValueError):
    pass


def parse_geometry(text: str) -> List[Shape]:
    shapes: List[Shape] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            nums = [int(x) for x in tok[1:]]
            if tok[0] == "S" and len(nums) == 4:
                shapes.append(Segment((nums[0], nums[1]), (nums[2], nums[3])))
            elif tok[0] == "D" and len(nums) == 3:
                shapes.append(Disk((nums[0], nums[1]), nums[2]))
            else:
                raise ValueError("expected 'S x1 y1 x2 y2' or 'D cx cy r'")
        except ValueError as exc:
            raise GeometryFormatError(f"line {lineno}: {exc}") from None
    return shapes


def format_geometry(shapes: Sequence[Shape]) -> str:
    out = []
    for s in shapes:
        if isinstance(s, Segment):
            out.append(f"S {s.p[0]} {s.p[1]} {s.q[0]} {s.q[1]}")
        else:
            out.append(f"D {s.center[0]} {s.center[1]} {s.radius}")
    return "\n".join(out) + ("\n" if out else "")
