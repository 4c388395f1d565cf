"""DIMACS and edge-list graph files (1-indexed vertex ids)."""

from __future__ import annotations

import os
from typing import List, Optional, Tuple

from .graph import Graph

FORMATS = ("dimacs", "edgelist")


class ParseError(ValueError):
    def __init__(self, message: str, lineno: Optional[int] = None, path: Optional[str] = None):
        where = ""
        if path:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)
        self.message = message
        self.lineno = lineno


def guess_format(path: str) -> str:
    ext = os.path.splitext(path)[1].lower()
    if ext in (".dimacs", ".col", ".gr", ".dim"):
        return "dimacs"
    return "edgelist"


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno) from None


def _build(n: int, edges: List[Tuple[int, int, int]]) -> Graph:
    seen = set()
    for u, v, lineno in edges:
        for x in (u, v):
            if not 1 <= x <= n:
                raise ParseError(f"vertex {x} outside 1..{n}", lineno)
        if u == v:
            raise ParseError(f"self-loop at {u}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge {u} {v}", lineno)
        seen.add(key)
    return Graph.from_edges(range(1, n + 1), sorted(seen))


def parse_dimacs(text: str) -> Graph:
    header = None
    edges: List[Tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "p":
            if header is not None:
                raise ParseError("second 'p' line", lineno)
            if len(tok) != 4 or tok[1] not in ("edge", "col"):
                raise ParseError("expected 'p edge <n> <m>'", lineno)
            header = (_int(tok[2], lineno), _int(tok[3], lineno), lineno)
        elif tok[0] == "e":
            if header is None:
                raise ParseError("edge before 'p' line", lineno)
            if len(tok) != 3:
                raise ParseError("expected 'e <u> <v>'", lineno)
            edges.append((_int(tok[1], lineno), _int(tok[2], lineno), lineno))
        else:
            raise ParseError(f"unknown line type {tok[0]!r}", lineno)
    if header is None:
        raise ParseError("missing 'p edge <n> <m>' line")
    n, m, hl = header
    if n < 0 or m < 0:
        raise ParseError("negative counts", hl)
    if len(edges) != m:
        raise ParseError(f"header announces {m} edges, found {len(edges)}", hl)
    return _build(n, edges)


def parse_edgelist(text: str) -> Graph:
    header = None
    edges: List[Tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        tok = line.split()
        if not tok:
            continue
        if len(tok) != 2:
            raise ParseError("expected two integers", lineno)
        a, b = _int(tok[0], lineno), _int(tok[1], lineno)
        if header is None:
            header = (a, b, lineno)
        else:
            edges.append((a, b, lineno))
    if header is None:
        raise ParseError("missing '<n> <m>' header")
    n, m, hl = header
    if n < 0 or m < 0:
        raise ParseError("negative counts", hl)
    if len(edges) != m:
        raise ParseError(f"header announces {m} edges, found {len(edges)}", hl)
    return _build(n, edges)


def parse_graph_text(text: str, fmt: str) -> Graph:
    if fmt == "dimacs":
        return parse_dimacs(text)
    if fmt == "edgelist":
        return parse_edgelist(text)
    raise ValueError(f"unknown format {fmt!r}")


def parse_graph(path: str, fmt: Optional[str] = None) -> Graph:
    fmt = fmt or guess_format(path)
    with open(path) as fh:
        text = fh.read()
    try:
        return parse_graph_text(text, fmt)
    except ParseError as exc:
        raise ParseError(exc.message, exc.lineno, path) from None


def _one_indexed(g: Graph) -> Tuple[int, List[Tuple[int, int]]]:
    vs = g.vertices()
    if vs == list(range(1, len(vs) + 1)):
        return len(vs), g.edges()
    # relabel densely, preserving order
    label = {v: i + 1 for i, v in enumerate(vs)}
    return len(vs), sorted((label[u], label[v]) for u, v in g.edges())


def format_graph(g: Graph, fmt: str) -> str:
    n, edges = _one_indexed(g)
    if fmt == "dimacs":
        lines = [f"p edge {n} {len(edges)}"] + [f"e {u} {v}" for u, v in edges]
    elif fmt == "edgelist":
        lines = [f"{n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return "\n".join(lines) + "\n"


def write_graph(g: Graph, path: str, fmt: Optional[str] = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g, fmt or guess_format(path)))


def parse_solution(text: str) -> List[int]:
    """Vertex ids from a certificate file; a leading ``YES`` and ``#`` comments are ignored."""
    ids: List[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        for tok in raw.split("#", 1)[0].split():
            if tok.upper() == "YES" and not ids:
                continue
            ids.append(_int(tok, lineno))
    return ids
