"""``subexp-fvs``: solve, generate, check and benchmark FVS instances."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from typing import List, Optional

from .generators import KINDS, format_geometry, gen_instance
from .graph import Graph, is_fvs
from .instance import AnnInstance
from .io import FORMATS, ParseError, format_graph, guess_format, parse_graph, parse_solution
from .oracle import reference_exact_fvs
from .params import NiceClassParams, preset
from .solver import SolverTimeout, derive_thresholds, solve
from .treewidth import decompose, dp_annotated_fvs

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4

ORACLE_MODE_LIMIT = 200

log = logging.getLogger("subexp_fvs")


class InputError(Exception):
    pass


def _params(args) -> NiceClassParams:
    if args.params:
        try:
            return NiceClassParams.load(args.params)
        except (OSError, ValueError, TypeError) as exc:
            raise InputError(f"cannot load parameters from {args.params}: {exc}") from None
    return preset(args.preset, args.s)


def _load(path: str, fmt: Optional[str]) -> Graph:
    try:
        return parse_graph(path, fmt)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except ParseError as exc:
        raise InputError(str(exc)) from None


def _decide(g: Graph, k: int, mode: str, params: NiceClassParams, jobs: int = 1, timeout=None):
    """Returns ``(solution_or_none, stats_dict)``."""
    start = time.monotonic()
    if mode == "auto":
        res = solve(g, k, params, jobs=jobs, timeout=timeout)
        stats = res.stats.to_json()
        stats["thresholds"] = res.thresholds.summary()
        return res.solution, stats
    if mode == "dp":
        td = decompose(g)
        sol = dp_annotated_fvs(AnnInstance(g, k, g.vertex_set()), td)
        return sol, {"width": [td.width], "millis": round((time.monotonic() - start) * 1000, 3)}
    if g.n > ORACLE_MODE_LIMIT:
        raise InputError(f"--mode oracle refuses graphs above {ORACLE_MODE_LIMIT} vertices")
    sol = reference_exact_fvs(g, k)
    return sol, {"millis": round((time.monotonic() - start) * 1000, 3)}


def cmd_solve(args) -> int:
    g = _load(args.file, args.format)
    if args.k < 0:
        raise InputError("--k must be nonnegative")
    params = _params(args)
    sol, stats = _decide(g, args.k, args.mode, params, args.jobs)
    if sol is not None and (len(sol) > args.k or not is_fvs(g, sol)):
        print("internal error: certificate failed verification", file=sys.stderr)
        return EXIT_INTERNAL
    if sol is None:
        print("NO")
    else:
        print("YES")
        print(" ".join(str(v) for v in sorted(sol)))
    if args.cert and sol is not None:
        with open(args.cert, "w") as fh:
            fh.write("YES\n" + " ".join(str(v) for v in sorted(sol)) + "\n")
    if args.stats_json:
        stats["mode"] = args.mode
        stats["decision"] = "YES" if sol is not None else "NO"
        if "thresholds" not in stats:
            stats["thresholds"] = derive_thresholds(params, args.k).summary()
        with open(args.stats_json, "w") as fh:
            json.dump(stats, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_gen(args) -> int:
    extra = {}
    for item in args.param or []:
        key, _, value = item.partition("=")
        try:
            extra[key] = float(value)
        except ValueError:
            raise InputError(f"bad --param {item!r}; expected key=value") from None
    try:
        g, shapes = gen_instance(args.kind, args.n, args.seed, **extra)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.geometry and shapes is None:
        raise InputError(f"kind {args.kind!r} has no geometry")
    fmt = args.format or guess_format(args.out)
    with open(args.out, "w") as fh:
        fh.write(format_graph(g, fmt))
    if args.geometry:
        with open(args.geometry, "w") as fh:
            fh.write(format_geometry(shapes))
    print(f"wrote {args.out}: n={g.n} m={g.m}", file=sys.stderr)
    return EXIT_OK


def cmd_check(args) -> int:
    g = _load(args.graph, args.format)
    try:
        with open(args.solution) as fh:
            ids = parse_solution(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {args.solution}: {exc.strerror}") from None
    except ParseError as exc:
        raise InputError(f"{args.solution}: {exc}") from None
    failures = []
    unknown = sorted(set(ids) - g.vertex_set())
    if unknown:
        failures.append(f"unknown vertices {unknown}")
    if len(set(ids)) != len(ids):
        failures.append("repeated vertices")
    if args.k is not None and len(set(ids)) > args.k:
        failures.append(f"size {len(set(ids))} exceeds k = {args.k}")
    if not unknown and not is_fvs(g, ids):
        failures.append("graph minus solution has a cycle")
    if failures:
        for f in failures:
            print(f"FAIL: {f}")
        return EXIT_CHECK_FAILED
    print(f"OK size={len(set(ids))}")
    return EXIT_OK


def cmd_bench(args) -> int:
    if not os.path.isdir(args.corpus):
        raise InputError(f"{args.corpus} is not a directory")
    params = _params(args)
    files = sorted(
        f for f in os.listdir(args.corpus)
        if os.path.isfile(os.path.join(args.corpus, f)) and not f.startswith(".")
    )
    print("file\tn\tm\topt\tmillis\tstatus")
    for name in files:
        path = os.path.join(args.corpus, name)
        try:
            g = parse_graph(path, args.format)
        except (ParseError, OSError) as exc:
            print(f"{name}\t-\t-\t-\t-\terror: {exc}")
            continue
        start = time.monotonic()
        k, status = 0, "ok"
        try:
            while True:
                remaining = args.timeout - (time.monotonic() - start)
                if remaining <= 0:
                    raise SolverTimeout()
                sol, _ = _decide(g, k, args.mode, params, timeout=remaining)
                if sol is not None:
                    break
                k += 1
        except SolverTimeout:
            status = "timeout"
        ms = (time.monotonic() - start) * 1000
        opt = str(k) if status == "ok" else f">={k}"
        print(f"{name}\t{g.n}\t{g.m}\t{opt}\t{ms:.1f}\t{status}")
    return EXIT_OK


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=["pseudo-disk", "s-string"], default="pseudo-disk")
    p.add_argument("--s", type=int, default=1, help="crossing bound for the s-string preset")
    p.add_argument("--params", help="JSON file with nice-class parameters (overrides --preset)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subexp-fvs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide FVS of size at most k")
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True)
    _add_params(p)
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--mode", choices=["auto", "dp", "oracle"], default="auto")
    p.add_argument("--seedless", action="store_true", help="accepted for compatibility; the solver is deterministic")
    p.add_argument("--stats-json", dest="stats_json")
    p.add_argument("--cert")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--param", action="append", help="generator parameter key=value (e.g. p=0.2)")
    p.add_argument("--geometry", help="also write the shapes to this file")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="verify a claimed feedback vertex set")
    p.add_argument("graph")
    p.add_argument("solution")
    p.add_argument("--k", type=int)
    p.add_argument("--format", choices=FORMATS)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="find the optimum of every graph in a directory")
    p.add_argument("--corpus", required=True)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--mode", choices=["auto", "dp", "oracle"], default="auto")
    _add_params(p)
    p.set_defaults(func=cmd_bench)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    level = os.environ.get("SUBEXP_FVS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        log.exception("internal failure")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
