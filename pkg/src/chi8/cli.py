"""Command-line interface: ``chi8 <command> ...``.

Stdout is tab-separated ``key<TAB>value`` lines unless a command prints a
file format (points, DIMACS).  Solver commands also write one JSON run
record to stderr, or to ``--record PATH`` when given.

Exit codes: 0 success, 1 verification mismatch, 2 usage or parse error,
3 budget exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import catalog
from .augment import (
    BY_DEGREE, EXACT, HEURISTIC_THEN_EXACT, LEXICOGRAPHIC, RANDOM,
    AugmentPolicy, augment, candidate_pool, replay, score,
)
from .coloring import (
    BoundReport, chi_lower, dsatur, encode_kcoloring, improve_coloring, is_valid_coloring,
)
from .geometry import (
    DistGraph, GraphFormatError, build_graph, export_dimacs, from_edges, import_dimacs,
    stats, write_points,
)
from .mis_exact import (
    DEGENERACY, DEGREE, SearchBudget, brute_force_mis, max_independent_set,
)
from .mis_heuristic import HeuristicConfig, heuristic_mis, verify_witness
from .notation import NotationError, count, expand, parse

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


@dataclass
class RunRecord:
    command: str
    inputs_digest: str
    outputs: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def dump(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode())
        h.update(b"\0")
    return h.hexdigest()[:16]


def _emit(args, rec: RunRecord) -> None:
    if getattr(args, "record", None):
        with open(args.record, "a", encoding="utf-8") as fh:
            fh.write(rec.dump() + "\n")
    else:
        print(rec.dump(), file=sys.stderr)


def _kv(key: str, value) -> None:
    print(f"{key}\t{value}")


# --------------------------------------------------------------------------
# graph sources

_SMALL = re.compile(r"^([KCE])(\d+)$")


def load_graph(source: str) -> DistGraph:
    """Catalog name, ``K<n>``/``C<n>``/``E<n>`` (complete, cycle, edgeless),
    a DIMACS graph file, or a points file (one 8-integer row per line)."""
    if source in catalog.NAMES or source in catalog.STUBS:
        try:
            return catalog.build(source)
        except catalog.CatalogError as exc:
            raise UsageError(str(exc)) from exc
    m = _SMALL.match(source)
    if m:
        kind, n = m.group(1), int(m.group(2))
        if kind == "K":
            edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
        elif kind == "C":
            if n < 3:
                raise UsageError("cycle needs at least 3 vertices")
            edges = [(i, (i + 1) % n) for i in range(n)]
        else:
            edges = []
        return from_edges(n, edges, name=source)
    path = Path(source)
    if not path.is_file():
        raise UsageError(
            f"unknown graph {source!r}; known: {', '.join(catalog.NAMES)}, K<n>, C<n>, E<n>, or a file"
        )
    text = path.read_text(encoding="utf-8")
    if any(l.startswith("p ") for l in text.splitlines()):
        return import_dimacs(text, name=path.name)
    rows = [tuple(int(x) for x in l.split()) for l in text.splitlines() if l.strip() and not l.startswith("#")]
    return build_graph(rows, name=path.name)


def _budget(args) -> SearchBudget:
    return SearchBudget(max_nodes=args.nodes, max_time=args.budget)


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# --------------------------------------------------------------------------
# commands


def cmd_expand(args) -> int:
    expr = parse(args.expr, args.dim)
    if args.list:
        sys.stdout.write(write_points(sorted(expand(expr))))
    else:
        print(count(expr))
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.name not in catalog.NAMES + catalog.STUBS:
        raise UsageError(f"unknown graph {args.name!r}; known: {', '.join(catalog.NAMES)}")
    if args.action == "verify":
        try:
            report = catalog.verify(args.name)
        except catalog.NotReconstructible as exc:
            raise UsageError(str(exc)) from exc
        for line in report.lines():
            print(line)
        _kv("result", "match" if report.ok else "mismatch")
        return EXIT_OK if report.ok else EXIT_MISMATCH
    g = load_graph(args.name)
    if args.action == "build":
        st = stats(g)
        for k in ("v", "e", "deg_min", "deg_max"):
            _kv(k, getattr(st, k))
        return EXIT_OK
    if args.format == "dimacs":
        _write(args.output, export_dimacs(g, [f"{g.name}: squared distance {g.forbidden_sq}"]))
    else:
        _write(args.output, write_points(g.points or ()))
    return EXIT_OK


def cmd_alpha(args) -> int:
    g = load_graph(args.graph)
    t0 = time.perf_counter()
    if args.heuristic:
        cfg = HeuristicConfig(rng_seed=args.seed, iterations=args.iterations,
                              restarts=args.restarts, target=args.target)
        r = heuristic_mis(g, cfg)
        if not verify_witness(g, r.witness):
            raise AssertionError("heuristic witness is not independent")
    else:
        r = max_independent_set(g, _budget(args), ordering=args.ordering)
    _kv("graph", g.name or args.graph)
    _kv("alpha" if r.exact else "alpha>=", r.size)
    _kv("exact", int(r.exact))
    _kv("method", r.method)
    _kv("nodes", r.nodes_explored)
    _kv("witness", ",".join(map(str, r.witness)))
    rec = RunRecord(
        "alpha", _digest(export_dimacs(g), str(vars(args).get("seed"))),
        r.record(g.name), {"total": round(time.perf_counter() - t0, 3)},
    )
    _emit(args, rec)
    if args.expect is not None and r.exact and r.size != args.expect:
        return EXIT_MISMATCH
    return EXIT_BUDGET if r.budget_hit else EXIT_OK


def _parse_alpha_arg(text: str):
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--alpha takes a positive integer or 'auto'")
    if value < 1:
        raise argparse.ArgumentTypeError("--alpha must be positive")
    return value


def cmd_bound(args) -> int:
    g = load_graph(args.graph)
    code = EXIT_OK
    if args.alpha == "auto":
        r = max_independent_set(g, _budget(args))
        alpha, exact = r.size, r.exact
        if not exact:
            code = EXIT_BUDGET  # a lower bound on alpha proves nothing about chi
    else:
        alpha, exact = args.alpha, True
    if g.n and alpha < 1:
        raise UsageError("alpha must be positive")
    upper = dsatur(g).colors_used if args.color else None
    rep = BoundReport(g.n, max(alpha, 1), exact, chi_lower(g.n, max(alpha, 1)), upper)
    for line in rep.lines():
        print(line)
    return code


def cmd_color(args) -> int:
    g = load_graph(args.graph)
    t0 = time.perf_counter()
    if args.encode_cnf:
        if args.k is None:
            raise UsageError("--encode-cnf needs --k")
        cnf = encode_kcoloring(g, args.k)
        _write(args.encode_cnf, cnf.dimacs())
        _kv("cnf", args.encode_cnf)
        _kv("vars", cnf.n_vars)
        _kv("clauses", len(cnf.clauses))
        return EXIT_OK
    if args.k is None:
        c = dsatur(g)
    else:
        c = improve_coloring(g, args.k, _budget(args), rng_seed=args.seed)
    outputs = {"k": args.k, "found": c is not None}
    if c is None:
        _kv("status", "not-found")
        _kv("k", args.k)
        code = EXIT_BUDGET
    else:
        assert is_valid_coloring(g, c.assignment)
        _kv("status", "valid")
        _kv("colors", c.colors_used)
        _kv("assignment", ",".join(map(str, c.assignment)))
        outputs["colors"] = c.colors_used
        code = EXIT_OK
    _emit(args, RunRecord("color", _digest(export_dimacs(g), str(args.k), str(args.seed)),
                          outputs, {"total": round(time.perf_counter() - t0, 3)}))
    return code


def cmd_augment(args) -> int:
    base = load_graph(args.base)
    if base.points is None:
        raise UsageError("augment needs a graph with coordinates (catalog name or points file)")
    base_alpha = args.base_alpha
    if base_alpha is None:
        rec = catalog.load_recipe(args.base) if args.base in catalog.NAMES else None
        if rec is not None and rec.expected.alpha is not None:
            base_alpha = rec.expected.alpha
        else:
            r = max_independent_set(base, _budget(args))
            if not r.exact:
                _kv("status", "budget")
                return EXIT_BUDGET
            base_alpha = r.size
    policy = AugmentPolicy(
        args.cap, args.policy, args.seed, args.recheck,
        SearchBudget(max_nodes=args.nodes, max_time=args.budget),
    )
    t0 = time.perf_counter()
    if args.replay:
        pairs = replay(base, Path(args.replay).read_text(encoding="utf-8"), policy, base_alpha)
        same = sum(1 for rec, d in pairs if rec.decision == d)
        for rec, d in pairs:
            _kv("replay", f"step={rec.step}\tlogged={rec.decision}\treplayed={d}")
        _kv("identical", f"{same}/{len(pairs)}")
        return EXIT_OK if same == len(pairs) else EXIT_MISMATCH
    excl = candidate_pool(args.exclude_expr) if args.exclude_expr else []
    pool = candidate_pool(args.pool_expr or [], exclude=excl, base=base)
    result = augment(base, pool, policy, base_alpha)
    if args.audit:
        Path(args.audit).write_text(result.audit_text(), encoding="utf-8")
    if args.output:
        Path(args.output).write_text(write_points(result.graph.points or ()), encoding="utf-8")
    ratio, bound = score(result.graph, result.alpha_upper)
    _kv("base", base.n)
    _kv("candidates", len(pool))
    _kv("accepted", len(result.accepted))
    _kv("v", result.graph.n)
    _kv("alpha<=", result.alpha_upper)
    _kv("v/alpha", f"{float(ratio):.3f}")
    _kv("chi>=", bound)
    _kv("exhaustive", int(result.exhaustive))
    _emit(args, RunRecord(
        "augment", _digest(export_dimacs(base), repr(pool), repr(policy)),
        {"accepted": len(result.accepted), "v": result.graph.n, "exhaustive": result.exhaustive},
        {"total": round(time.perf_counter() - t0, 3)},
    ))
    return EXIT_OK if result.exhaustive else EXIT_BUDGET


def cmd_oracle(args) -> int:
    g = load_graph(args.graph)
    try:
        r = brute_force_mis(g)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _kv("alpha", r.size)
    _kv("witness", ",".join(map(str, r.witness)))
    _emit(args, RunRecord("oracle", _digest(export_dimacs(g)), r.record(g.name),
                          {"total": round(r.elapsed, 3)}))
    return EXIT_OK


# --------------------------------------------------------------------------


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", type=float, default=None, metavar="SECONDS",
                   help="wall-clock limit for the search")
    p.add_argument("--nodes", type=int, default=None, help="node (or move) limit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chi8", description=__doc__.split("\n")[0])
    parser.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    parser.add_argument("--record", default=None, help="append run records to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="expand a shorthand expression")
    p.add_argument("expr")
    p.add_argument("--dim", type=int, default=8)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--list", action="store_true", help="print the points")
    mode.add_argument("--count", action="store_true", help="print the count (default)")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("catalog", help="build, verify or export a named graph")
    p.add_argument("action", choices=("verify", "build", "export"))
    p.add_argument("name")
    p.add_argument("--format", choices=("dimacs", "points"), default="dimacs")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("alpha", help="independence number (exact or heuristic)")
    p.add_argument("graph")
    how = p.add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true", help="branch and bound (default)")
    how.add_argument("--heuristic", action="store_true", help="iterated local search")
    _add_budget(p)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--iterations", type=int, default=200_000)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--target", type=int, default=None)
    p.add_argument("--ordering", choices=(DEGREE, DEGENERACY), default=DEGREE)
    p.add_argument("--expect", type=int, default=None, help="exit 1 if the exact value differs")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("bound", help="pigeonhole lower bound on the chromatic number")
    p.add_argument("graph")
    p.add_argument("--alpha", type=_parse_alpha_arg, default="auto")
    p.add_argument("--color", action="store_true", help="also report a DSATUR upper bound")
    _add_budget(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("color", help="colour a graph or write a k-colouring CNF")
    p.add_argument("graph")
    p.add_argument("--k", type=int, default=None)
    act = p.add_mutually_exclusive_group()
    act.add_argument("--encode-cnf", default=None, metavar="OUT")
    act.add_argument("--search", action="store_true", help="local search for a k-colouring")
    p.add_argument("--seed", type=int, default=0)
    _add_budget(p)
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("augment", help="greedily add candidate points under an alpha cap")
    p.add_argument("base")
    p.add_argument("--pool-expr", action="append", default=None)
    p.add_argument("--exclude-expr", action="append", default=None)
    p.add_argument("--cap", type=int, required=True)
    p.add_argument("--policy", choices=(LEXICOGRAPHIC, BY_DEGREE, RANDOM), default=LEXICOGRAPHIC)
    p.add_argument("--recheck", choices=(EXACT, HEURISTIC_THEN_EXACT), default=EXACT)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--base-alpha", type=int, default=None)
    p.add_argument("--audit", default=None, help="write the audit log here")
    p.add_argument("--replay", default=None, help="re-decide a saved audit log")
    p.add_argument("-o", "--output", default=None, help="write the grown point list here")
    _add_budget(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("oracle", help="brute-force independence number (at most 30 vertices)")
    p.add_argument("graph")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return EXIT_USAGE
        # every kernel is single-threaded, so any positive cap is already met
    try:
        return args.func(args)
    except (UsageError, NotationError, GraphFormatError, catalog.CatalogError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
