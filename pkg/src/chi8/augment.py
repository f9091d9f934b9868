"""Greedy vertex augmentation under an independence-number cap.

Candidates are offered one at a time; a candidate is kept when the grown
graph still has ``alpha <= cap``.  Since ``alpha(g + p) <= alpha(g) + 1``,
no search is needed while the known upper bound on ``alpha(g)`` is below
the cap.  Otherwise any independent set larger than the cap must contain
``p``, so the question reduces to whether the non-neighbours of ``p`` hold an
independent set of size ``cap``; see :class:`_Grower` for how that question
is split into searches on subgraphs of the base.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .coloring import chi_lower
from .geometry import DistGraph, build_graph
from .mis_exact import (
    DEGENERACY, NO, UNKNOWN, YES, SearchBudget, alpha_at_most, max_independent_set,
)
from .mis_heuristic import HeuristicConfig, heuristic_mis
from .notation import Point, VertexSetExpr, expand, parse

BY_DEGREE = "by_degree_to_current"
LEXICOGRAPHIC = "lexicographic"
RANDOM = "random"
EXACT = "exact"
HEURISTIC_THEN_EXACT = "heuristic_then_exact"

ACCEPT = "accept"
REJECT = "reject"
STOP = "stop"


class AugmentError(ValueError):
    pass


@dataclass(frozen=True)
class AugmentPolicy:
    alpha_cap: int
    candidate_order: str = LEXICOGRAPHIC
    seed: int = 0
    recheck: str = EXACT
    budget_per_step: SearchBudget = SearchBudget()
    heuristic_iterations: int = 2000

    def __post_init__(self) -> None:
        if self.alpha_cap < 1:
            raise AugmentError("alpha_cap must be >= 1")
        if self.candidate_order not in (BY_DEGREE, LEXICOGRAPHIC, RANDOM):
            raise AugmentError(f"unknown candidate order {self.candidate_order!r}")
        if self.recheck not in (EXACT, HEURISTIC_THEN_EXACT):
            raise AugmentError(f"unknown recheck mode {self.recheck!r}")


@dataclass(frozen=True)
class AuditRecord:
    step: int
    point: Point
    decision: str
    reason: str
    witness_size: int = 0
    nodes: int = 0
    elapsed: float = 0.0

    def line(self) -> str:
        return (
            f"step={self.step}\tpoint={','.join(map(str, self.point))}\t"
            f"decision={self.decision}\treason={self.reason}\t"
            f"witness={self.witness_size}\tnodes={self.nodes}\telapsed={self.elapsed:.3f}"
        )

    @classmethod
    def parse(cls, line: str) -> "AuditRecord":
        kv = dict(item.split("=", 1) for item in line.strip().split("\t"))
        return cls(
            step=int(kv["step"]),
            point=tuple(int(c) for c in kv["point"].split(",")),
            decision=kv["decision"],
            reason=kv["reason"],
            witness_size=int(kv["witness"]),
            nodes=int(kv["nodes"]),
            elapsed=float(kv["elapsed"]),
        )


@dataclass
class AugmentResult:
    graph: DistGraph
    log: list[AuditRecord]
    exhaustive: bool
    alpha_upper: int
    policy: AugmentPolicy
    witnesses: dict[int, tuple[Point, ...]] = field(default_factory=dict)

    @property
    def accepted(self) -> list[Point]:
        return [r.point for r in self.log if r.decision == ACCEPT]

    def audit_text(self) -> str:
        p = self.policy
        head = (
            f"# augment cap={p.alpha_cap} order={p.candidate_order} seed={p.seed} "
            f"recheck={p.recheck} exhaustive={int(self.exhaustive)}"
        )
        return "\n".join([head] + [r.line() for r in self.log]) + "\n"


def parse_audit(text: str) -> list[AuditRecord]:
    return [AuditRecord.parse(l) for l in text.splitlines() if l.strip() and not l.startswith("#")]


def candidate_pool(
    exprs: Iterable[VertexSetExpr | str],
    exclude: Iterable[Point] = (),
    base: Optional[DistGraph] = None,
) -> list[Point]:
    """Union of expansions minus ``exclude`` and the base's points, sorted."""
    pts: set[Point] = set()
    for e in exprs:
        pts |= expand(parse(e) if isinstance(e, str) else e)
    pts -= set(exclude)
    if base is not None and base.points is not None:
        pts -= set(base.points)
    return sorted(pts)


def score(g: DistGraph | int, alpha: int) -> tuple[Fraction, int]:
    """Exact ratio ``v / alpha`` and the bound ``ceil(v / alpha)``."""
    v = g if isinstance(g, int) else g.n
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    return Fraction(v, alpha), chi_lower(v, alpha)


def _degree_to(points: Sequence[Point], cand: Sequence[Point], forbidden_sq: int) -> np.ndarray:
    if not points or not cand:
        return np.zeros(len(cand), dtype=np.int64)
    a = np.array(cand, dtype=np.int64)
    b = np.array(points, dtype=np.int64)
    diff = a[:, None, :] - b[None, :, :]
    return (np.einsum("ijk,ijk->ij", diff, diff) == forbidden_sq).sum(axis=1)


def _signed_perm_invariant(points: Sequence[Point]) -> bool:
    """True if the point set is closed under all coordinate permutations and sign changes."""
    if not points:
        return True
    pts = set(points)
    d = len(points[0])
    gens = [
        lambda p: (-p[0],) + p[1:],
        lambda p: p[1:] + p[:1],
    ]
    if d > 1:
        gens.append(lambda p: (p[1], p[0]) + p[2:])
    return all(gen(p) in pts for gen in gens for p in pts)


_CANON_MAX_ROWS = 8


def _canonical(rows: Sequence[Point]) -> tuple:
    """Normal form of a small point set under signed coordinate permutations.

    For each row order, every column is negated so its first nonzero entry is
    positive and the columns are sorted; the smallest result over all row
    orders is the orbit representative.  All row orders are handled at once.
    """
    m = np.array(rows, dtype=np.int64)
    k = m.shape[0]
    perms = np.array(list(itertools.permutations(range(k))), dtype=np.int64)
    a = m[perms]                                   # (orders, k, d)
    first = np.argmax(a != 0, axis=1)              # first nonzero row per column
    lead = np.take_along_axis(a, first[:, None, :], axis=1)[:, 0, :]
    a = a * np.where(lead < 0, -1, 1)[:, None, :]
    # one integer per column, ordered like the column tuples
    shift = int(np.abs(m).max()) + 1
    base = 2 * shift + 1
    weights = base ** np.arange(k - 1, -1, -1, dtype=np.int64)
    codes = np.sort(np.einsum("pkd,k->pd", a + shift, weights), axis=1)
    i = np.lexsort(codes.T[::-1])[0]
    return (k, shift) + tuple(int(c) for c in codes[i])


class _Grower:
    """Decision state shared by :func:`augment` and :func:`replay`.

    To decide whether ``p`` keeps ``alpha <= cap``, look for an independent set
    ``S`` of size ``cap`` among the non-neighbours of ``p``.  Either ``S``
    avoids the added points, which is settled by ``alpha`` of the base points
    non-adjacent to ``p``, or it has a first added point ``q`` (in a fixed
    order) and the same question recurses on the common non-neighbours of
    ``p`` and ``q``.  Every exact search therefore runs on a subgraph of the
    base of the form "base points non-adjacent to all of T".  When the base
    point set is invariant under signed coordinate permutations these values
    are cached per orbit of T, so each distinct configuration is solved once.
    """

    def __init__(self, base: DistGraph, policy: AugmentPolicy, base_alpha: int) -> None:
        if base.points is None:
            raise AugmentError("augmentation needs a graph with point data")
        if base_alpha > policy.alpha_cap:
            raise AugmentError("base graph already exceeds the cap")
        self.policy = policy
        self.base = base
        self.base_alpha = base_alpha
        self.fsq = base.forbidden_sq or 16
        self.points = list(base.points)
        self.base_set = set(self.points)
        self.base_coords = np.array(self.points, dtype=np.int64).reshape(len(self.points), -1)
        self.symmetric = _signed_perm_invariant(self.points)
        self.cache: dict = {}
        self.ub = base_alpha
        self.graph = base

    def _budget(self, t0: float, nodes: int) -> Optional[SearchBudget]:
        b = self.policy.budget_per_step
        max_nodes = None if b.max_nodes is None else b.max_nodes - nodes
        max_time = None if b.max_time is None else b.max_time - (time.perf_counter() - t0)
        if (max_nodes is not None and max_nodes <= 0) or (max_time is not None and max_time <= 0):
            return None
        return SearchBudget(max_nodes, max_time)

    def _base_part(self, T: Sequence[Point]) -> np.ndarray:
        """Indices of base points non-adjacent to every point of T."""
        t = np.array(T, dtype=np.int64)
        diff = self.base_coords[:, None, :] - t[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        return np.flatnonzero((d2 != self.fsq).all(axis=1))

    def _base_alpha(self, T: Sequence[Point], t0: float, nodes: list[int]) -> Optional[int]:
        exact_key = tuple(sorted(T))
        if exact_key in self.cache:
            return self.cache[exact_key]
        key = exact_key
        if self.symmetric and len(T) <= _CANON_MAX_ROWS:
            key = _canonical(T)
            if key in self.cache:
                self.cache[exact_key] = self.cache[key]
                return self.cache[key]
        budget = self._budget(t0, nodes[0])
        if budget is None:
            return None
        r = max_independent_set(self.base.induced(self._base_part(T)), budget, ordering=DEGENERACY)
        nodes[0] += r.nodes_explored
        if not r.exact:
            return None
        self.cache[key] = self.cache[exact_key] = r.size
        return r.size

    def _find(self, g: DistGraph, T: list[Point], hits: list[int], size: int,
              t0: float, nodes: list[int]) -> tuple[str, tuple[int, ...]]:
        """Is there an independent ``size``-set in the base part of T plus ``hits``?

        ``hits`` are added vertices of ``g`` non-adjacent to all of T.  On NO the
        witness lists vertices of ``g``.
        """
        if size <= 0:
            return NO, ()
        b = self._base_alpha(T, t0, nodes)
        if b is None:
            return UNKNOWN, ()
        if b >= size:
            idx = g.index_of()
            part = [idx[self.points_base[i]] for i in self._base_part(T)]
            verdict, r = alpha_at_most(g, size - 1, SearchBudget(), vertices=part,
                                       ordering=DEGENERACY)
            nodes[0] += r.nodes_explored
            assert verdict == NO
            return NO, r.witness
        if b + len(hits) < size:
            return YES, ()
        sub = g.matrix[np.ix_(hits, hits)]
        for j, q in enumerate(hits):
            rest = [h for k, h in enumerate(hits[j + 1:], j + 1) if not sub[j, k]]
            verdict, w = self._find(g, T + [g.points[q]], rest, size - 1, t0, nodes)
            if verdict == NO:
                return NO, w + (q,)
            if verdict == UNKNOWN:
                return UNKNOWN, ()
        return YES, ()

    @property
    def points_base(self) -> list[Point]:
        return self.base.points  # type: ignore[return-value]

    def _check(self, g: DistGraph, p_idx: int) -> tuple[str, tuple[int, ...], int]:
        """Is there an independent set of size ``cap`` among non-neighbours of p?"""
        cap = self.policy.alpha_cap
        non = np.flatnonzero(~g.matrix[p_idx])
        non = non[non != p_idx]
        if len(non) < cap:
            return YES, (), 0
        if self.policy.recheck == HEURISTIC_THEN_EXACT:
            sub = g.induced(non)
            h = heuristic_mis(
                sub,
                HeuristicConfig(rng_seed=self.policy.seed, iterations=self.policy.heuristic_iterations,
                                restarts=1, target=cap),
            )
            if h.size >= cap:
                w = tuple(int(non[i]) for i in h.witness[:cap])
                return NO, w + (p_idx,), h.nodes_explored
        hits = [int(v) for v in non if g.points[v] not in self.base_set]
        nodes = [0]
        verdict, w = self._find(g, [g.points[p_idx]], hits, cap, time.perf_counter(), nodes)
        if verdict == NO:
            w = tuple(sorted(w))
            assert len(w) == cap and p_idx not in w and not g.matrix[np.ix_(w, w)].any()
            assert not g.matrix[p_idx, list(w)].any()
            w = w + (p_idx,)
        return verdict, w, nodes[0]

    def decide(self, step: int, p: Point) -> tuple[AuditRecord, tuple[Point, ...]]:
        t0 = time.perf_counter()
        if self.ub + 1 <= self.policy.alpha_cap:
            self.points.append(p)
            self.graph = build_graph(self.points, self.fsq)
            self.ub += 1
            return AuditRecord(step, p, ACCEPT, "bound", 0, 0, time.perf_counter() - t0), ()
        trial = build_graph(self.points + [p], self.fsq)
        p_idx = trial.index_of()[p]
        verdict, w, nodes = self._check(trial, p_idx)
        elapsed = time.perf_counter() - t0
        if verdict == YES:
            self.points.append(p)
            self.graph = trial
            return AuditRecord(step, p, ACCEPT, "proved", 0, nodes, elapsed), ()
        if verdict == NO:
            pts = tuple(trial.points[i] for i in w)  # type: ignore[index]
            return AuditRecord(step, p, REJECT, "witness", len(w), nodes, elapsed), pts
        return AuditRecord(step, p, STOP, "budget", 0, nodes, elapsed), ()


def augment(
    base: DistGraph,
    pool: Sequence[Point],
    policy: AugmentPolicy,
    base_alpha: int,
) -> AugmentResult:
    """Grow ``base`` greedily from ``pool`` keeping ``alpha <= policy.alpha_cap``.

    ``base_alpha`` is a trusted (or previously verified) upper bound on the
    base graph's independence number.
    """
    grower = _Grower(base, policy, base_alpha)
    present = set(grower.points)
    remaining = [p for p in dict.fromkeys(pool) if p not in present]
    if policy.candidate_order == LEXICOGRAPHIC:
        remaining.sort()
    elif policy.candidate_order == RANDOM:
        remaining.sort()
        random.Random(policy.seed).shuffle(remaining)

    log: list[AuditRecord] = []
    witnesses: dict[int, tuple[Point, ...]] = {}
    exhaustive = True
    step = 0
    while remaining:
        if policy.candidate_order == BY_DEGREE:
            deg = _degree_to(grower.points, remaining, grower.fsq)
            # most neighbours first, ties lexicographic
            i = min(range(len(remaining)), key=lambda j: (-int(deg[j]), remaining[j]))
            p = remaining.pop(i)
        else:
            p = remaining.pop(0)
        step += 1
        rec, wit = grower.decide(step, p)
        log.append(rec)
        if wit:
            witnesses[step] = wit
        if rec.decision == STOP:
            exhaustive = False
            break
    g = grower.graph
    if g.n != len(grower.points):
        g = build_graph(grower.points, grower.fsq)
    return AugmentResult(g, log, exhaustive, grower.ub, policy, witnesses)


def replay(base: DistGraph, audit: str | Sequence[AuditRecord], policy: AugmentPolicy,
           base_alpha: int) -> list[tuple[AuditRecord, str]]:
    """Re-decide every logged candidate in logged order with the exact solver.

    Returns ``(record, new_decision)`` pairs; a faithful log reproduces every
    decision.
    """
    records = parse_audit(audit) if isinstance(audit, str) else list(audit)
    exact = AugmentPolicy(policy.alpha_cap, LEXICOGRAPHIC, policy.seed, EXACT,
                          policy.budget_per_step)
    grower = _Grower(base, exact, base_alpha)
    out: list[tuple[AuditRecord, str]] = []
    for rec in records:
        if rec.point in grower.points:
            raise AugmentError(f"audit step {rec.step} repeats point {rec.point}")
        new, _ = grower.decide(rec.step, rec.point)
        out.append((rec, new.decision))
        if new.decision == STOP:
            break
    return out
