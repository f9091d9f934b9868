"""Exact maximum independent set by branch and bound.

The independence number of ``g`` is the clique number of its complement.  The
search is a bitset max-clique branch and bound in the MCQ/BBMC family:
vertices are relabelled so that bit order equals the initial ordering
(non-increasing complement degree), every node greedily colours its
candidate set into independent classes of the complement, and the colour
count bounds the clique that can still be reached.  Vertices whose colour
cannot beat the incumbent are never branched on, and a re-numbering pass
tries to push each would-be branching vertex into a lower colour class.

The numba kernel keeps its whole search stack in arrays, so a solve can be
paused after a node quota and resumed; the Python driver polls the time
budget between quotas.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numba as nb
import numpy as np

from ._bitset import ONE, ZERO, clear_bit, ctz, popcount
from .geometry import DistGraph, pack_rows

YES = "yes"
NO = "no"
UNKNOWN = "unknown"

_QUOTA = 1 << 20
_BRUTE_FORCE_MAX = 30


class SeedError(ValueError):
    pass


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: Optional[int] = None
    max_time: Optional[float] = None  # seconds

    @classmethod
    def unlimited(cls) -> "SearchBudget":
        return cls()

    @property
    def is_unlimited(self) -> bool:
        return self.max_nodes is None and self.max_time is None


@dataclass
class MisResult:
    size: int
    witness: tuple[int, ...]
    exact: bool
    nodes_explored: int = 0
    elapsed: float = 0.0
    budget_hit: bool = False
    method: str = "exact"
    upper_bound: Optional[int] = None

    def record(self, name: str = "") -> dict:
        return {
            "name": name,
            "method": self.method,
            "size": self.size,
            "exact": self.exact,
            "budget_hit": self.budget_hit,
            "nodes": self.nodes_explored,
            "elapsed": round(self.elapsed, 3),
            "witness": list(self.witness),
        }


def is_independent(g: DistGraph, vertices: Iterable[int]) -> bool:
    idx = np.fromiter(vertices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= g.n):
        raise IndexError("vertex index out of range")
    if len(set(idx.tolist())) != idx.size:
        return False
    return not g.matrix[np.ix_(idx, idx)].any()


# --------------------------------------------------------------------------
# kernel


@nb.njit(cache=True)
def _color_sort(adj, P, kmin, U, col, classes, Q, Qk, recolor):
    """Greedy sequential colouring of ``P`` in the searched graph.

    Only vertices with colour >= ``kmin`` are written to ``U``/``col``, in
    non-decreasing colour order.  Returns how many were written.
    """
    W = P.shape[0]
    for w in range(W):
        Q[w] = P[w]
    k = 0
    # classes 1..kmin-1: built but not stored
    while k + 1 < kmin:
        nonempty = False
        for w in range(W):
            Qk[w] = Q[w]
            classes[k, w] = ZERO
            if Q[w] != ZERO:
                nonempty = True
        if not nonempty:
            return 0
        for w in range(W):
            while Qk[w] != ZERO:
                b = ctz(Qk[w])
                v = (w << 6) + b
                bit = ONE << np.uint64(b)
                classes[k, w] |= bit
                Q[w] &= ~bit
                Qk[w] &= ~bit
                for x in range(w, W):
                    Qk[x] &= ~adj[v, x]
        k += 1

    if recolor and k >= 2:
        for w in range(W):
            pending = Q[w]
            while pending != ZERO:
                b = ctz(pending)
                pending &= ~(ONE << np.uint64(b))
                v = (w << 6) + b
                moved = False
                for k1 in range(k):
                    hits = 0
                    wv = -1
                    for x in range(W):
                        inter = adj[v, x] & classes[k1, x]
                        if inter != ZERO:
                            hits += popcount(inter)
                            if hits > 1:
                                break
                            wv = (x << 6) + ctz(inter)
                    if hits != 1:
                        continue
                    for k2 in range(k):
                        if k2 == k1:
                            continue
                        free = True
                        for x in range(W):
                            if adj[wv, x] & classes[k2, x] != ZERO:
                                free = False
                                break
                        if free:
                            clear_bit(classes[k1], wv)
                            classes[k1, w] |= ONE << np.uint64(b)
                            classes[k2, wv >> 6] |= ONE << np.uint64(wv & 63)
                            Q[w] &= ~(ONE << np.uint64(b))
                            moved = True
                            break
                    if moved:
                        break

    cnt = 0
    while True:
        nonempty = False
        for w in range(W):
            Qk[w] = Q[w]
            if Q[w] != ZERO:
                nonempty = True
        if not nonempty:
            break
        for w in range(W):
            while Qk[w] != ZERO:
                b = ctz(Qk[w])
                v = (w << 6) + b
                bit = ONE << np.uint64(b)
                Q[w] &= ~bit
                Qk[w] &= ~bit
                for x in range(w, W):
                    Qk[x] &= ~adj[v, x]
                U[cnt] = v
                col[cnt] = k + 1
                cnt += 1
        k += 1
    return cnt


# scalar slots of the state vector
_D, _BEST, _NODES, _STATUS, _STOP_ABOVE, _INIT, _RECOLOR = range(7)
_RUNNING, _DONE, _PAUSED = 0, 1, 2


@nb.njit(cache=True)
def _search(adj, P, U, col, pos, cur, best_set, sc, classes, Q, Qk, node_limit):
    W = adj.shape[1]
    d = sc[_D]
    best = sc[_BEST]
    nodes = sc[_NODES]
    stop_above = sc[_STOP_ABOVE]
    recolor = sc[_RECOLOR] != 0
    if sc[_INIT] == 0:
        cnt = _color_sort(adj, P[0], best + 1, U[0], col[0], classes, Q, Qk, recolor)
        pos[0] = cnt - 1
        d = 0
        sc[_INIT] = 1
    while d >= 0:
        if nodes >= node_limit:
            sc[_D] = d
            sc[_BEST] = best
            sc[_NODES] = nodes
            sc[_STATUS] = _PAUSED
            return
        p = pos[d]
        if p < 0:
            d -= 1
            continue
        v = U[d, p]
        if d + col[d, p] <= best:
            pos[d] = -1
            continue
        pos[d] = p - 1
        cur[d] = v
        nodes += 1
        empty = True
        for w in range(W):
            x = P[d, w] & adj[v, w]
            P[d + 1, w] = x
            if x != ZERO:
                empty = False
        clear_bit(P[d], v)
        if empty:
            if d + 1 > best:
                best = d + 1
                for i in range(best):
                    best_set[i] = cur[i]
                if stop_above >= 0 and best > stop_above:
                    sc[_D] = d
                    sc[_BEST] = best
                    sc[_NODES] = nodes
                    sc[_STATUS] = _DONE
                    return
            continue
        cnt = _color_sort(adj, P[d + 1], best - d, U[d + 1], col[d + 1], classes, Q, Qk, recolor)
        pos[d + 1] = cnt - 1
        d += 1
    sc[_D] = -1
    sc[_BEST] = best
    sc[_NODES] = nodes
    sc[_STATUS] = _DONE


# --------------------------------------------------------------------------
# driver


DEGREE = "degree"
DEGENERACY = "degeneracy"


def initial_order(
    g: DistGraph, vertices: Optional[Sequence[int]] = None, ordering: str = DEGREE
) -> np.ndarray:
    """Initial branching order of ``vertices`` (all of ``g`` by default).

    ``"degree"``: non-increasing degree in the complement, ties by index.
    ``"degeneracy"``: min-width order; the vertex of least remaining
    complement degree is repeatedly peeled off and placed last.
    """
    vs = np.arange(g.n) if vertices is None else np.asarray(vertices, dtype=np.int64)
    sub = g.matrix[np.ix_(vs, vs)]
    comp_deg = (len(vs) - 1) - sub.sum(axis=1)
    if ordering == DEGREE:
        return vs[np.lexsort((vs, -comp_deg))]
    if ordering != DEGENERACY:
        raise ValueError(f"unknown ordering {ordering!r}")
    comp = ~sub
    np.fill_diagonal(comp, False)
    deg = comp_deg.astype(np.int64)
    alive = np.ones(len(vs), dtype=bool)
    peeled = np.empty(len(vs), dtype=np.int64)
    big = np.iinfo(np.int64).max
    for i in range(len(vs)):
        v = int(np.argmin(np.where(alive, deg, big)))
        peeled[i] = v
        alive[v] = False
        deg -= comp[v]
    return vs[peeled[::-1]]


@dataclass
class CliqueSearch:
    """Resumable max-clique search on the complement of ``g[vertices]``.

    ``lower`` is the incumbent size: only strictly larger sets are reported.
    With ``stop_above`` set the search ends at the first set larger than it.
    """

    g: DistGraph
    vertices: Optional[Sequence[int]] = None
    lower: int = 0
    seed: Sequence[int] = ()
    stop_above: int = -1
    recolor: bool = True
    ordering: str = DEGREE
    order: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.order = initial_order(self.g, self.vertices, self.ordering)
        m = len(self.order)
        sub = self.g.matrix[np.ix_(self.order, self.order)]
        comp = ~sub
        np.fill_diagonal(comp, False)
        self.adj = pack_rows(comp) if m else np.zeros((0, 1), dtype=np.uint64)
        W = self.adj.shape[1]
        depth = m + 2
        self.P = np.zeros((depth, W), dtype=np.uint64)
        if m:
            full = np.ones(m, dtype=bool)
            self.P[0] = pack_rows(full[None, :])[0]
        self.U = np.zeros((depth, max(m, 1)), dtype=np.int64)
        self.col = np.zeros((depth, max(m, 1)), dtype=np.int64)
        self.pos = np.full(depth, -1, dtype=np.int64)
        self.cur = np.zeros(depth, dtype=np.int64)
        self.best_set = np.zeros(max(m, 1), dtype=np.int64)
        self.classes = np.zeros((depth, W), dtype=np.uint64)
        self.Q = np.zeros(W, dtype=np.uint64)
        self.Qk = np.zeros(W, dtype=np.uint64)
        self.sc = np.zeros(8, dtype=np.int64)
        self.sc[_STOP_ABOVE] = self.stop_above
        self.sc[_RECOLOR] = int(self.recolor)
        self._witness: tuple[int, ...] = tuple(sorted(int(v) for v in self.seed))
        self.sc[_BEST] = max(self.lower, len(self._witness))
        self._seed_best = int(self.sc[_BEST])

    @property
    def best(self) -> int:
        return int(self.sc[_BEST])

    @property
    def nodes(self) -> int:
        return int(self.sc[_NODES])

    @property
    def done(self) -> bool:
        return self.sc[_STATUS] == _DONE

    @property
    def witness(self) -> tuple[int, ...]:
        if self.best > self._seed_best:
            k = self.best
            return tuple(sorted(int(self.order[i]) for i in self.best_set[:k]))
        return self._witness

    def run(self, budget: SearchBudget = SearchBudget()) -> bool:
        """Advance the search; returns True when it has finished."""
        if len(self.order) == 0:
            self.sc[_STATUS] = _DONE
            return True
        t0 = time.perf_counter()
        while not self.done:
            limit = self.nodes + _QUOTA
            if budget.max_nodes is not None:
                limit = min(limit, budget.max_nodes)
                if self.nodes >= budget.max_nodes:
                    return False
            _search(
                self.adj, self.P, self.U, self.col, self.pos, self.cur,
                self.best_set, self.sc, self.classes, self.Q, self.Qk, limit,
            )
            if budget.max_time is not None and time.perf_counter() - t0 >= budget.max_time:
                return self.done
        return True


def max_independent_set(
    g: DistGraph,
    budget: SearchBudget = SearchBudget(),
    seed_solution: Optional[Iterable[int]] = None,
    recolor: bool = True,
    ordering: str = DEGREE,
) -> MisResult:
    """Maximum independent set of ``g``; exact unless the budget runs out.

    ``seed_solution`` warm-starts the incumbent (it must be independent).
    """
    seed = tuple(sorted(set(seed_solution or ())))
    if seed and not is_independent(g, seed):
        raise SeedError("seed solution is not an independent set")
    t0 = time.perf_counter()
    s = CliqueSearch(g, seed=seed, recolor=recolor, ordering=ordering)
    finished = s.run(budget)
    witness = s.witness
    assert is_independent(g, witness)
    return MisResult(
        size=len(witness),
        witness=witness,
        exact=finished,
        nodes_explored=s.nodes,
        elapsed=time.perf_counter() - t0,
        budget_hit=not finished,
        upper_bound=len(witness) if finished else None,
    )


def alpha_at_most(
    g: DistGraph,
    k: int,
    budget: SearchBudget = SearchBudget(),
    vertices: Optional[Sequence[int]] = None,
    ordering: str = DEGREE,
) -> tuple[str, MisResult]:
    """Decide whether ``alpha(g) <= k``.

    Returns ``("yes", r)`` when proven, ``("no", r)`` with a ``k + 1``
    witness in ``r.witness``, or ``("unknown", r)`` on budget exhaustion.
    ``vertices`` restricts the question to an induced subgraph; witness
    indices always refer to ``g``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    t0 = time.perf_counter()
    s = CliqueSearch(g, vertices=vertices, lower=k, stop_above=k, ordering=ordering)
    finished = s.run(budget)
    elapsed = time.perf_counter() - t0
    if s.best > k:
        w = s.witness[: k + 1]
        assert is_independent(g, w)
        return NO, MisResult(len(w), w, False, s.nodes, elapsed, False)
    if finished:
        return YES, MisResult(0, (), False, s.nodes, elapsed, False, upper_bound=k)
    return UNKNOWN, MisResult(0, (), False, s.nodes, elapsed, True)


def brute_force_mis(g: DistGraph) -> MisResult:
    """Exhaustive maximum independent set for small graphs (test oracle).

    Enumerates independent sets by include/exclude on the lowest remaining
    vertex, using Python integers as bitmasks; the only pruning is the
    trivial ``|S| + |R| <= best`` cut.
    """
    n = g.n
    if n > _BRUTE_FORCE_MAX:
        raise ValueError(f"brute force limited to {_BRUTE_FORCE_MAX} vertices, got {n}")
    t0 = time.perf_counter()
    mat = g.matrix
    nbr = [sum(1 << j for j in range(n) if mat[i, j]) for i in range(n)]
    best: list[int] = []
    nodes = 0

    def rec(chosen: list[int], rest: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if rest == 0:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        if len(chosen) + bin(rest).count("1") <= len(best):
            return
        v = (rest & -rest).bit_length() - 1
        chosen.append(v)
        rec(chosen, rest & ~nbr[v] & ~(1 << v))
        chosen.pop()
        rec(chosen, rest & ~(1 << v))

    rec([], (1 << n) - 1)
    return MisResult(len(best), tuple(best), True, nodes, time.perf_counter() - t0,
                     method="brute_force", upper_bound=len(best))
