"""Iterated local search for large independent sets.

Each restart builds a random maximal independent set and improves it with
(1,2)-swaps: a solution vertex ``x`` is replaced by two non-adjacent
neighbours whose only solution neighbour is ``x``.  When no swap applies the
solution is perturbed (a fraction of it is deleted at random, one outside
vertex is forced in, and the set is refilled greedily) and the local search
runs again.  A perturbed solution replaces the current one when it is no
smaller; otherwise it is kept only with a small probability.  The best set
of any restart wins.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numba as nb
import numpy as np

from .geometry import DistGraph
from .mis_exact import MisResult


@dataclass(frozen=True)
class HeuristicConfig:
    rng_seed: int = 1
    iterations: int = 200_000
    restarts: int = 4
    delete_fraction: float = 0.1
    accept_worse: float = 0.01
    target: Optional[int] = None  # stop as soon as a set this large is found

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0.0 <= self.delete_fraction <= 1.0:
            raise ValueError("delete_fraction must be within [0, 1]")


def verify_witness(g: DistGraph, s) -> bool:
    """True iff ``s`` is a set of pairwise non-adjacent vertices of ``g``."""
    idx = np.asarray(list(s), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= g.n):
        raise IndexError("vertex index out of range")
    if len(set(idx.tolist())) != idx.size:
        return False
    return not g.matrix[np.ix_(idx, idx)].any()


# --------------------------------------------------------------------------
# kernel


@nb.njit(cache=True)
def _insert(v, indptr, indices, in_sol, tight, sol, where, size):
    in_sol[v] = True
    where[v] = size
    sol[size] = v
    for k in range(indptr[v], indptr[v + 1]):
        tight[indices[k]] += 1
    return size + 1


@nb.njit(cache=True)
def _remove(v, indptr, indices, in_sol, tight, sol, where, size):
    in_sol[v] = False
    i = where[v]
    last = sol[size - 1]
    sol[i] = last
    where[last] = i
    for k in range(indptr[v], indptr[v + 1]):
        tight[indices[k]] -= 1
    return size - 1


@nb.njit(cache=True)
def _fill(indptr, indices, in_sol, tight, sol, where, size, perm):
    for v in perm:
        if not in_sol[v] and tight[v] == 0:
            size = _insert(v, indptr, indices, in_sol, tight, sol, where, size)
    return size


@nb.njit(cache=True)
def _local_search(indptr, indices, adj, in_sol, tight, sol, where, size, perm, cand):
    """Apply (1,2)-swaps until none is left; returns the new size."""
    improved = True
    while improved:
        improved = False
        i = 0
        while i < size:
            x = sol[i]
            m = 0
            for k in range(indptr[x], indptr[x + 1]):
                u = indices[k]
                if tight[u] == 1:
                    cand[m] = u
                    m += 1
            done = False
            if m >= 2:
                start = np.random.randint(m)
                for a0 in range(m):
                    a = cand[(start + a0) % m]
                    for b0 in range(a0 + 1, m):
                        b = cand[(start + b0) % m]
                        if not adj[a, b]:
                            size = _remove(x, indptr, indices, in_sol, tight, sol, where, size)
                            size = _insert(a, indptr, indices, in_sol, tight, sol, where, size)
                            size = _insert(b, indptr, indices, in_sol, tight, sol, where, size)
                            size = _fill(indptr, indices, in_sol, tight, sol, where, size, perm)
                            done = True
                            break
                    if done:
                        break
            if done:
                improved = True
            else:
                i += 1
    return size


@nb.njit(cache=True)
def _ils(indptr, indices, adj, seed, iterations, delete_fraction, accept_worse, target, trace):
    n = adj.shape[0]
    np.random.seed(seed)
    in_sol = np.zeros(n, dtype=np.bool_)
    tight = np.zeros(n, dtype=np.int64)
    sol = np.zeros(n + 1, dtype=np.int64)
    where = np.zeros(n, dtype=np.int64)
    cand = np.zeros(n, dtype=np.int64)
    perm = np.random.permutation(n)

    size = _fill(indptr, indices, in_sol, tight, sol, where, 0, perm)
    size = _local_search(indptr, indices, adj, in_sol, tight, sol, where, size, perm, cand)

    best = sol[:size].copy()
    cur = sol[:size].copy()
    cur_size = size
    trace[0] = size
    for it in range(iterations):
        # perturb: delete a random fraction, force one outsider in
        ndel = int(np.ceil(delete_fraction * size))
        for _ in range(ndel):
            if size == 0:
                break
            v = sol[np.random.randint(size)]
            size = _remove(v, indptr, indices, in_sol, tight, sol, where, size)
        v = np.random.randint(n)
        while in_sol[v]:
            v = np.random.randint(n)
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if in_sol[u]:
                size = _remove(u, indptr, indices, in_sol, tight, sol, where, size)
        size = _insert(v, indptr, indices, in_sol, tight, sol, where, size)
        perm = np.random.permutation(n)
        size = _fill(indptr, indices, in_sol, tight, sol, where, size, perm)
        size = _local_search(indptr, indices, adj, in_sol, tight, sol, where, size, perm, cand)

        if size >= cur_size or np.random.random() < accept_worse:
            cur = sol[:size].copy()
            cur_size = size
            if size > best.shape[0]:
                best = sol[:size].copy()
        else:
            # revert to the current solution
            while size > 0:
                size = _remove(sol[size - 1], indptr, indices, in_sol, tight, sol, where, size)
            for v in cur:
                size = _insert(v, indptr, indices, in_sol, tight, sol, where, size)
        trace[it + 1] = best.shape[0]
        if target > 0 and best.shape[0] >= target:
            return best, it + 1
    return best, iterations


# --------------------------------------------------------------------------


def _csr(g: DistGraph) -> tuple[np.ndarray, np.ndarray]:
    mat = g.matrix
    indices = np.flatnonzero(mat.ravel()) % max(g.n, 1)
    indptr = np.concatenate(([0], np.cumsum(mat.sum(axis=1))))
    return indptr.astype(np.int64), indices.astype(np.int64)


def restart_seeds(rng_seed: int, restarts: int) -> list[int]:
    ss = np.random.SeedSequence(rng_seed)
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in ss.spawn(restarts)]


@dataclass
class HeuristicRun:
    seed: int
    witness: tuple[int, ...]
    iterations_run: int
    trace: np.ndarray  # best size after each iteration


def run_restart(g: DistGraph, cfg: HeuristicConfig, seed: int) -> HeuristicRun:
    indptr, indices = _csr(g)
    trace = np.zeros(cfg.iterations + 1, dtype=np.int64)
    best, its = _ils(
        indptr, indices, g.matrix, seed, cfg.iterations, cfg.delete_fraction,
        cfg.accept_worse, cfg.target or 0, trace,
    )
    return HeuristicRun(seed, tuple(sorted(int(v) for v in best)), its, trace[: its + 1])


def heuristic_mis(g: DistGraph, cfg: HeuristicConfig = HeuristicConfig()) -> MisResult:
    """Large independent set of ``g``; a lower bound on alpha, never exact."""
    t0 = time.perf_counter()
    if g.n == 0:
        return MisResult(0, (), False, 0, 0.0, False, method="heuristic")
    best: Optional[HeuristicRun] = None
    total = 0
    for seed in restart_seeds(cfg.rng_seed, cfg.restarts):
        run = run_restart(g, cfg, seed)
        total += run.iterations_run
        if best is None or len(run.witness) > len(best.witness):
            best = run
        if cfg.target and len(best.witness) >= cfg.target:
            break
    assert best is not None and verify_witness(g, best.witness)
    return MisResult(
        size=len(best.witness),
        witness=best.witness,
        exact=False,
        nodes_explored=total,
        elapsed=time.perf_counter() - t0,
        budget_hit=False,
        method="heuristic",
    )
