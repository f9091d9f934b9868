"""Chromatic-number bounds: pigeonhole lower bound, colourings, CNF export.

CNF variable numbering is fixed: vertex ``v`` (0-indexed) takes colour ``c``
(0-indexed) iff variable ``v * k + c + 1`` is true.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numba as nb
import numpy as np

from .geometry import DistGraph


class ColoringError(ValueError):
    pass


@dataclass(frozen=True)
class Coloring:
    assignment: tuple[int, ...]  # colour of each vertex

    @property
    def colors_used(self) -> int:
        return len(set(self.assignment))


@dataclass(frozen=True)
class BoundReport:
    v: int
    alpha: int
    alpha_exact: bool
    chi_lower: int
    chi_upper: Optional[int] = None

    def __post_init__(self) -> None:
        if self.chi_lower != chi_lower(self.v, self.alpha):
            raise ValueError("chi_lower must equal ceil(v / alpha)")
        if self.alpha_exact and self.chi_upper is not None and self.chi_upper < self.chi_lower:
            raise ValueError("upper bound below the pigeonhole bound")

    def lines(self) -> list[str]:
        out = [
            f"v\t{self.v}",
            f"alpha\t{self.alpha}\t{'exact' if self.alpha_exact else 'lower-bound'}",
            f"v/alpha\t{self.v / self.alpha:.3f}",
            f"chi>=\t{self.chi_lower}",
        ]
        if self.chi_upper is not None:
            out.append(f"chi<=\t{self.chi_upper}")
        return out


def chi_lower(v: int, alpha: int) -> int:
    """Pigeonhole bound ``ceil(v / alpha)`` in integer arithmetic."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if v < 0:
        raise ValueError("v must be nonnegative")
    return -(-v // alpha)


def is_valid_coloring(g: DistGraph, assignment: Sequence[int]) -> bool:
    """Every vertex coloured and no edge monochromatic."""
    col = np.asarray(assignment, dtype=np.int64)
    if col.shape != (g.n,) or (col < 0).any():
        return False
    if g.n == 0:
        return True
    same = col[:, None] == col[None, :]
    return not (same & g.matrix).any()


def dsatur(g: DistGraph) -> Coloring:
    """DSATUR colouring; ties broken by degree, then lowest index."""
    n = g.n
    if n == 0:
        return Coloring(())
    mat = g.matrix
    deg = mat.sum(axis=1)
    color = np.full(n, -1, dtype=np.int64)
    seen = np.zeros((n, n + 1), dtype=bool)  # seen[v, c]: neighbour of v has colour c
    sat = np.zeros(n, dtype=np.int64)
    for _ in range(n):
        # lexsort: last key is primary
        keys = np.where(color < 0, 0, 1)
        order = np.lexsort((np.arange(n), -deg, -sat, keys))
        v = int(order[0])
        c = int(np.argmin(seen[v]))
        color[v] = c
        nbr = mat[v] & (color < 0)
        fresh = nbr & ~seen[:, c]
        sat[fresh] += 1
        seen[nbr, c] = True
    return Coloring(tuple(int(c) for c in color))


@nb.njit(cache=True)
def _tabucol(indptr, indices, color, k, max_iters, seed, tenure_base):
    """Tabu search on the number of monochromatic edges; returns (conflicts, iters)."""
    n = color.shape[0]
    np.random.seed(seed)
    gamma = np.zeros((n, k), dtype=np.int64)
    for v in range(n):
        for e in range(indptr[v], indptr[v + 1]):
            gamma[v, color[indices[e]]] += 1
    conflicts = 0
    for v in range(n):
        conflicts += gamma[v, color[v]]
    conflicts //= 2
    tabu = np.zeros((n, k), dtype=np.int64)
    best_conf = conflicts
    best_col = color.copy()
    it = 0
    while it < max_iters and conflicts > 0:
        it += 1
        best_delta = 1 << 30
        bv = -1
        bc = -1
        ties = 0
        for v in range(n):
            cv = color[v]
            if gamma[v, cv] == 0:
                continue
            for c in range(k):
                if c == cv:
                    continue
                delta = gamma[v, c] - gamma[v, cv]
                if tabu[v, c] > it and conflicts + delta >= best_conf:
                    continue
                if delta < best_delta:
                    best_delta = delta
                    bv = v
                    bc = c
                    ties = 1
                elif delta == best_delta:
                    ties += 1
                    if np.random.randint(ties) == 0:
                        bv = v
                        bc = c
        if bv < 0:
            continue
        old = color[bv]
        color[bv] = bc
        for e in range(indptr[bv], indptr[bv + 1]):
            u = indices[e]
            gamma[u, old] -= 1
            gamma[u, bc] += 1
        conflicts += best_delta
        n_conf = 0
        for v in range(n):
            if gamma[v, color[v]] > 0:
                n_conf += 1
        tabu[bv, old] = it + tenure_base + np.random.randint(10) + (6 * n_conf) // 10
        if conflicts < best_conf:
            best_conf = conflicts
            best_col[:] = color
    color[:] = best_col
    return best_conf, it


def improve_coloring(
    g: DistGraph,
    k: int,
    budget=None,
    rng_seed: int = 0,
    start: Optional[Coloring] = None,
) -> Optional[Coloring]:
    """Search for a proper ``k``-colouring by tabu min-conflicts local search.

    Starts from ``start`` (DSATUR by default) with surplus colours folded
    into ``0..k-1``.  ``budget`` is a :class:`~chi8.mis_exact.SearchBudget`;
    its ``max_nodes`` counts moves.  Returns ``None`` if nothing valid is
    found within budget.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if g.n == 0:
        return Coloring(())
    init = start or dsatur(g)
    if init.colors_used <= k and is_valid_coloring(g, init.assignment):
        return init
    rng = np.random.default_rng(rng_seed)
    color = np.array(init.assignment, dtype=np.int64)
    over = color >= k
    color[over] = rng.integers(0, k, size=int(over.sum()))
    mat = g.matrix
    indptr = np.concatenate(([0], np.cumsum(mat.sum(axis=1)))).astype(np.int64)
    indices = (np.flatnonzero(mat.ravel()) % g.n).astype(np.int64)

    max_nodes = getattr(budget, "max_nodes", None) or 2_000_000
    max_time = getattr(budget, "max_time", None)
    chunk = 50_000
    t0 = time.perf_counter()
    used = 0
    chunk_seed = int(rng.integers(1 << 31))
    while used < max_nodes:
        step = min(chunk, max_nodes - used)
        conf, its = _tabucol(indptr, indices, color, k, step, chunk_seed + used, 7)
        used += step
        if conf == 0:
            c = Coloring(tuple(int(x) for x in color))
            assert is_valid_coloring(g, c.assignment)
            return c
        if max_time is not None and time.perf_counter() - t0 >= max_time:
            break
    return None


# --------------------------------------------------------------------------
# CNF


@dataclass(frozen=True)
class CNF:
    n_vars: int
    clauses: tuple[tuple[int, ...], ...]
    comments: tuple[str, ...] = ()

    def dimacs(self) -> str:
        lines = [f"c {c}" for c in self.comments]
        lines.append(f"p cnf {self.n_vars} {len(self.clauses)}")
        lines.extend(" ".join(map(str, cl)) + " 0" for cl in self.clauses)
        return "\n".join(lines) + "\n"

    def violated(self, true_vars: set[int]) -> list[tuple[int, ...]]:
        return [
            cl for cl in self.clauses
            if not any((lit > 0) == (abs(lit) in true_vars) for lit in cl)
        ]


def var(v: int, c: int, k: int) -> int:
    return v * k + c + 1


def encode_kcoloring(g: DistGraph, k: int) -> CNF:
    """CNF that is satisfiable iff ``g`` is ``k``-colourable.

    Per vertex one at-least-one clause and pairwise at-most-one clauses; per
    edge and colour one clause forbidding both endpoints in that colour.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    clauses: list[tuple[int, ...]] = []
    for v in range(g.n):
        clauses.append(tuple(var(v, c, k) for c in range(k)))
    for v in range(g.n):
        for c1 in range(k):
            for c2 in range(c1 + 1, k):
                clauses.append((-var(v, c1, k), -var(v, c2, k)))
    for u, v in g.edges():
        for c in range(k):
            clauses.append((-var(u, c, k), -var(v, c, k)))
    name = g.name or "graph"
    return CNF(
        g.n * k,
        tuple(clauses),
        (f"{k}-colouring of {name}: {g.n} vertices", "x(v,c) = v*k + c + 1, v and c 0-indexed"),
    )


def model_of(coloring: Coloring, k: int) -> list[int]:
    """Signed literal list for a colouring (the CNF model it corresponds to)."""
    out = []
    for v, cv in enumerate(coloring.assignment):
        for c in range(k):
            out.append(var(v, c, k) if c == cv else -var(v, c, k))
    return out


def decode_assignment(g: DistGraph, k: int, assignment: Iterable[int]) -> Coloring:
    """Turn a satisfying assignment (signed literals) into a colouring.

    Unmentioned variables are false.  Raises :class:`ColoringError` when the
    assignment violates any clause of ``encode_kcoloring(g, k)``.
    """
    true_vars = {lit for lit in assignment if lit > 0}
    if any(v > g.n * k for v in true_vars):
        raise ColoringError("literal outside the variable range")
    bad = encode_kcoloring(g, k).violated(true_vars)
    if bad:
        raise ColoringError(f"assignment violates {len(bad)} clause(s), e.g. {bad[0]}")
    colors = [next(c for c in range(k) if var(v, c, k) in true_vars) for v in range(g.n)]
    return Coloring(tuple(colors))


def parse_model(text: str) -> list[int]:
    """Literals from SAT-solver output (``v``-lines or bare integers)."""
    lits: list[int] = []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0] in ("c", "s"):
            continue
        if parts[0] == "v":
            parts = parts[1:]
        lits.extend(int(x) for x in parts if x != "0")
    return lits
