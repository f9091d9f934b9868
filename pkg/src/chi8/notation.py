"""Coordinate shorthand for finite point sets.

A shorthand expression is a whitespace-separated list of terms, e.g.
``"+2_1 ±2^2 0^5"`` or ``"+3_1 o1^7"``.  Each term gives a magnitude, an
optional sign/parity prefix, a repeat count (``^k``) and optionally the
coordinate positions it occupies (``_368`` means positions 3, 6 and 8).
Unsubscripted terms are distributed over the remaining free positions in
every possible way.

Sign prefixes:

* ``+`` / ``-``: one sign for every coordinate of the term
* ``±`` (or ``+-``): each coordinate signed independently
* ``e`` / ``o``: all sign patterns of the term with an even / odd number of
  minus signs

Wrapping an expression as ``±( ... )`` adds the global negation of every
expanded point.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from math import factorial
from typing import Iterator, Optional

Point = tuple[int, ...]

PLUS = "plus"
MINUS = "minus"
PLUS_MINUS = "plus_minus"
EVEN = "parity_even"
ODD = "parity_odd"
NONE = "none"

SIGN_MODES = (PLUS, MINUS, PLUS_MINUS, EVEN, ODD, NONE)

_PREFIX_TO_MODE = {
    "+": PLUS,
    "-": MINUS,
    "−": MINUS,
    "±": PLUS_MINUS,
    "+-": PLUS_MINUS,
    "e": EVEN,
    "o": ODD,
    "": NONE,
}
_MODE_TO_PREFIX = {PLUS: "+", MINUS: "-", PLUS_MINUS: "±", EVEN: "e", ODD: "o", NONE: ""}

_TERM_RE = re.compile(
    r"^(?P<prefix>\+-|±|\+|-|−|e|o)?"
    r"(?P<value>\d+)"
    r"(?:\^(?P<repeat>\d+))?"
    r"(?:_(?P<positions>\d+))?$"
)
_WRAP_RE = re.compile(r"^(?:±|\+-)\s*\((?P<body>.*)\)$")


class NotationError(ValueError):
    """Raised for malformed or inconsistent shorthand."""


@dataclass(frozen=True)
class Term:
    value: int
    repeat: int
    sign_mode: str = NONE
    positions: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.value < 0:
            raise NotationError(f"negative magnitude {self.value}")
        if self.repeat < 1:
            raise NotationError(f"repeat must be >= 1, got {self.repeat}")
        if self.sign_mode not in SIGN_MODES:
            raise NotationError(f"unknown sign mode {self.sign_mode!r}")
        if self.value == 0 and self.sign_mode not in (NONE, PLUS, MINUS, PLUS_MINUS):
            raise NotationError("parity prefix on value 0")
        if self.value == 0 and self.sign_mode != NONE:
            # a sign on zero is meaningless; normalize
            object.__setattr__(self, "sign_mode", NONE)
        if self.value != 0 and self.sign_mode == NONE:
            object.__setattr__(self, "sign_mode", PLUS)
        if self.positions is not None:
            if len(self.positions) != self.repeat:
                raise NotationError(
                    f"term {self.value} lists {len(self.positions)} positions "
                    f"but repeat is {self.repeat}"
                )
            if len(set(self.positions)) != len(self.positions):
                raise NotationError(f"duplicate fixed position in {self.positions}")

    def sign_patterns(self) -> list[tuple[int, ...]]:
        """All admissible sign vectors for this term's coordinates."""
        k = self.repeat
        if self.sign_mode == NONE or self.sign_mode == PLUS:
            return [(1,) * k]
        if self.sign_mode == MINUS:
            return [(-1,) * k]
        pats = list(itertools.product((1, -1), repeat=k))
        if self.sign_mode == PLUS_MINUS:
            return pats
        want = 0 if self.sign_mode == EVEN else 1
        return [p for p in pats if p.count(-1) % 2 == want]

    def n_signs(self) -> int:
        if self.sign_mode in (NONE, PLUS, MINUS):
            return 1
        if self.sign_mode == PLUS_MINUS:
            return 2**self.repeat
        return 2 ** (self.repeat - 1)


@dataclass(frozen=True)
class VertexSetExpr:
    terms: tuple[Term, ...]
    dimension: int = 8
    negate_union: bool = False

    def __post_init__(self) -> None:
        total = sum(t.repeat for t in self.terms)
        if total != self.dimension:
            raise NotationError(
                f"repeats sum to {total}, expected dimension {self.dimension}"
            )
        fixed: set[int] = set()
        for t in self.terms:
            for p in t.positions or ():
                if not 1 <= p <= self.dimension:
                    raise NotationError(f"position {p} outside 1..{self.dimension}")
                if p in fixed:
                    raise NotationError(f"duplicate fixed position {p}")
                fixed.add(p)

    def __iter__(self) -> Iterator[Point]:
        return iter(sorted(expand(self)))

    def __len__(self) -> int:
        return count(self)


def _parse_term(tok: str) -> tuple[str, int, Optional[int], Optional[tuple[int, ...]]]:
    m = _TERM_RE.match(tok)
    if m is None:
        raise NotationError(f"malformed token {tok!r}")
    mode = _PREFIX_TO_MODE[m.group("prefix") or ""]
    value = int(m.group("value"))
    repeat = int(m.group("repeat")) if m.group("repeat") else None
    positions = None
    if m.group("positions"):
        positions = tuple(int(c) for c in m.group("positions"))
        if repeat is None:
            repeat = len(positions)
    if value != 0 and mode == NONE:
        mode = PLUS
    if value == 0 and mode in (EVEN, ODD):
        raise NotationError(f"parity prefix on value 0 in {tok!r}")
    return mode, value, repeat, positions


def parse(text: str, dimension: int = 8) -> VertexSetExpr:
    """Parse shorthand such as ``"±2^2 0^6"`` into a :class:`VertexSetExpr`."""
    text = text.strip()
    negate_union = False
    m = _WRAP_RE.match(text)
    if m:
        negate_union = True
        text = m.group("body").strip()
    tokens = text.split()
    if not tokens:
        raise NotationError("empty expression")
    raw = [_parse_term(tok) for tok in tokens]
    missing = [i for i, r in enumerate(raw) if r[2] is None]
    if missing:
        if len(missing) > 1:
            raise NotationError("cannot infer more than one omitted superscript")
        known = sum(r[2] for r in raw if r[2] is not None)
        inferred = dimension - known
        if inferred < 1:
            raise NotationError("no coordinates left for the omitted superscript")
        i = missing[0]
        mode, value, _, pos = raw[i]
        raw[i] = (mode, value, inferred, pos)
    terms = tuple(Term(value, repeat, mode, pos) for mode, value, repeat, pos in raw)
    return VertexSetExpr(terms, dimension, negate_union)


def format(expr: VertexSetExpr) -> str:  # noqa: A001 - mirrors parse
    """Render an expression back to shorthand; inverse of :func:`parse`."""
    parts = []
    for t in expr.terms:
        s = f"{_MODE_TO_PREFIX[t.sign_mode] if t.value else ''}{t.value}"
        if t.positions is not None:
            s += "_" + "".join(str(p) for p in t.positions)
        else:
            s += f"^{t.repeat}"
        parts.append(s)
    body = " ".join(parts)
    return f"±({body})" if expr.negate_union else body


def _slot_assignments(
    free: list[int], sizes: list[int]
) -> Iterator[list[tuple[int, ...]]]:
    """All ways to split ``free`` positions into ordered groups of ``sizes``."""
    if not sizes:
        yield []
        return
    first, rest = sizes[0], sizes[1:]
    for chosen in itertools.combinations(free, first):
        remaining = [p for p in free if p not in chosen]
        for tail in _slot_assignments(remaining, rest):
            yield [chosen] + tail


def expand(expr: VertexSetExpr) -> set[Point]:
    """Enumerate every point denoted by ``expr``."""
    dim = expr.dimension
    fixed_terms = [t for t in expr.terms if t.positions is not None]
    free_terms = [t for t in expr.terms if t.positions is None]
    taken = {p - 1 for t in fixed_terms for p in t.positions}  # type: ignore[union-attr]
    free = [i for i in range(dim) if i not in taken]

    placed: list[tuple[Term, tuple[int, ...]]] = [
        (t, tuple(p - 1 for p in t.positions)) for t in fixed_terms  # type: ignore[union-attr]
    ]
    patterns = {id(t): t.sign_patterns() for t in expr.terms}

    out: set[Point] = set()
    for groups in _slot_assignments(free, [t.repeat for t in free_terms]):
        layout = placed + list(zip(free_terms, groups))
        for signs in itertools.product(*(patterns[id(t)] for t, _ in layout)):
            x = [0] * dim
            for (t, slots), sg in zip(layout, signs):
                for s, idx in zip(sg, slots):
                    x[idx] = s * t.value
            out.add(tuple(x))
    if expr.negate_union:
        out |= {tuple(-c for c in p) for p in out}
    return out


def _merged_free_terms(expr: VertexSetExpr) -> list[Term]:
    merged: dict[tuple[int, str], int] = {}
    parity: list[Term] = []
    for t in expr.terms:
        if t.positions is not None:
            continue
        if t.sign_mode in (EVEN, ODD):
            parity.append(t)
        else:
            key = (t.value, t.sign_mode)
            merged[key] = merged.get(key, 0) + t.repeat
    return [Term(v, k, mode) for (v, mode), k in merged.items()] + parity


def _negation_closed(t: Term) -> bool:
    if t.sign_mode in (NONE, PLUS_MINUS):
        return True
    if t.sign_mode in (EVEN, ODD):
        return t.repeat % 2 == 0
    return False


def count(expr: VertexSetExpr) -> int:
    """Size of ``expand(expr)``, computed combinatorially.

    Identical free terms are merged first.  When the remaining free terms
    still share a magnitude (e.g. ``"+2^1 ±2^2 0^5"``) placements are no
    longer determined by the point, and the count falls back to enumeration.
    """
    free = _merged_free_terms(expr)
    mags = [t.value for t in free]
    if len(mags) != len(set(mags)):
        return len(expand(expr))

    placements = factorial(sum(t.repeat for t in free))
    for t in free:
        placements //= factorial(t.repeat)
    signs = 1
    for t in expr.terms:
        signs *= t.n_signs()
    total = placements * signs
    if expr.negate_union and not all(_negation_closed(t) for t in expr.terms):
        # a single non-closed term makes the set and its negation disjoint
        total *= 2
    return total
