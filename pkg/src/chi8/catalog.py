"""Named record graphs, assembled from recipe files shipped in ``data/``.

Recipe file format (one file per graph, ``#`` starts a comment)::

    name: G818
    base: G784                  # optional: start from another recipe
    expr: +3_1 o1^7             # include the full expansion of a shorthand
    points:                     # explicit rows follow, 8 integers each
    points: +1_1 e1_368 0^4     # explicit rows that must equal the expansion
    points: ±                   # explicit rows plus their global negations
    exclude: ±2_234 0^5         # rows to remove (same header forms)
    expect: v=818 e=102019 deg_min=160 deg_max=441 alpha=34 chi_lower=25 chi_upper=27
    census: ±2^1 0^7=16; ...    # vertex-class counts
    sha256: <hex>               # digest of every explicit row section
    status: not-reconstructible # optional: documentation-only entry

The digest covers the section header lines and rows exactly as written
(single-space separated), so a transcription change fails at load.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Optional

from .geometry import DistGraph, build_graph, stats
from .notation import Point, VertexSetExpr, expand, parse

NAMES = ("G240", "G327", "G516", "G720", "G768", "G784", "G818", "G843")
STUBS = ("G347",)

PUBLISHED_EXACT = "published_exact"
UNSPECIFIED = "unspecified"

CLASS_LABELS = (
    "±2^1 0^7",
    "±2^3 0^5",
    "±4^1 ±2^1 0^6",
    "e1^8",
    "o1^8",
    "+3_1 o1^7",
    "+3_1 e1^7",
    "+5_1 e1^7",
    "e1^4 0^4",
    "o1^4 0^4",
)


class CatalogError(ValueError):
    pass


class RecipeError(CatalogError):
    pass


class NotReconstructible(CatalogError):
    pass


@dataclass(frozen=True)
class ExpectedStats:
    v: int
    e: int
    deg_min: int
    deg_max: int
    alpha: Optional[int] = None
    chi_lower: Optional[int] = None
    chi_upper: Optional[int] = None
    alpha_exactness: str = UNSPECIFIED

    def __post_init__(self) -> None:
        if self.alpha is not None and self.chi_lower is not None:
            if self.chi_lower != -(-self.v // self.alpha):
                raise RecipeError(
                    f"chi_lower {self.chi_lower} != ceil({self.v}/{self.alpha})"
                )


@dataclass
class Recipe:
    name: str
    base: Optional[str] = None
    include_exprs: list[VertexSetExpr] = field(default_factory=list)
    include_points: list[Point] = field(default_factory=list)
    exclude_points: list[Point] = field(default_factory=list)
    expected: ExpectedStats = field(default_factory=lambda: ExpectedStats(0, 0, 0, 0))
    census: dict[str, int] = field(default_factory=dict)
    reconstructible: bool = True


def _parse_row(line: str, dim: int) -> Point:
    try:
        row = tuple(int(x) for x in line.split())
    except ValueError as exc:
        raise RecipeError(f"bad point row {line!r}") from exc
    if len(row) != dim:
        raise RecipeError(f"point row {line!r} has {len(row)} coordinates, expected {dim}")
    return row


def _close_section(head: str, rows: list[Point], recipe: Recipe) -> None:
    kind, _, arg = head.partition(":")
    arg = arg.strip()
    pts = list(rows)
    if arg in ("±", "+-"):
        pts += [tuple(-c for c in p) for p in rows]
    elif arg:
        want = expand(parse(arg))
        if set(rows) != want or len(rows) != len(want):
            raise RecipeError(f"{recipe.name}: rows under {head!r} do not match its expansion")
    target = recipe.include_points if kind == "points" else recipe.exclude_points
    target.extend(pts)


def parse_recipe(text: str, dim: int = 8) -> Recipe:
    recipe = Recipe(name="")
    digest = hashlib.sha256()
    declared: Optional[str] = None
    has_rows = False
    head: Optional[str] = None
    rows: list[Point] = []
    expect: dict[str, int] = {}

    def flush() -> None:
        nonlocal head, rows
        if head is not None:
            _close_section(head, rows, recipe)
        head, rows = None, []

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition(":")
        if not sep:
            if head is None:
                raise RecipeError(f"point row outside a section: {line!r}")
            row = _parse_row(line, dim)
            rows.append(row)
            digest.update((" ".join(map(str, row)) + "\n").encode())
            continue
        flush()
        key, val = key.strip(), val.strip()
        if key in ("points", "exclude"):
            head = f"{key}: {val}" if val else f"{key}:"
            digest.update((head + "\n").encode())
            has_rows = True
        elif key == "name":
            recipe.name = val
        elif key == "base":
            recipe.base = val
        elif key == "expr":
            recipe.include_exprs.append(parse(val, dim))
        elif key == "expect":
            for item in val.split():
                k, _, v = item.partition("=")
                expect[k] = int(v)
        elif key == "census":
            for item in val.split(";"):
                label, _, c = item.rpartition("=")
                recipe.census[label.strip()] = int(c)
        elif key == "sha256":
            declared = val
        elif key == "status":
            recipe.reconstructible = val != "not-reconstructible"
        else:
            raise RecipeError(f"unknown recipe key {key!r}")
    flush()

    if has_rows:
        if declared is None:
            raise RecipeError(f"{recipe.name}: explicit rows without a sha256 line")
        if digest.hexdigest() != declared:
            raise RecipeError(f"{recipe.name}: checksum mismatch, transcription changed")
    try:
        recipe.expected = ExpectedStats(
            alpha_exactness=PUBLISHED_EXACT if "alpha" in expect else UNSPECIFIED, **expect
        )
    except TypeError as exc:
        raise RecipeError(f"{recipe.name}: bad expect line") from exc
    return recipe


@lru_cache(maxsize=None)
def load_recipe(name: str) -> Recipe:
    if name not in NAMES + STUBS:
        raise CatalogError(f"unknown graph {name!r}; known: {', '.join(NAMES)}")
    text = resources.files("chi8.data").joinpath(f"{name}.recipe").read_text(encoding="utf-8")
    recipe = parse_recipe(text)
    if recipe.name != name:
        raise RecipeError(f"recipe file {name}.recipe declares name {recipe.name!r}")
    return recipe


def point_set(recipe: Recipe) -> set[Point]:
    """The vertex set a recipe denotes (base, includes, then exclusions)."""
    if not recipe.reconstructible:
        raise NotReconstructible(f"{recipe.name} is documented but cannot be rebuilt")
    pts: set[Point] = set(point_set(load_recipe(recipe.base))) if recipe.base else set()
    for e in recipe.include_exprs:
        pts |= expand(e)
    explicit = set(recipe.include_points)
    if len(explicit) != len(recipe.include_points):
        raise RecipeError(f"{recipe.name}: duplicate explicit points")
    if pts & explicit:
        raise RecipeError(f"{recipe.name}: explicit points already present")
    pts |= explicit
    missing = set(recipe.exclude_points) - pts
    if missing:
        raise RecipeError(f"{recipe.name}: excluded points not present: {sorted(missing)[:3]}")
    pts -= set(recipe.exclude_points)
    return pts


@lru_cache(maxsize=None)
def build(name: str) -> DistGraph:
    recipe = load_recipe(name)
    pts = point_set(recipe)
    if recipe.expected.v and len(pts) != recipe.expected.v:
        raise RecipeError(f"{name}: assembled {len(pts)} points, expected {recipe.expected.v}")
    return build_graph(pts, name=name)


def classify(p: Point) -> str:
    """Vertex-class label of a catalog point (one of ``CLASS_LABELS``)."""
    mags = sorted((abs(c) for c in p), reverse=True)
    minus = sum(1 for c in p if c < 0)
    if len(p) == 8:
        if mags == [2, 0, 0, 0, 0, 0, 0, 0]:
            return "±2^1 0^7"
        if mags == [2, 2, 2, 0, 0, 0, 0, 0]:
            return "±2^3 0^5"
        if mags == [4, 2, 0, 0, 0, 0, 0, 0]:
            return "±4^1 ±2^1 0^6"
        if mags == [1] * 8:
            return "e1^8" if minus % 2 == 0 else "o1^8"
        if mags == [1, 1, 1, 1, 0, 0, 0, 0]:
            return "e1^4 0^4" if minus % 2 == 0 else "o1^4 0^4"
        if p[0] in (3, 5) and all(abs(c) == 1 for c in p[1:]):
            label = f"+{p[0]}_1 {'e' if minus % 2 == 0 else 'o'}1^7"
            if label in CLASS_LABELS:
                return label
    raise CatalogError(f"point {p} matches no vertex class")


def census(points) -> dict[str, int]:
    out = dict.fromkeys(CLASS_LABELS, 0)
    for p in points:
        out[classify(p)] += 1
    return out


@dataclass(frozen=True)
class Check:
    field: str
    expected: object
    actual: object

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass
class VerifyReport:
    name: str
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def lines(self) -> list[str]:
        return [
            f"{self.name}\t{c.field}\texpected={c.expected}\tactual={c.actual}\t"
            f"{'match' if c.ok else 'MISMATCH'}"
            for c in self.checks
        ]


def verify_recipe(recipe: Recipe, g: Optional[DistGraph] = None) -> VerifyReport:
    """Compare a built graph against the recipe's expected parameters.

    Mismatches are report content; nothing is raised for them.
    """
    if g is None:
        g = build_graph(point_set(recipe), name=recipe.name)
    st = stats(g)
    exp = recipe.expected
    checks = [
        Check("v", exp.v, st.v),
        Check("e", exp.e, st.e),
        Check("deg_min", exp.deg_min, st.deg_min),
        Check("deg_max", exp.deg_max, st.deg_max),
    ]
    if recipe.census:
        got = census(g.points or ())
        for label in CLASS_LABELS:
            checks.append(Check(f"census[{label}]", recipe.census.get(label, 0), got[label]))
    return VerifyReport(recipe.name, checks)


def verify(name: str) -> VerifyReport:
    return verify_recipe(load_recipe(name), build(name))
