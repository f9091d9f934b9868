import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chi8.notation import (
    EVEN, MINUS, NONE, ODD, PLUS, PLUS_MINUS,
    NotationError, Term, VertexSetExpr, count, expand, format, parse,
)


def test_parse_gosset_integer_part():
    e = parse("±2^2 0^6")
    assert [(t.value, t.repeat, t.sign_mode) for t in e.terms] == [(2, 2, PLUS_MINUS), (0, 6, NONE)]


def test_parse_origin():
    e = parse("0^8")
    assert e.terms == (Term(0, 8, NONE),)


def test_parse_fixed_positions():
    e = parse("+1_1 e1_368 0^4")
    assert e.terms == (
        Term(1, 1, PLUS, (1,)),
        Term(1, 3, EVEN, (3, 6, 8)),
        Term(0, 4, NONE),
    )


@pytest.mark.parametrize(
    "text, n",
    [
        ("±2^2 0^6", 112),
        ("e1^8", 128),
        ("o1^8", 128),
        ("±2^3 0^5", 448),
        ("+3_1 o1^7", 64),
        ("+1_1 e1^7", 64),
        ("0_1 ±2^1 0^6", 14),
        ("+2_1 ±2^2 0^5", 84),
        ("+4_1 ±2^1 0^6", 14),
        ("+1_1 e1_368 0^4", 4),
        ("0^8", 1),
    ],
)
def test_published_counts(text, n):
    e = parse(text)
    assert count(e) == n
    assert len(expand(e)) == n


def test_expand_e18_parity():
    pts = expand(parse("e1^8"))
    assert all(sum(c < 0 for c in p) % 2 == 0 for p in pts)


def test_expand_single_point():
    assert expand(parse("+2_468 0^5")) == {(0, 0, 0, 2, 0, 2, 0, 2)}
    assert expand(parse("+2_1 0^7")) == {(2, 0, 0, 0, 0, 0, 0, 0)}


def test_expand_biased_first_coordinate():
    assert {p[0] for p in expand(parse("+3_1 o1^7"))} == {3}


def test_plus_minus_varies_per_coordinate():
    assert expand(parse("±2^2", dimension=2)) == {(2, 2), (2, -2), (-2, 2), (-2, -2)}
    assert expand(parse("-2^2", dimension=2)) == {(-2, -2)}


def test_ascii_plus_minus_and_minus_sign():
    assert parse("+-2^3 0^5") == parse("±2^3 0^5")
    assert expand(parse("-1_1 o1^7")) == {(-1,) + p[1:] for p in expand(parse("+1_1 o1^7"))}


def test_negate_union():
    e = parse("±(0^4 1_5 1_6 1_7 -1_8)")
    assert e.negate_union
    assert expand(e) == {(0, 0, 0, 0, 1, 1, 1, -1), (0, 0, 0, 0, -1, -1, -1, 1)}
    assert count(e) == 2


def test_omitted_superscript_inferred():
    assert parse("±2^3 0") == parse("±2^3 0^5")
    assert parse("+2_468 0") == parse("+2_468 0^5")


@pytest.mark.parametrize(
    "bad",
    [
        "±2^3 0^4",          # sums to 7
        "±2^3 0^6",          # sums to 9
        "+2_11 0^6",         # duplicate position inside a term
        "+2_1 +2_1 0^6",     # duplicate position across terms
        "e0^8",              # parity on zero
        "x2^8",              # bad prefix
        "2^ 0^7",
        "±2 0",              # two omitted superscripts
        "",
    ],
)
def test_parse_errors(bad):
    with pytest.raises(NotationError):
        parse(bad)


@pytest.mark.parametrize(
    "expr, text",
    [
        (VertexSetExpr((Term(2, 1, PLUS_MINUS), Term(0, 7))), "±2^1 0^7"),
        (VertexSetExpr((Term(3, 1, PLUS, (1,)), Term(1, 7, ODD))), "+3_1 o1^7"),
        (VertexSetExpr((Term(0, 8),)), "0^8"),
    ],
)
def test_format(expr, text):
    assert format(expr) == text
    assert parse(text) == expr


def test_term_invariants():
    with pytest.raises(NotationError):
        Term(1, 2, PLUS, (1,))
    with pytest.raises(NotationError):
        Term(0, 2, EVEN)
    assert Term(0, 3, PLUS_MINUS).sign_mode == NONE


# --- properties -----------------------------------------------------------

MODES = [PLUS, MINUS, PLUS_MINUS, EVEN, ODD]


@st.composite
def expressions(draw, max_dim=8):
    dim = draw(st.integers(1, max_dim))
    positions = list(range(1, dim + 1))
    order = draw(st.permutations(positions))
    terms = []
    i = 0
    while i < dim:
        k = draw(st.integers(1, dim - i))
        value = draw(st.integers(0, 4))
        mode = NONE if value == 0 else draw(st.sampled_from(MODES))
        fixed = draw(st.booleans())
        pos = tuple(order[i:i + k]) if fixed else None
        terms.append(Term(value, k, mode, pos))
        i += k
    neg = draw(st.booleans())
    return VertexSetExpr(tuple(terms), dim, neg)


@settings(max_examples=300, deadline=None)
@given(expressions())
def test_count_matches_expand(e):
    assert count(e) == len(expand(e))


@settings(max_examples=200, deadline=None)
@given(expressions())
def test_format_parse_round_trip(e):
    assert parse(format(e), e.dimension) == e


@settings(max_examples=200, deadline=None)
@given(expressions(), st.integers(1, 4))
def test_parity_partition(e, value):
    # replace the first term by e/o/± value^k and compare
    t = e.terms[0]
    def with_mode(mode):
        return VertexSetExpr((Term(value, t.repeat, mode, t.positions),) + e.terms[1:],
                             e.dimension, e.negate_union)
    ev, od, pm = (expand(with_mode(m)) for m in (EVEN, ODD, PLUS_MINUS))
    free = [u.value for u in with_mode(EVEN).terms if u.positions is None]
    if not e.negate_union and len(free) == len(set(free)):
        assert not (ev & od)
    assert ev | od == pm


def _closed(t):
    if t.sign_mode in (NONE, PLUS_MINUS):
        return True
    if t.sign_mode in (EVEN, ODD):
        return t.repeat % 2 == 0
    return False


@settings(max_examples=300, deadline=None)
@given(expressions())
def test_negation_closure(e):
    pts = expand(e)
    is_closed = pts == {tuple(-c for c in p) for p in pts}
    if e.negate_union or all(_closed(t) for t in e.terms):
        assert is_closed
    free_mags = [t.value for t in e.terms if t.positions is None]
    if len(free_mags) == len(set(free_mags)) and not e.negate_union:
        assert is_closed == all(_closed(t) for t in e.terms)


def test_expand_brute_force_small():
    # independent oracle: filter all vectors over the magnitude alphabet
    e = parse("+1_1 e1^2 0^2", dimension=5)
    brute = set()
    for x in itertools.product((-1, 0, 1), repeat=5):
        if x[0] != 1:
            continue
        rest = x[1:]
        if sorted(map(abs, rest)) == [0, 0, 1, 1] and sum(c < 0 for c in rest) % 2 == 0:
            brute.add(x)
    assert expand(e) == brute
