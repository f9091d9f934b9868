import itertools

import pytest

from chi8 import catalog
from chi8.coloring import (
    BoundReport, Coloring, ColoringError, chi_lower, decode_assignment, dsatur,
    encode_kcoloring, improve_coloring, is_valid_coloring, model_of, parse_model,
)
from chi8.mis_exact import SearchBudget

from conftest import complete, cycle, edgeless, random_graph


def independent_check(g, assignment):
    """Edge-by-edge check written without the matrix trick."""
    if len(assignment) != g.n:
        return False
    return all(assignment[u] != assignment[v] for u, v in g.edges())


def brute_force_coloring(g, k):
    """First proper k-colouring in lexicographic order, or None."""
    n = g.n
    nbrs = [set(g.neighbors(i).tolist()) for i in range(n)]
    col = [-1] * n

    def rec(i):
        if i == n:
            return True
        for c in range(k):
            if all(col[j] != c for j in nbrs[i] if j < i):
                col[i] = c
                if rec(i + 1):
                    return True
        col[i] = -1
        return False

    return Coloring(tuple(col)) if rec(0) else None


@pytest.mark.parametrize("v, a, want", [
    (843, 34, 25), (516, 24, 22), (10, 10, 1), (784, 34, 24), (1, 1, 1), (17, 16, 2),
])
def test_chi_lower(v, a, want):
    assert chi_lower(v, a) == want


def test_chi_lower_zero_alpha():
    with pytest.raises(ValueError):
        chi_lower(5, 0)


def test_table_chi_lower_row():
    table = [(327, 17, 20), (347, 18, 20), (516, 24, 22), (720, 33, 22),
             (768, 33, 24), (784, 34, 24), (818, 34, 25), (843, 34, 25)]
    for v, a, want in table:
        assert chi_lower(v, a) == want


def test_bound_report():
    r = BoundReport(843, 34, True, 25, 27)
    assert "chi>=\t25" in r.lines()
    with pytest.raises(ValueError):
        BoundReport(843, 34, True, 24)
    with pytest.raises(ValueError):
        BoundReport(843, 34, True, 25, 20)


def test_dsatur_small():
    assert dsatur(complete(4)).colors_used == 4
    assert dsatur(edgeless(6)).colors_used == 1
    assert dsatur(cycle(6)).colors_used == 2
    assert dsatur(cycle(5)).colors_used == 3


def test_dsatur_deterministic_and_valid(rng):
    for _ in range(10):
        g = random_graph(40, 0.3, rng)
        c = dsatur(g)
        assert independent_check(g, c.assignment)
        assert c == dsatur(g)


@pytest.mark.parametrize("name, alpha", [("G240", 16), ("G327", 17), ("G516", 24)])
def test_dsatur_catalog_respects_pigeonhole(name, alpha):
    g = catalog.build(name)
    c = dsatur(g)
    assert independent_check(g, c.assignment)
    assert c.colors_used >= chi_lower(g.n, alpha)


def test_improve_coloring_k4():
    assert improve_coloring(complete(4), 3, SearchBudget(max_nodes=5000)) is None
    c = improve_coloring(complete(4), 4)
    assert c is not None and independent_check(complete(4), c.assignment)


def test_improve_coloring_reduces_colours(rng):
    g = random_graph(60, 0.2, rng)
    start = dsatur(g).colors_used
    c = improve_coloring(g, start - 1, SearchBudget(max_nodes=200_000), rng_seed=1)
    if c is not None:
        assert independent_check(g, c.assignment)
        assert c.colors_used <= start - 1


def test_improve_coloring_g240():
    g = catalog.build("G240")
    c = improve_coloring(g, 16, SearchBudget(max_nodes=500_000), rng_seed=0)
    assert c is not None
    assert independent_check(g, c.assignment)
    assert c.colors_used >= 15


def test_is_valid_coloring():
    g = cycle(4)
    assert is_valid_coloring(g, [0, 1, 0, 1])
    assert not is_valid_coloring(g, [0, 0, 1, 1])
    assert not is_valid_coloring(g, [0, 1, 0])


def test_triangle_cnf_size():
    cnf = encode_kcoloring(complete(3), 3)
    assert cnf.n_vars == 9
    # 3 at-least-one + 3 vertices * C(3,2) at-most-one + 3 edges * 3 colours
    assert len(cnf.clauses) == 3 + 9 + 9 == 21
    assert "p cnf 9 21" in cnf.dimacs()
    assert all(line.endswith(" 0") for line in cnf.dimacs().splitlines() if line[0] not in "cp")


def test_cnf_variable_numbering():
    cnf = encode_kcoloring(complete(2), 3)
    assert cnf.clauses[0] == (1, 2, 3)
    assert cnf.clauses[1] == (4, 5, 6)


def test_k4_not_3_colourable_in_cnf():
    g = complete(4)
    cnf = encode_kcoloring(g, 3)
    for cols in itertools.product(range(3), repeat=4):
        true_vars = {v * 3 + c + 1 for v, c in enumerate(cols)}
        assert cnf.violated(true_vars)


def test_cnf_round_trip_and_soundness(rng):
    for _ in range(20):
        g = random_graph(int(rng.integers(3, 9)), float(rng.uniform(0.2, 0.7)), rng)
        for k in range(2, 6):
            cnf = encode_kcoloring(g, k)
            good = brute_force_coloring(g, k)
            if good is not None:
                model = model_of(good, k)
                assert not cnf.violated({x for x in model if x > 0})
                assert decode_assignment(g, k, model) == good
            bad = [0] * g.n
            if g.edges():
                with pytest.raises(ColoringError):
                    decode_assignment(g, k, model_of(Coloring(tuple(bad)), k))


def test_decode_rejects_partial_and_double():
    g = cycle(4)
    with pytest.raises(ColoringError):
        decode_assignment(g, 2, [1])
    with pytest.raises(ColoringError):
        decode_assignment(g, 2, [1, 2, 4, 5, 7])  # vertex 0 has two colours


def test_parse_model():
    text = "c comment\ns SATISFIABLE\nv 1 -2 3\nv -4 0\n"
    assert parse_model(text) == [1, -2, 3, -4]
