import numpy as np
import pytest

from chi8 import catalog
from chi8.mis_exact import max_independent_set
from chi8.mis_heuristic import (
    HeuristicConfig, heuristic_mis, restart_seeds, run_restart, verify_witness,
)

from conftest import complete, random_graph


def test_complete_graph():
    for seed in range(3):
        assert heuristic_mis(complete(9), HeuristicConfig(rng_seed=seed, iterations=50)).size == 1


def test_verify_witness():
    g = complete(3)
    assert verify_witness(g, [])
    assert verify_witness(g, [1])
    assert not verify_witness(g, [0, 1])
    with pytest.raises(IndexError):
        verify_witness(g, [5])


def test_result_is_lower_bound(rng):
    for _ in range(20):
        g = random_graph(int(rng.integers(5, 60)), float(rng.uniform(0.05, 0.6)), rng)
        h = heuristic_mis(g, HeuristicConfig(rng_seed=3, iterations=300, restarts=2))
        assert not h.exact
        assert verify_witness(g, h.witness)
        assert h.size <= max_independent_set(g).size


@pytest.mark.parametrize("name, alpha", [("G240", 16), ("G327", 17)])
def test_soundness_on_catalog(name, alpha):
    g = catalog.build(name)
    h = heuristic_mis(g, HeuristicConfig(rng_seed=1, iterations=3000, restarts=1))
    assert verify_witness(g, h.witness)
    assert h.size <= alpha


def test_seed_determinism():
    g = catalog.build("G516")
    cfg = HeuristicConfig(rng_seed=7, iterations=500, restarts=2)
    assert heuristic_mis(g, cfg).witness == heuristic_mis(g, cfg).witness


def test_anytime_trace_non_decreasing():
    g = catalog.build("G720")
    run = run_restart(g, HeuristicConfig(iterations=2000), restart_seeds(5, 1)[0])
    assert (np.diff(run.trace) >= 0).all()
    assert run.trace[-1] == len(run.witness)


def test_restart_seeds_distinct():
    seeds = restart_seeds(1, 8)
    assert len(set(seeds)) == 8 and seeds == restart_seeds(1, 8)


def test_best_of_restarts_is_order_independent():
    g = catalog.build("G327")
    cfg = HeuristicConfig(rng_seed=2, iterations=200, restarts=3)
    runs = [run_restart(g, cfg, s) for s in restart_seeds(2, 3)]
    assert heuristic_mis(g, cfg).size == max(len(r.witness) for r in runs)


def test_config_validation():
    with pytest.raises(ValueError):
        HeuristicConfig(iterations=0)
