import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from digraphlets.graph import DirectedGraph

FIXTURES = Path(__file__).parent / "fixtures"


def random_graph(n: int, density: float, seed: int, reciprocal_boost: float = 0.0) -> DirectedGraph:
    """Dense-matrix random digraph; optionally force extra reciprocal pairs."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, False)
    if reciprocal_boost > 0:
        add_rev = mask & (rng.random((n, n)) < reciprocal_boost)
        mask |= add_rev.T
    edges = np.argwhere(mask)
    return DirectedGraph(edges, n=n)


@pytest.fixture(scope="session")
def small_graphs():
    """A varied pool of small graphs reused across distance-axiom tests."""
    pool = [random_graph(n=12 + (i % 9), density=0.08 + 0.02 * (i % 5), seed=100 + i,
                         reciprocal_boost=0.3 if i % 3 == 0 else 0.0)
            for i in range(12)]
    return [g for g in pool if g.m >= 2]
