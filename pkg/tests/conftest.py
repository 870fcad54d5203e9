import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from setwise_cd import Quadratic, build_graph, consensus_dual_problem

from oracles import random_connected_edges


@pytest.fixture
def p2():
    return build_graph(2, [(0, 1)])


@pytest.fixture
def k3():
    return build_graph(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def c4():
    return build_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


@pytest.fixture
def path3():
    return build_graph(3, [(0, 1), (1, 2)])


def two_node_problem(a1=1.0, a2=3.0):
    """f_i(t) = 0.5 (t - a_i)^2 as quadratics; everything solvable by hand."""
    g = build_graph(2, [(0, 1)])
    fns = [
        Quadratic(np.array([[1.0]]), np.array([-a]), 0.5 * a * a) for a in (a1, a2)
    ]
    return consensus_dual_problem(g, fns, 1)


def random_problem(rng, n=None, d=1, extra=2):
    n = n or int(rng.integers(3, 9))
    g = build_graph(n, random_connected_edges(rng, n, extra=extra))
    fns = []
    for _ in range(n):
        a = rng.standard_normal((d, d))
        q = a.T @ a + 0.5 * np.eye(d)
        fns.append(
            Quadratic(q, rng.standard_normal(d), float(rng.standard_normal()))
        )
    return consensus_dual_problem(g, fns, d)
