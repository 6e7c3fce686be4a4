"""Shared fixtures and randomized model builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from limas import LimasModel, WeightedGraph, laplacian

A_SHOWCASE = np.array([[1.0, 2.0], [0.0, 1.5]])
B_SHOWCASE = np.array([[0.0], [1.0]])


def cycle4_graph(weight: float = 0.1) -> WeightedGraph:
    """4-node cycle 1-2, 2-4, 4-3, 3-1 (0-based here)."""
    return WeightedGraph(4, [(0, 1, weight), (1, 3, weight),
                             (2, 3, weight), (0, 2, weight)])


def four_agent_model(alpha: float = 0.3, gc: WeightedGraph | None = None) -> LimasModel:
    """Two-state agents on a weight-0.1 cycle with a unit complete overlay."""
    return LimasModel(A_SHOWCASE, B_SHOWCASE, cycle4_graph(),
                      gc if gc is not None else WeightedGraph.complete(4),
                      alpha=alpha)


@pytest.fixture
def showcase_model() -> LimasModel:
    return four_agent_model()


def random_connected_graph(rng, N: int, w_lo: float = 0.05, w_hi: float = 0.5,
                           extra_p: float = 0.4) -> WeightedGraph:
    """Random spanning tree plus extra edges, weights uniform in [w_lo, w_hi]."""
    edges = {}
    order = rng.permutation(N)
    for idx in range(1, N):
        i = int(order[idx])
        j = int(order[int(rng.integers(0, idx))])
        a, b = min(i, j), max(i, j)
        edges[(a, b)] = float(rng.uniform(w_lo, w_hi))
    for a in range(N):
        for b in range(a + 1, N):
            if (a, b) not in edges and rng.random() < extra_p:
                edges[(a, b)] = float(rng.uniform(w_lo, w_hi))
    return WeightedGraph(N, [(i, j, w) for (i, j), w in edges.items()])


def commuting_graph_pair(rng, N: int) -> tuple[WeightedGraph, WeightedGraph]:
    """A pair of graphs whose Laplacians commute.

    Either the communication graph scales the physical one, or it combines
    the same base graph with a uniform complete overlay; both constructions
    keep all weights positive and commute exactly.
    """
    base = random_connected_graph(rng, N)
    scale_p = float(rng.uniform(0.2, 1.5))
    gp = WeightedGraph(N, [(i, j, scale_p * w) for i, j, w in base.edges])
    if rng.random() < 0.3:
        scale_c = float(rng.uniform(0.3, 2.0))
        gc = WeightedGraph(N, [(i, j, scale_c * w) for i, j, w in base.edges])
    else:
        mix = float(rng.uniform(0.0, 1.0))
        overlay = float(rng.uniform(0.2, 1.0))
        base_w = {(i, j): w for i, j, w in base.edges}
        gc = WeightedGraph(N, [(i, j, overlay + mix * base_w.get((i, j), 0.0))
                               for i in range(N) for j in range(i + 1, N)])
    return gp, gc


def random_state_matrix(rng, n: int, rho_lo: float = 0.3,
                        rho_hi: float = 1.4) -> np.ndarray:
    A = rng.uniform(-1.0, 1.0, (n, n))
    rho = max(float(np.max(np.abs(np.linalg.eigvals(A)))), 1e-3)
    return A * (float(rng.uniform(rho_lo, rho_hi)) / rho)


def random_coupled_model(rng, N: int | None = None, n: int | None = None,
                         alpha_scale: float = 0.25) -> LimasModel:
    """Random model with commuting graphs and proportional coupling."""
    N = N if N is not None else int(rng.integers(3, 8))
    n = n if n is not None else int(rng.integers(1, 5))
    gp, gc = commuting_graph_pair(rng, N)
    A = random_state_matrix(rng, n)
    B = rng.uniform(-1.0, 1.0, (n, 1))
    while float(np.linalg.norm(B)) < 0.1:
        B = rng.uniform(-1.0, 1.0, (n, 1))
    alpha = float(rng.uniform(-alpha_scale, alpha_scale))
    return LimasModel(A, B, gp, gc, alpha=alpha)


def random_scalar_instance(rng, N: int | None = None, w_hi: float = 0.5):
    """(a, gp, gc) for the scalar condition suites; both graphs connected."""
    N = N if N is not None else int(rng.integers(3, 7))
    gp = random_connected_graph(rng, N, w_lo=0.05, w_hi=w_hi)
    gc = random_connected_graph(rng, N, w_lo=0.1, w_hi=1.0)
    a = float(rng.uniform(-2.0, 2.0))
    return a, gp, gc


def nonzero_modes(L: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues with the structural zero removed."""
    return np.linalg.eigvalsh(L)[1:]


def graph_modes(g: WeightedGraph) -> np.ndarray:
    return nonzero_modes(laplacian(g))
