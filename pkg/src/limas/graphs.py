"""Weighted undirected graphs, their Laplacians and joint spectra.

The central object downstream is the :class:`SpectralPair`: one orthogonal
basis that diagonalizes both the physical and the communication Laplacian
at once, with the two eigenvalue lists paired positionally. The pair only
exists when the Laplacians commute, which is checked up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import DegenerateSpectrum, EmptyRange, NotCommuting, ShapeMismatch
from .linalg import as_square, eig_sym, ones_completion

COMMUTE_RTOL = 1e-9
# Eigenvalue grouping tolerance for joint diagonalization, relative to ||Lc||_F.
GROUP_RTOL = 1e-8


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with strictly positive edge weights.

    Edges are stored as (i, j, weight) with 0-based indices and i < j.
    Self-loops and duplicate edges are rejected.
    """

    node_count: int
    edges: tuple[tuple[int, int, float], ...]

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int, float]]):
        if node_count < 2:
            raise ValueError(f"graph needs at least 2 nodes, got {node_count}")
        normalized = []
        seen = set()
        for i, j, w in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if i > j:
                i, j = j, i
            if not (0 <= i < j < node_count):
                raise ValueError(f"edge ({i}, {j}) outside node range 0..{node_count - 1}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            w = float(w)
            if not (w > 0.0) or not np.isfinite(w):
                raise ValueError(f"edge ({i}, {j}) weight must be finite and > 0, got {w}")
            seen.add((i, j))
            normalized.append((i, j, w))
        object.__setattr__(self, "node_count", int(node_count))
        object.__setattr__(self, "edges", tuple(normalized))

    @classmethod
    def complete(cls, node_count: int, weight: float = 1.0) -> "WeightedGraph":
        edges = [(i, j, weight) for i in range(node_count) for j in range(i + 1, node_count)]
        return cls(node_count, edges)

    @classmethod
    def cycle(cls, node_count: int, weight: float = 1.0) -> "WeightedGraph":
        edges = [(i, (i + 1) % node_count, weight) for i in range(node_count)]
        return cls(node_count, edges)

    @classmethod
    def path(cls, node_count: int, weight: float = 1.0) -> "WeightedGraph":
        edges = [(i, i + 1, weight) for i in range(node_count - 1)]
        return cls(node_count, edges)


def laplacian(g: WeightedGraph) -> np.ndarray:
    """Laplacian (degree minus adjacency) of a weighted graph.

    Symmetric by construction; off-diagonal (i, j) is minus the edge weight
    and each diagonal entry is the sum of incident weights.
    """
    L = np.zeros((g.node_count, g.node_count))
    for i, j, w in g.edges:
        L[i, j] -= w
        L[j, i] -= w
        L[i, i] += w
        L[j, j] += w
    return L


def is_connected(g: WeightedGraph) -> bool:
    """Union-find connectivity check; exact, no floating point involved."""
    parent = list(range(g.node_count))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    components = g.node_count
    for i, j, _ in g.edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            components -= 1
    return components == 1


class CommuteCheck(NamedTuple):
    ok: bool
    residual: float


def commute_check(Lp, Lc, rtol: float = COMMUTE_RTOL) -> CommuteCheck:
    """Frobenius norm of the commutator Lp Lc - Lc Lp against a relative gate."""
    Lp = as_square(Lp, name="Lp")
    Lc = as_square(Lc, name="Lc")
    if Lp.shape != Lc.shape:
        raise ShapeMismatch(f"Laplacians differ in size: {Lp.shape} vs {Lc.shape}")
    residual = float(np.linalg.norm(Lp @ Lc - Lc @ Lp))
    gate = rtol * max(1.0, float(np.linalg.norm(Lp)) * float(np.linalg.norm(Lc)))
    return CommuteCheck(residual <= gate, residual)


@dataclass(frozen=True)
class SpectralPair:
    """Joint eigenstructure of two commuting Laplacians.

    ``phi`` is orthogonal with first column 1/sqrt(N); column i is a shared
    eigenvector with eigenvalue ``lambda_p[i]`` for the physical Laplacian
    and ``lambda_c[i]`` for the communication Laplacian. Beyond the leading
    zeros the lists carry no magnitude ordering.
    """

    phi: np.ndarray
    lambda_p: np.ndarray
    lambda_c: np.ndarray

    @property
    def node_count(self) -> int:
        return self.phi.shape[0]


def simultaneous_diagonalize(Lp, Lc, group_rtol: float = GROUP_RTOL,
                             commute_rtol: float = COMMUTE_RTOL) -> SpectralPair:
    """Jointly diagonalize two commuting Laplacians.

    The all-ones direction is deflated first (it is a shared kernel vector
    of any Laplacian), then the communication Laplacian is eigendecomposed
    on the complement, its eigenvalues grouped into near-degenerate
    clusters, and the physical Laplacian is diagonalized inside each
    cluster. Repeated communication eigenvalues (complete graphs produce
    them) are therefore handled exactly where naive pairing would fail.
    """
    Lp = as_square(Lp, name="Lp")
    Lc = as_square(Lc, name="Lc")
    check = commute_check(Lp, Lc, rtol=commute_rtol)
    if not check.ok:
        raise NotCommuting(f"commutator residual {check.residual:g} exceeds tolerance")

    N = Lp.shape[0]
    basis = ones_completion(N)
    W = basis[:, 1:]
    Lc_red = W.T @ Lc @ W
    Lp_red = W.T @ Lp @ W

    wc, Vc = eig_sym(Lc_red)
    group_tol = group_rtol * float(np.linalg.norm(Lc))

    columns = []
    start = 0
    while start < N - 1:
        stop = start
        while stop + 1 < N - 1 and abs(wc[stop + 1] - wc[start]) <= group_tol:
            stop += 1
        Vg = Vc[:, start:stop + 1]
        proj = Vg.T @ Lp_red @ Vg
        _, rot = np.linalg.eigh((proj + proj.T) / 2.0)
        columns.append(W @ (Vg @ rot))
        start = stop + 1

    phi = np.column_stack([basis[:, :1]] + columns)
    lambda_p = np.einsum("ij,ij->j", phi, Lp @ phi)
    lambda_c = np.einsum("ij,ij->j", phi, Lc @ phi)
    lambda_p[0] = 0.0
    lambda_c[0] = 0.0

    for L, lam, tag in ((Lp, lambda_p, "physical"), (Lc, lambda_c, "communication")):
        off = phi.T @ L @ phi - np.diag(lam)
        if float(np.linalg.norm(off)) > 1e-8 * float(np.linalg.norm(L)):
            raise DegenerateSpectrum(
                f"off-diagonal residual {np.linalg.norm(off):g} too large "
                f"for the {tag} Laplacian")

    return SpectralPair(phi, lambda_p, lambda_c)


def spectral_extremes(values, skip_first: bool = True) -> tuple[float, float]:
    """(min, max) over the non-consensus modes, i.e. excluding the first entry.

    With ``skip_first=False`` the extremes run over the whole list.
    """
    arr = np.asarray(values, dtype=float).ravel()
    if skip_first:
        arr = arr[1:]
    if arr.size == 0:
        raise EmptyRange("no modes left after excluding the consensus entry")
    return float(arr.min()), float(arr.max())
