"""Effective resistance through the cut-space (edge) form or the pseudoinverse.

The edge form evaluates x^T (R W R^T)^{-1} x with x = L_e(F)^{-1} E_F^T d for
a probe vector d, and is the default; the pseudoinverse form evaluates
d^T L(G)^+ d and serves as an independent cross-check.  Both accept signed
weights as long as the required inverse exists.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import graph as gr
from . import spectral as sp
from .errors import DisconnectedGraphError, GraphConstructionError, SingularMatrixError

__all__ = [
    "effective_resistance",
    "resistance_matrix",
    "node_pair_resistance_matrix",
    "total_effective_resistance",
]

# smallest/largest singular value ratio below which R W R^T is deemed singular
_SINGULAR_RTOL = 1e-10


def _checked_cut_gram(g: gr.WeightedGraph, f: gr.ForestDecomposition) -> np.ndarray:
    A = gr.weighted_cut_matrix(g, f)
    if A.size:
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[-1] <= _SINGULAR_RTOL * sv[0]:
            raise SingularMatrixError(
                "cut-weight matrix R W R^T is numerically singular "
                f"(sigma_min/sigma_max = {0.0 if sv[0] == 0 else sv[-1] / sv[0]:.3e}); "
                "the network sits on a degeneracy of its weights"
            )
    return A


def _pair_probe_columns(g: gr.WeightedGraph, pairs: Sequence[tuple[int, int]]) -> np.ndarray:
    B = np.zeros((g.node_count, len(pairs)))
    for j, (u, v) in enumerate(pairs):
        if not (0 <= u < g.node_count) or not (0 <= v < g.node_count):
            raise GraphConstructionError(f"node pair ({u}, {v}) out of range")
        if u == v:
            raise GraphConstructionError(f"node pair ({u}, {v}): endpoints must differ")
        B[u, j] += 1.0
        B[v, j] -= 1.0
    return B


def node_pair_resistance_matrix(
    g: gr.WeightedGraph, pairs: Sequence[tuple[int, int]]
) -> np.ndarray:
    """Gram matrix of effective resistances over arbitrary node pairs.

    Entry (i, j) is (e_{u_i}-e_{v_i})^T L^+ (e_{u_j}-e_{v_j}), evaluated in
    the edge form.  Every pair must lie inside one component; the pairs need
    not be edges of the graph.
    """
    _, labels = gr.connected_components(g)
    for u, v in pairs:
        if not (0 <= u < g.node_count) or not (0 <= v < g.node_count):
            raise GraphConstructionError(f"node pair ({u}, {v}) out of range")
        if u != v and labels[u] != labels[v]:
            raise DisconnectedGraphError(
                f"nodes {u} and {v} lie in different components: infinite resistance"
            )
    f = gr.spanning_forest(g)
    B = _pair_probe_columns(g, pairs)
    X = gr.forest_left_inverse(g, f) @ B
    A = _checked_cut_gram(g, f)
    if X.shape[0] == 0:
        return np.zeros((len(pairs), len(pairs)))
    M = X.T @ np.linalg.solve(A, X)
    return 0.5 * (M + M.T)


def effective_resistance(g: gr.WeightedGraph, u: int, v: int, method: str = "edge_form") -> float:
    """Effective resistance between nodes u and v.

    ``method`` is ``"edge_form"`` (default) or ``"pseudoinverse"``; the two
    agree to rounding whenever both are defined.  Raises
    DisconnectedGraphError when u and v are in different components and
    SingularMatrixError when R W R^T cannot be inverted.
    """
    if not (0 <= u < g.node_count) or not (0 <= v < g.node_count):
        raise GraphConstructionError(f"nodes ({u}, {v}) out of range for {g.node_count} nodes")
    if u == v:
        raise GraphConstructionError("effective_resistance endpoints must differ")
    if method == "edge_form":
        return float(node_pair_resistance_matrix(g, [(u, v)])[0, 0])
    if method == "pseudoinverse":
        _, labels = gr.connected_components(g)
        if labels[u] != labels[v]:
            raise DisconnectedGraphError(
                f"nodes {u} and {v} lie in different components: infinite resistance"
            )
        d = np.zeros(g.node_count)
        d[u], d[v] = 1.0, -1.0
        return float(d @ sp.pseudoinverse(gr.laplacian(g)) @ d)
    raise ValueError(f"unknown method {method!r}; expected 'edge_form' or 'pseudoinverse'")


def resistance_matrix(g: gr.WeightedGraph, edge_subset: Sequence[int]) -> np.ndarray:
    """Resistance Gram matrix over a subset of edges (ascending index order).

    Row/column j corresponds to the j-th smallest index in ``edge_subset``;
    diagonal entries are the edges' effective resistances.  Requires a
    connected graph.
    """
    count, _ = gr.connected_components(g)
    if count != 1:
        raise DisconnectedGraphError("resistance_matrix requires a connected graph")
    subset = sorted(set(int(k) for k in edge_subset))
    for k in subset:
        if not (0 <= k < g.edge_count):
            raise GraphConstructionError(f"edge index {k} out of range for {g.edge_count} edges")
    pairs = [(g.edges[k][0], g.edges[k][1]) for k in subset]
    return node_pair_resistance_matrix(g, pairs)


def total_effective_resistance(g: gr.WeightedGraph, edge_subset: Sequence[int]) -> float:
    """Sum of effective resistances across the subset's edges (matrix trace)."""
    return float(np.trace(resistance_matrix(g, edge_subset)))
