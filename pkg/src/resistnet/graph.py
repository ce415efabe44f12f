"""Weighted graphs, incidence structure, and spanning-forest decompositions.

A network is an undirected graph on nodes ``0..n-1`` with real nonzero edge
weights (negative and positive weights both allowed).  Edges carry a fixed
reference orientation, tail -> head with ``tail < head``, which makes the
incidence matrix and every derived object deterministic.  Edge indices are
positions in the edge tuple and are preserved by every operation here.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphConstructionError, GraphFormatError

__all__ = [
    "WeightedGraph",
    "ForestDecomposition",
    "SignedPartition",
    "build_graph",
    "incidence_matrix",
    "laplacian",
    "edge_laplacian",
    "connected_components",
    "component_indicators",
    "spanning_forest",
    "essential_edge_laplacian",
    "weighted_cut_matrix",
    "forest_left_inverse",
    "signed_partition",
    "positive_subgraph",
    "negative_subgraph",
    "negative_cut_components",
    "path_edge_set",
    "is_balanced",
    "graph_from_dict",
    "graph_to_dict",
    "load_graph",
    "save_graph",
]


@dataclass(frozen=True)
class WeightedGraph:
    """Immutable weighted graph.

    Attributes
    ----------
    node_count : int
        Number of nodes; nodes are ``0..node_count-1``.
    edges : tuple of (tail, head, weight)
        Canonically oriented edges (``tail < head``), in insertion order.
        The position of an edge in this tuple is its edge index.
    """

    node_count: int
    edges: tuple[tuple[int, int, float], ...]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def tails(self) -> np.ndarray:
        return np.array([e[0] for e in self.edges], dtype=int)

    @cached_property
    def heads(self) -> np.ndarray:
        return np.array([e[1] for e in self.edges], dtype=int)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([e[2] for e in self.edges], dtype=float)


@dataclass(frozen=True)
class ForestDecomposition:
    """Spanning forest of a graph plus the induced cut-space basis.

    ``forest_edges`` and ``cycle_edges`` partition the edge indices
    (both ascending).  ``cut_matrix`` is the (n-c) x m matrix R with
    identity on the forest columns and ``tucker_matrix`` T on the cycle
    columns, so that E = E_F R with E_F the forest incidence columns.
    """

    forest_edges: tuple[int, ...]
    cycle_edges: tuple[int, ...]
    component_count: int
    cut_matrix: np.ndarray
    tucker_matrix: np.ndarray


@dataclass(frozen=True)
class SignedPartition:
    """Edge indices split by weight sign (weight zero is never stored)."""

    positive_edges: tuple[int, ...]
    negative_edges: tuple[int, ...]


def build_graph(node_count: int, edges: Iterable[Sequence]) -> WeightedGraph:
    """Validate edge data and return a canonically oriented graph.

    Parameters
    ----------
    node_count : int
        Positive number of nodes.
    edges : iterable of (u, v, w)
        Undirected edges; orientation is normalized to tail < head.

    Raises
    ------
    GraphConstructionError
        On out-of-range endpoints, self-loops, duplicate node pairs, or
        non-finite / zero weights.  Messages name the offending edge.
    """
    if isinstance(node_count, bool) or not isinstance(node_count, (int, np.integer)) or node_count < 1:
        raise GraphConstructionError(f"node_count must be a positive integer, got {node_count!r}")
    canon: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    for k, edge in enumerate(edges):
        try:
            u, v, w = edge
        except (TypeError, ValueError) as exc:
            raise GraphConstructionError(f"edge {k}: expected (u, v, w), got {edge!r}") from exc
        if (
            isinstance(u, bool)
            or isinstance(v, bool)
            or not isinstance(u, (int, np.integer))
            or not isinstance(v, (int, np.integer))
        ):
            raise GraphConstructionError(f"edge {k} ({u!r}, {v!r}): endpoints must be integers")
        u, v = int(u), int(v)
        if not (0 <= u < node_count) or not (0 <= v < node_count):
            raise GraphConstructionError(
                f"edge {k} ({u}, {v}): endpoint out of range for {node_count} nodes"
            )
        if u == v:
            raise GraphConstructionError(f"edge {k} ({u}, {v}): self-loops are not allowed")
        w = float(w)
        if not math.isfinite(w):
            raise GraphConstructionError(f"edge {k} ({u}, {v}): weight {w!r} is not finite")
        if w == 0.0:
            raise GraphConstructionError(
                f"edge {k} ({u}, {v}): weight zero is not a valid edge; drop the edge instead"
            )
        tail, head = (u, v) if u < v else (v, u)
        if (tail, head) in seen:
            raise GraphConstructionError(f"edge {k} ({u}, {v}): duplicate node pair")
        seen.add((tail, head))
        canon.append((tail, head, w))
    return WeightedGraph(int(node_count), tuple(canon))


def incidence_matrix(g: WeightedGraph) -> np.ndarray:
    """Node-edge incidence matrix E, +1 at the tail and -1 at the head.

    Columns follow edge-index order; column sums vanish, so 1^T E = 0.
    """
    E = np.zeros((g.node_count, g.edge_count))
    for k, (tail, head, _) in enumerate(g.edges):
        E[tail, k] = 1.0
        E[head, k] = -1.0
    return E


def laplacian(g: WeightedGraph) -> np.ndarray:
    """Weighted graph Laplacian L = E W E^T (symmetric, 1 in its null space)."""
    E = incidence_matrix(g)
    return (E * g.weights) @ E.T


def edge_laplacian(g: WeightedGraph) -> np.ndarray:
    """Weighted edge Laplacian W^{1/2} E^T E W^{1/2}, nonnegative weights only.

    Defined only when no weight is negative (the square root must be real);
    use :func:`essential_edge_laplacian` for signed analysis.
    """
    if np.any(g.weights < 0):
        raise GraphConstructionError("edge_laplacian requires nonnegative weights")
    E = incidence_matrix(g)
    s = np.sqrt(g.weights)
    return (s[:, None] * (E.T @ E)) * s[None, :]


def _adjacency(g: WeightedGraph) -> list[list[tuple[int, int]]]:
    # neighbor lists sorted by neighbor index so traversals are deterministic
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.node_count)]
    for k, (tail, head, _) in enumerate(g.edges):
        adj[tail].append((head, k))
        adj[head].append((tail, k))
    for lst in adj:
        lst.sort()
    return adj


def connected_components(g: WeightedGraph) -> tuple[int, np.ndarray]:
    """Component count and a label per node.

    Labels are assigned in order of each component's smallest node, so the
    labeling is deterministic.
    """
    adj = _adjacency(g)
    labels = np.full(g.node_count, -1, dtype=int)
    count = 0
    for root in range(g.node_count):
        if labels[root] >= 0:
            continue
        labels[root] = count
        queue = deque([root])
        while queue:
            node = queue.popleft()
            for nbr, _ in adj[node]:
                if labels[nbr] < 0:
                    labels[nbr] = count
                    queue.append(nbr)
        count += 1
    return count, labels


def component_indicators(g: WeightedGraph, normalized: bool = False) -> np.ndarray:
    """n x c indicator matrix of components (optionally unit-norm columns)."""
    count, labels = connected_components(g)
    N = np.zeros((g.node_count, count))
    N[np.arange(g.node_count), labels] = 1.0
    if normalized:
        N /= np.sqrt(N.sum(axis=0))
    return N


def spanning_forest(g: WeightedGraph) -> ForestDecomposition:
    """BFS spanning forest and the cut-space basis R = [I T] it induces.

    The forest is grown from the lowest-index node of each component with
    neighbors visited in index order; forest and cycle edge lists are then
    sorted ascending.  T solves L_e(F) T = E_F^T E_C, where L_e(F) = E_F^T E_F
    is the unweighted edge Laplacian of the forest, and R carries the identity
    on forest columns and T on cycle columns (in original edge positions).
    """
    adj = _adjacency(g)
    visited = [False] * g.node_count
    in_forest = [False] * g.edge_count
    component_count = 0
    for root in range(g.node_count):
        if visited[root]:
            continue
        component_count += 1
        visited[root] = True
        queue = deque([root])
        while queue:
            node = queue.popleft()
            for nbr, k in adj[node]:
                if not visited[nbr]:
                    visited[nbr] = True
                    in_forest[k] = True
                    queue.append(nbr)
    forest = tuple(k for k in range(g.edge_count) if in_forest[k])
    cycle = tuple(k for k in range(g.edge_count) if not in_forest[k])

    E = incidence_matrix(g)
    EF = E[:, forest]
    EC = E[:, cycle]
    n_f = len(forest)
    if n_f:
        Le = EF.T @ EF
        T = np.linalg.solve(Le, EF.T @ EC) if cycle else np.zeros((n_f, 0))
    else:
        T = np.zeros((0, len(cycle)))
    R = np.zeros((n_f, g.edge_count))
    R[:, list(forest)] = np.eye(n_f)
    if cycle:
        R[:, list(cycle)] = T
    return ForestDecomposition(forest, cycle, component_count, R, T)


def _check_decomposition(g: WeightedGraph, f: ForestDecomposition) -> None:
    if f.cut_matrix.shape != (len(f.forest_edges), g.edge_count):
        raise GraphConstructionError(
            "forest decomposition does not match the graph: "
            f"cut matrix is {f.cut_matrix.shape}, expected "
            f"({len(f.forest_edges)}, {g.edge_count})"
        )


def weighted_cut_matrix(g: WeightedGraph, f: ForestDecomposition) -> np.ndarray:
    """R W R^T, the weight Gram matrix of the cut-space basis."""
    _check_decomposition(g, f)
    R = f.cut_matrix
    return (R * g.weights) @ R.T


def essential_edge_laplacian(g: WeightedGraph, f: ForestDecomposition) -> np.ndarray:
    """Essential edge Laplacian L_e(F) R W R^T (similar to L with zeros split off).

    L_e(F) here is the unweighted forest edge Laplacian E_F^T E_F; the weights
    enter only through R W R^T.
    """
    _check_decomposition(g, f)
    E = incidence_matrix(g)
    EF = E[:, list(f.forest_edges)]
    return (EF.T @ EF) @ weighted_cut_matrix(g, f)


def forest_left_inverse(g: WeightedGraph, f: ForestDecomposition) -> np.ndarray:
    """Left inverse L_e(F)^{-1} E_F^T of the forest incidence columns."""
    _check_decomposition(g, f)
    E = incidence_matrix(g)
    EF = E[:, list(f.forest_edges)]
    if not f.forest_edges:
        return np.zeros((0, g.node_count))
    return np.linalg.solve(EF.T @ EF, EF.T)


def signed_partition(g: WeightedGraph) -> SignedPartition:
    """Edge indices split into positive-weight and negative-weight groups."""
    pos = tuple(k for k, (_, _, w) in enumerate(g.edges) if w > 0)
    neg = tuple(k for k, (_, _, w) in enumerate(g.edges) if w < 0)
    return SignedPartition(pos, neg)


def _edge_subgraph(g: WeightedGraph, keep: Sequence[int]) -> WeightedGraph:
    return WeightedGraph(g.node_count, tuple(g.edges[k] for k in keep))


def positive_subgraph(g: WeightedGraph) -> WeightedGraph:
    """Subgraph on the full node set keeping only positive-weight edges."""
    return _edge_subgraph(g, signed_partition(g).positive_edges)


def negative_subgraph(g: WeightedGraph) -> WeightedGraph:
    """Subgraph on the full node set keeping only negative-weight edges."""
    return _edge_subgraph(g, signed_partition(g).negative_edges)


def negative_cut_components(g: WeightedGraph) -> tuple[bool, tuple[int, ...]]:
    """Whether the negative edges contain a cut of the graph.

    Returns ``(cut_exists, cut_edges)``: ``cut_exists`` is true iff removing
    the negative edges increases the component count, and ``cut_edges`` lists
    the negative edges whose endpoints then lie in different components.
    """
    base_count, _ = connected_components(g)
    plus = positive_subgraph(g)
    plus_count, labels = connected_components(plus)
    if plus_count == base_count:
        return False, ()
    cut = tuple(
        k for k in signed_partition(g).negative_edges
        if labels[g.edges[k][0]] != labels[g.edges[k][1]]
    )
    return True, cut


def path_edge_set(g: WeightedGraph, u: int, v: int, max_edges: int = 20) -> set[int]:
    """Indices of all edges lying on at least one simple u-v path.

    Exhaustive simple-path enumeration; the graph must have at most
    ``max_edges`` edges (path unions on larger graphs need a cut/flow
    formulation this package does not implement).  Returns an empty set
    when u and v sit in different components.
    """
    if not (0 <= u < g.node_count) or not (0 <= v < g.node_count):
        raise GraphConstructionError(f"nodes ({u}, {v}) out of range for {g.node_count} nodes")
    if u == v:
        raise GraphConstructionError("path_edge_set endpoints must differ")
    if g.edge_count > max_edges:
        raise GraphConstructionError(
            f"path_edge_set supports at most max_edges={max_edges} edges, "
            f"graph has {g.edge_count}"
        )
    adj = _adjacency(g)
    result: set[int] = set()
    on_path: list[int] = []
    visited = [False] * g.node_count

    def explore(node: int) -> None:
        if node == v:
            result.update(on_path)
            return
        visited[node] = True
        for nbr, k in adj[node]:
            if not visited[nbr]:
                on_path.append(k)
                explore(nbr)
                on_path.pop()
        visited[node] = False

    explore(u)
    return result


def is_balanced(g: WeightedGraph) -> bool:
    """Whether the weight signs admit a consistent 2-coloring.

    A graph is sign-balanced when nodes can be colored with two colors such
    that positive edges join like colors and negative edges join opposite
    colors (equivalently, every cycle has an even number of negative edges).
    """
    adj = _adjacency(g)
    color = [-1] * g.node_count
    for root in range(g.node_count):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            node = queue.popleft()
            for nbr, k in adj[node]:
                want = color[node] if g.edges[k][2] > 0 else 1 - color[node]
                if color[nbr] < 0:
                    color[nbr] = want
                    queue.append(nbr)
                elif color[nbr] != want:
                    return False
    return True


def graph_from_dict(data: dict) -> WeightedGraph:
    """Build a graph from ``{"nodes": n, "edges": [{"u", "v", "w"}, ...]}``.

    Edge order in the list defines edge indices.
    """
    if not isinstance(data, dict):
        raise GraphFormatError(f"graph document must be an object, got {type(data).__name__}")
    for key in ("nodes", "edges"):
        if key not in data:
            raise GraphFormatError(f"graph document is missing the '{key}' field")
    nodes = data["nodes"]
    if isinstance(nodes, bool) or not isinstance(nodes, int):
        raise GraphFormatError(f"field 'nodes' must be an integer, got {nodes!r}")
    raw_edges = data["edges"]
    if not isinstance(raw_edges, list):
        raise GraphFormatError("field 'edges' must be a list of {u, v, w} objects")
    triples = []
    for k, item in enumerate(raw_edges):
        if not isinstance(item, dict):
            raise GraphFormatError(f"edges[{k}] must be an object with fields u, v, w")
        for field in ("u", "v", "w"):
            if field not in item:
                raise GraphFormatError(f"edges[{k}] is missing field '{field}'")
        u, v, w = item["u"], item["v"], item["w"]
        if isinstance(u, bool) or isinstance(v, bool) or not isinstance(u, int) or not isinstance(v, int):
            raise GraphFormatError(f"edges[{k}]: fields 'u' and 'v' must be integers")
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise GraphFormatError(f"edges[{k}]: field 'w' must be a number, got {w!r}")
        triples.append((u, v, float(w)))
    try:
        return build_graph(nodes, triples)
    except GraphConstructionError as exc:
        raise GraphFormatError(str(exc)) from exc


def graph_to_dict(g: WeightedGraph) -> dict:
    """Serialize to the ``{"nodes", "edges"}`` document form (round-trips)."""
    return {
        "nodes": g.node_count,
        "edges": [{"u": tail, "v": head, "w": w} for tail, head, w in g.edges],
    }


def load_graph(path) -> WeightedGraph:
    """Load a graph from a JSON file; errors carry line/field diagnostics."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    try:
        return graph_from_dict(data)
    except GraphFormatError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc


def save_graph(g: WeightedGraph, path) -> None:
    """Write the JSON document form with stable key order."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_dict(g), fh, indent=2, sort_keys=True)
        fh.write("\n")
