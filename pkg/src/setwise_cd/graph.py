"""Undirected connected graphs with canonical edge indexing.

Edges are stored as pairs ``(i, j)`` with ``i < j``, sorted lexicographically;
the edge index is the position in that ordering. All incidence-based objects
(incidence matrix, neighbor sets, edge assignments) use this indexing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegreeTooLarge,
    DisconnectedGraph,
    DuplicateEdge,
    EigensolverFailure,
    MultipleZeroEigenvalues,
    NoMatchingAvailable,
    OddDegree,
    SelfLoop,
    TooManyEdges,
)

# relative threshold separating "zero" Laplacian eigenvalues from the rest
ZERO_EIGENVALUE_RTOL = 1e-9


@dataclass(frozen=True)
class Graph:
    """Connected undirected graph with canonically ordered edges."""

    n: int
    edges: tuple[tuple[int, int], ...]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_index(self, i: int, j: int) -> int:
        a, b = (i, j) if i < j else (j, i)
        return self.edges.index((a, b))

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Lower and upper endpoint arrays, one entry per edge."""
        u = np.fromiter((e[0] for e in self.edges), dtype=np.int32, count=len(self.edges))
        v = np.fromiter((e[1] for e in self.edges), dtype=np.int32, count=len(self.edges))
        return u, v


@dataclass(frozen=True)
class SetSystem:
    """Per-node sets of incident edge indices."""

    sets: tuple[tuple[int, ...], ...]
    degrees: tuple[int, ...]
    max_degree: int

    @property
    def n(self) -> int:
        return len(self.sets)

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR layout (indptr, indices) used by the simulation kernels."""
        indptr = np.zeros(len(self.sets) + 1, dtype=np.int32)
        for i, s in enumerate(self.sets):
            indptr[i + 1] = indptr[i] + len(s)
        indices = np.fromiter(
            (e for s in self.sets for e in s), dtype=np.int32, count=int(indptr[-1])
        )
        return indptr, indices


@dataclass(frozen=True)
class Assignment:
    """Ownership map giving every edge to exactly one of its endpoints.

    The owned sets partition the edge indices into per-node groups; the
    complement assignment gives every edge to the opposite endpoint.
    """

    graph: Graph
    owner: tuple[int, ...]
    _sets_prime: dict | None = field(default=None, repr=False, compare=False)

    def sets_prime(self) -> dict[int, tuple[int, ...]]:
        """Owned edge indices per node (nodes with no edges are absent)."""
        out: dict[int, list[int]] = {}
        for ell, node in enumerate(self.owner):
            out.setdefault(node, []).append(ell)
        return {i: tuple(v) for i, v in out.items()}

    def complement_sets(self) -> dict[int, tuple[int, ...]]:
        """The non-owned halves: incident edges each node does not own."""
        out: dict[int, list[int]] = {}
        for ell, (i, j) in enumerate(self.graph.edges):
            other = j if self.owner[ell] == i else i
            out.setdefault(other, []).append(ell)
        return {i: tuple(v) for i, v in out.items()}

    def complement(self) -> "Assignment":
        flipped = tuple(
            j if o == i else i for o, (i, j) in zip(self.owner, self.graph.edges)
        )
        return Assignment(self.graph, flipped)


def build_graph(n: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    """Validate and canonicalize an edge list into a :class:`Graph`.

    Raises :class:`SelfLoop`, :class:`DuplicateEdge` or
    :class:`DisconnectedGraph` when the input is not a simple connected graph.
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    canon = []
    for pair in edge_list:
        i, j = int(pair[0]), int(pair[1])
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i},{j}) out of range for n={n}")
        if i == j:
            raise SelfLoop(f"self-loop at node {i}")
        canon.append((min(i, j), max(i, j)))
    edges = tuple(sorted(canon))
    for a, b in zip(edges, edges[1:]):
        if a == b:
            raise DuplicateEdge(f"duplicate edge {a}")
    _check_connected(n, edges)
    return Graph(n=n, edges=edges)


def _check_connected(n: int, edges: Sequence[tuple[int, int]]) -> None:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    roots = {find(i) for i in range(n)}
    if len(roots) != 1:
        raise DisconnectedGraph(f"graph has {len(roots)} components")


def circulant_regular(n: int, degree: int) -> Graph:
    """Regular graph on ``n`` nodes: node ``i`` adjacent to ``i +- 1 .. i +- degree/2`` mod n."""
    if degree % 2 != 0:
        raise OddDegree(f"degree must be even, got {degree}")
    if degree < 2:
        raise ValueError(f"degree must be >= 2, got {degree}")
    if degree > n - 1:
        raise DegreeTooLarge(f"degree {degree} exceeds n-1={n - 1}")
    edges = set()
    for i in range(n):
        for k in range(1, degree // 2 + 1):
            j = (i + k) % n
            edges.add((min(i, j), max(i, j)))
    return build_graph(n, sorted(edges))


def incidence_matrix(g: Graph) -> np.ndarray:
    """Node-by-edge matrix with +1 at the lower endpoint and -1 at the upper."""
    a = np.zeros((g.n, g.num_edges))
    for ell, (i, j) in enumerate(g.edges):
        a[i, ell] = 1.0
        a[j, ell] = -1.0
    return a


def laplacian_matrix(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian built directly as degree minus adjacency."""
    lap = np.zeros((g.n, g.n))
    for i, j in g.edges:
        lap[i, i] += 1.0
        lap[j, j] += 1.0
        lap[i, j] -= 1.0
        lap[j, i] -= 1.0
    return lap


def laplacian_extremes(g: Graph) -> tuple[float, float]:
    """Smallest strictly positive and largest Laplacian eigenvalues.

    The zero threshold is relative (``ZERO_EIGENVALUE_RTOL * max eigenvalue``)
    so it survives rescaling. Exactly one eigenvalue must fall below it;
    more indicates disconnection or numerical breakdown.
    """
    a = incidence_matrix(g)
    try:
        vals = np.linalg.eigvalsh(a @ a.T)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - hard to trigger
        raise EigensolverFailure(str(exc)) from exc
    gamma_max = float(vals[-1])
    tol = ZERO_EIGENVALUE_RTOL * gamma_max
    n_zero = int(np.sum(vals < tol))
    if n_zero != 1:
        raise MultipleZeroEigenvalues(
            f"{n_zero} eigenvalues below {tol:.3e}; expected exactly 1"
        )
    gamma_min_plus = float(vals[1])
    return gamma_min_plus, gamma_max


def neighbor_sets(g: Graph) -> SetSystem:
    """Incident edge indices per node, sorted ascending."""
    sets: list[list[int]] = [[] for _ in range(g.n)]
    for ell, (i, j) in enumerate(g.edges):
        sets[i].append(ell)
        sets[j].append(ell)
    degrees = tuple(len(s) for s in sets)
    return SetSystem(
        sets=tuple(tuple(s) for s in sets),
        degrees=degrees,
        max_degree=max(degrees),
    )


def enumerate_assignments(g: Graph, max_edges: int = 16) -> list[Assignment]:
    """All ``2^E`` edge-ownership maps.

    Bit ``ell`` of the enumeration mask selects the owner of edge ``ell``:
    0 for the lower endpoint, 1 for the upper. The complement of assignment
    ``mask`` is assignment ``~mask``.
    """
    e = g.num_edges
    if e > max_edges:
        raise TooManyEdges(f"E={e} exceeds brute-force cap {max_edges}")
    out = []
    for mask in range(1 << e):
        owner = tuple(
            (j if (mask >> ell) & 1 else i) for ell, (i, j) in enumerate(g.edges)
        )
        out.append(Assignment(g, owner))
    return out


def perfect_matching_circulant(g: Graph) -> tuple[int, ...]:
    """Edge indices of the matching ``{(2k, 2k+1)}`` when present.

    Requires even ``n`` and all offset-1 pairs ``(2k, 2k+1)`` to be edges of
    ``g`` (true for any circulant_regular graph with even n).
    """
    if g.n % 2 != 0:
        raise NoMatchingAvailable(f"odd node count {g.n}")
    index = {e: ell for ell, e in enumerate(g.edges)}
    matched = []
    for k in range(g.n // 2):
        pair = (2 * k, 2 * k + 1)
        if pair not in index:
            raise NoMatchingAvailable(f"missing offset-1 edge {pair}")
        matched.append(index[pair])
    return tuple(matched)


# -- JSON round trip -------------------------------------------------------

def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [[i, j] for i, j in g.edges]}


def graph_from_json(obj: dict) -> Graph:
    return build_graph(int(obj["n"]), obj["edges"])


def save_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_json(g), sort_keys=True) + "\n")


def load_graph(path: str | Path) -> Graph:
    return graph_from_json(json.loads(Path(path).read_text()))
