"""Cluster graphs over k-means centroids and their four-parameter index.

The graph links every centroid to its nearest other centroid; only topology
is kept (no edge lengths or angles). The index summarizes the graph by
vertex count, descending degree sequence, highest degree, and the number of
vertices per degree. Equal indexes do NOT imply isomorphic graphs (a 6-cycle
and two disjoint triangles share an index), so the index serves as a
database bucket key and the exact isomorphism test makes the call.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import NearTieWarning, SingletonGraph

TIE_GAP = 1e-9


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric Euclidean distances between cluster centroids."""

    values: np.ndarray  # (k, k)

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def k(self) -> int:
        return self.values.shape[0]


def dist_matrix(centroids) -> DistanceMatrix:
    """All pairwise centroid distances; exact zero diagonal, exact symmetry."""
    c = np.asarray(centroids, dtype=np.float64).reshape(-1, 2)
    dx = c[:, 0][:, None] - c[:, 0][None, :]
    dy = c[:, 1][:, None] - c[:, 1][None, :]
    return DistanceMatrix(values=np.sqrt(dx * dx + dy * dy))


@dataclass(frozen=True)
class MinutiaeGraph:
    """Undirected graph over centroid ids; topology only."""

    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]  # pairs stored as (low, high)

    def __post_init__(self):
        for a, b in self.edges:
            if a == b:
                raise ValueError("self-loops are not allowed")
            if a > b:
                raise ValueError("edges must be stored as (low, high)")

    def degree_map(self) -> dict[int, int]:
        deg = {v: 0 for v in self.vertices}
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj


def build_nn_graph(dm: DistanceMatrix) -> MinutiaeGraph:
    """Link each vertex to its nearest other vertex (ties -> smallest id).

    The edge set is the union over all vertices, so mutual nearest neighbors
    contribute a single edge and every vertex has degree >= 1. Warns when any
    vertex's two smallest distances are separated by less than 1e-9: such a
    near-tie can flip the chosen edge under rotation-and-translation noise.
    """
    k = dm.k
    if k < 2:
        raise SingletonGraph("nearest-neighbor graph needs at least 2 centroids")
    d = dm.values.copy()
    np.fill_diagonal(d, np.inf)
    nearest = np.argmin(d, axis=1)

    if k > 2:
        two_smallest = np.partition(d, 1, axis=1)[:, :2]
        min_gap = float(np.min(two_smallest[:, 1] - two_smallest[:, 0]))
        if min_gap < TIE_GAP:
            warnings.warn(
                f"nearest-neighbor gap {min_gap:.3e} below {TIE_GAP}; "
                "edge choice may not survive recapture noise",
                NearTieWarning,
                stacklevel=2,
            )

    edges = frozenset(
        (min(i, int(j)), max(i, int(j))) for i, j in enumerate(nearest)
    )
    return MinutiaeGraph(vertices=tuple(range(k)), edges=edges)


@dataclass(frozen=True)
class GraphIndex:
    """Four-parameter graph summary used as the enrollment bucket key."""

    vertex_count: int
    degree_sequence: tuple[int, ...]  # descending
    max_degree: int
    degree_multiplicity: dict[int, int] = field(compare=True, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "degree_sequence", tuple(self.degree_sequence))
        if tuple(sorted(self.degree_sequence, reverse=True)) != self.degree_sequence:
            raise ValueError("degree sequence must be sorted descending")
        if self.degree_sequence and self.max_degree != self.degree_sequence[0]:
            raise ValueError("max_degree must head the degree sequence")
        if sum(self.degree_multiplicity.values()) != self.vertex_count:
            raise ValueError("degree multiplicities must cover every vertex")


def compute_index(g: MinutiaeGraph) -> GraphIndex:
    degrees = sorted(g.degree_map().values(), reverse=True)
    return GraphIndex(
        vertex_count=len(g.vertices),
        degree_sequence=tuple(degrees),
        max_degree=degrees[0] if degrees else 0,
        degree_multiplicity=dict(Counter(degrees)),
    )


def index_string(idx: GraphIndex) -> str:
    """Canonical form ``V<n>|D<d1,d2,...>|H<max>|M<deg:cnt,...>``.

    Degrees descending, multiplicity keys ascending; byte-identical for equal
    indexes and injective over GraphIndex values.
    """
    degs = ",".join(str(d) for d in idx.degree_sequence)
    mult = ",".join(f"{d}:{c}" for d, c in sorted(idx.degree_multiplicity.items()))
    return f"V{idx.vertex_count}|D{degs}|H{idx.max_degree}|M{mult}"


def parse_index_string(s: str) -> GraphIndex:
    """Inverse of index_string."""
    try:
        v_part, d_part, h_part, m_part = s.split("|")
        if v_part[0] != "V" or d_part[0] != "D" or h_part[0] != "H" or m_part[0] != "M":
            raise ValueError
        count = int(v_part[1:])
        degrees = tuple(int(t) for t in d_part[1:].split(",")) if d_part[1:] else ()
        max_degree = int(h_part[1:])
        mult: dict[int, int] = {}
        for item in m_part[1:].split(","):
            d, c = item.split(":")
            mult[int(d)] = int(c)
    except (ValueError, IndexError) as exc:
        raise ValueError(f"not a canonical index string: {s!r}") from exc
    return GraphIndex(
        vertex_count=count,
        degree_sequence=degrees,
        max_degree=max_degree,
        degree_multiplicity=mult,
    )


def is_isomorphic(g1: MinutiaeGraph, g2: MinutiaeGraph) -> bool:
    """Exact isomorphism by backtracking over degree-compatible mappings.

    Rejects early on vertex count, edge count, or degree sequence mismatch.
    No heuristics beyond candidate pruning: feasible for the small graphs
    (k up to ~20) this pipeline produces.
    """
    n = len(g1.vertices)
    if n != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return False

    v1 = list(g1.vertices)
    v2 = list(g2.vertices)
    adj1 = g1.adjacency()
    adj2 = g2.adjacency()
    deg1 = {v: len(adj1[v]) for v in v1}
    deg2 = {v: len(adj2[v]) for v in v2}
    if sorted(deg1.values()) != sorted(deg2.values()):
        return False

    # Neighbor-degree signatures sharpen the candidate sets before search.
    sig1 = {v: (deg1[v], tuple(sorted(deg1[u] for u in adj1[v]))) for v in v1}
    sig2 = {v: (deg2[v], tuple(sorted(deg2[u] for u in adj2[v]))) for v in v2}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return False

    candidates = {u: [v for v in v2 if sig2[v] == sig1[u]] for u in v1}
    order = sorted(v1, key=lambda u: len(candidates[u]))
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(idx: int) -> bool:
        if idx == n:
            return True
        u = order[idx]
        for v in candidates[u]:
            if v in used:
                continue
            ok = True
            for w in adj1[u]:
                if w in mapping and mapping[w] not in adj2[v]:
                    ok = False
                    break
            if ok:
                mapped_neighbors = sum(1 for w in adj1[u] if w in mapping)
                back_neighbors = sum(1 for w in adj2[v] if w in used)
                if mapped_neighbors != back_neighbors:
                    ok = False
            if not ok:
                continue
            mapping[u] = v
            used.add(v)
            if extend(idx + 1):
                return True
            del mapping[u]
            used.remove(v)
        return False

    return extend(0)


def fingerprint_distance(g1: MinutiaeGraph, g2: MinutiaeGraph) -> int:
    """0 when the cluster graphs are isomorphic (equivalent prints), else 1."""
    return 0 if is_isomorphic(g1, g2) else 1
