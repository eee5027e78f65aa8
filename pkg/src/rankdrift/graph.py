"""Temporal layer representation, descriptive statistics, and subnetwork expansion.

A temporal layer is one directed, weighted snapshot of the network for a
single time interval. All layers of a run share the same universal node set
so that rank positions are comparable across intervals; nodes without
activity in an interval are singletons in that layer.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "TemporalLayer",
    "GraphStats",
    "SubnetworkLayer",
    "build_universe",
    "layer_from_edges",
    "layer_stats",
    "expand_subnetwork",
    "write_layers_csv",
    "read_layers_csv",
    "write_stats_csv",
]


def build_universe(ids: Iterable[str]) -> tuple[tuple[str, ...], dict[str, int]]:
    """Sorted universal node set plus its id -> dense index mapping."""
    nodes = tuple(sorted(set(ids)))
    return nodes, {node: i for i, node in enumerate(nodes)}


class TemporalLayer:
    """Directed weighted graph snapshot for one interval.

    Edges are pre-merged: at most one (src, dst) pair, each with weight > 0.
    Instances are immutable by convention and safe to share across threads;
    adjacency views are built lazily and cached.
    """

    def __init__(
        self,
        interval: str,
        nodes: tuple[str, ...],
        index: Mapping[str, int],
        src: np.ndarray,
        dst: np.ndarray,
        weight: np.ndarray,
        validate: bool = True,
    ):
        self.interval = interval
        self.nodes = nodes
        self.index = index
        self.src = np.ascontiguousarray(src, dtype=np.int64)
        self.dst = np.ascontiguousarray(dst, dtype=np.int64)
        self.weight = np.ascontiguousarray(weight, dtype=np.float64)
        if validate:
            self._validate()

    def _validate(self) -> None:
        n = len(self.nodes)
        if not (len(self.src) == len(self.dst) == len(self.weight)):
            raise ValueError("edge arrays must have equal length")
        if len(self.src) and (self.src.min() < 0 or self.src.max() >= n):
            raise ValueError("edge source index out of range")
        if len(self.dst) and (self.dst.min() < 0 or self.dst.max() >= n):
            raise ValueError("edge target index out of range")
        if np.any(self.weight <= 0) or not np.all(np.isfinite(self.weight)):
            raise ValueError("edge weights must be finite and positive")
        key = self.src * n + self.dst
        if len(np.unique(key)) != len(key):
            raise ValueError("duplicate (src, dst) edges; merge them first")

    # -- basic shape ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    def __repr__(self) -> str:  # pragma: no cover
        return f"TemporalLayer({self.interval!r}, n={self.n}, m={self.edge_count})"

    # -- adjacency views -----------------------------------------------------

    @cached_property
    def _out(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return _csr(self.src, self.dst, self.weight, self.n)

    @cached_property
    def _in(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return _csr(self.dst, self.src, self.weight, self.n)

    def out_edges(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        indptr, nbrs, w = self._out
        return nbrs[indptr[i] : indptr[i + 1]], w[indptr[i] : indptr[i + 1]]

    def in_edges(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        indptr, nbrs, w = self._in
        return nbrs[indptr[i] : indptr[i + 1]], w[indptr[i] : indptr[i + 1]]

    # -- degree / strength arrays --------------------------------------------

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n).astype(np.int64)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n).astype(np.int64)

    @cached_property
    def degree(self) -> np.ndarray:
        """Distinct-neighbor count (union of predecessors and successors)."""
        if self.edge_count == 0:
            return np.zeros(self.n, dtype=np.int64)
        a = np.concatenate([self.src, self.dst])
        b = np.concatenate([self.dst, self.src])
        uniq = np.unique(a * self.n + b)
        return np.bincount((uniq // self.n).astype(np.intp), minlength=self.n)

    @cached_property
    def out_strength(self) -> np.ndarray:
        return np.bincount(self.src, weights=self.weight, minlength=self.n)

    @cached_property
    def in_strength(self) -> np.ndarray:
        return np.bincount(self.dst, weights=self.weight, minlength=self.n)

    @cached_property
    def strength(self) -> np.ndarray:
        return self.in_strength + self.out_strength

    # -- undirected projection (for path/clustering statistics) ---------------

    @cached_property
    def _undirected(self) -> tuple[np.ndarray, np.ndarray]:
        """Symmetric CSR (indptr, neighbors) of the simple undirected projection.

        Self-loops are dropped; parallel directions collapse to one edge.
        """
        lo = np.minimum(self.src, self.dst)
        hi = np.maximum(self.src, self.dst)
        keep = lo != hi
        key = np.unique(lo[keep] * self.n + hi[keep])
        u = key // self.n
        v = key % self.n
        heads = np.concatenate([u, v])
        tails = np.concatenate([v, u])
        indptr, nbrs, _ = _csr(heads, tails, np.ones(len(heads)), self.n)
        return indptr, nbrs


def _csr(heads: np.ndarray, tails: np.ndarray, weights: np.ndarray, n: int):
    order = np.argsort(heads, kind="stable")
    counts = np.bincount(heads, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, tails[order], weights[order]


def layer_from_edges(
    interval: str,
    edges: Iterable[tuple[str, str, float]],
    nodes: Iterable[str] | None = None,
) -> TemporalLayer:
    """Build a layer from (src_id, dst_id, weight) triples.

    Parallel edges are merged by summing weights. When `nodes` is given it
    becomes the declared node set (must cover all endpoints), which is how
    singletons are represented.
    """
    edges = list(edges)
    ids = set(nodes) if nodes is not None else set()
    for s, d, _ in edges:
        ids.add(s)
        ids.add(d)
    universe, index = build_universe(ids)
    merged: dict[tuple[int, int], float] = {}
    for s, d, w in edges:
        key = (index[s], index[d])
        merged[key] = merged.get(key, 0.0) + float(w)
    items = sorted(merged.items())
    src = np.array([k[0] for k, _ in items], dtype=np.int64)
    dst = np.array([k[1] for k, _ in items], dtype=np.int64)
    weight = np.array([w for _, w in items], dtype=np.float64)
    return TemporalLayer(interval, universe, index, src, dst, weight)


# ---------------------------------------------------------------------------
# descriptive statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphStats:
    interval: str
    nodes: int
    edges: int
    density: float
    avg_degree: float
    avg_strength: float
    avg_clustering: float
    diameter: int
    avg_path_length: float


def bfs_distances(indptr: np.ndarray, nbrs: np.ndarray, source: int, n: int) -> np.ndarray:
    """Unweighted hop distances from `source`; unreached nodes get -1."""
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
        flat = np.repeat(starts - offsets, counts) + np.arange(total)
        cand = nbrs[flat]
        cand = cand[dist[cand] < 0]
        if cand.size == 0:
            break
        frontier = np.unique(cand)
        d += 1
        dist[frontier] = d
    return dist


def _weak_components(layer: TemporalLayer) -> np.ndarray:
    indptr, nbrs = layer._undirected
    comp = np.full(layer.n, -1, dtype=np.int64)
    label = 0
    for start in range(layer.n):
        if comp[start] >= 0:
            continue
        comp[start] = label
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in nbrs[indptr[v] : indptr[v + 1]]:
                if comp[u] < 0:
                    comp[u] = label
                    queue.append(int(u))
        label += 1
    return comp


def _avg_local_clustering(layer: TemporalLayer) -> float:
    """Average local clustering coefficient of the undirected projection.

    Nodes with degree < 2 contribute 0; the average runs over the full
    declared node set including singletons.
    """
    indptr, nbrs = layer._undirected
    n = layer.n
    if n == 0:
        return 0.0
    mark = np.zeros(n, dtype=bool)
    total = 0.0
    for i in range(n):
        neigh = nbrs[indptr[i] : indptr[i + 1]]
        d = len(neigh)
        if d < 2:
            continue
        mark[neigh] = True
        links = 0
        for u in neigh:
            links += int(mark[nbrs[indptr[u] : indptr[u + 1]]].sum())
        mark[neigh] = False
        total += links / (d * (d - 1))  # links counts each pair twice
    return total / n


def layer_stats(layer: TemporalLayer) -> GraphStats:
    """Edge count, density, mean degree/strength, clustering, and path metrics.

    Density uses the directed convention m / (n * (n - 1)) over the declared
    node set. Diameter and average path length are computed with unweighted
    hops on the undirected projection of the largest weakly-connected
    component; a trivial component yields 0 for both.
    """
    n = layer.n
    if n < 2:
        raise ValueError("layer statistics need at least 2 nodes")
    m = layer.edge_count
    density = m / (n * (n - 1))
    avg_degree = 2.0 * m / n
    avg_strength = float(layer.strength.mean())
    clustering = _avg_local_clustering(layer)

    comp = _weak_components(layer)
    sizes = np.bincount(comp)
    largest = int(sizes.argmax())
    members = np.flatnonzero(comp == largest)
    diameter = 0
    apl = 0.0
    if len(members) >= 2:
        indptr, nbrs = layer._undirected
        pair_sum = 0
        for s in members:
            dist = bfs_distances(indptr, nbrs, int(s), n)
            reached = dist[members]
            pair_sum += int(reached[reached > 0].sum())
            diameter = max(diameter, int(reached.max()))
        apl = pair_sum / (len(members) * (len(members) - 1))
    return GraphStats(
        interval=layer.interval,
        nodes=n,
        edges=m,
        density=density,
        avg_degree=avg_degree,
        avg_strength=avg_strength,
        avg_clustering=clustering,
        diameter=diameter,
        avg_path_length=apl,
    )


# ---------------------------------------------------------------------------
# subnetwork expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubnetworkLayer:
    """Expanded neighborhood of a seed group with a ring index per node.

    Ring 0 is the seed group, ring 1 the nodes reached by following edges
    incident to the seeds, ring 2 the nodes reached from ring 1.
    """

    layer: TemporalLayer
    rings: dict[str, int]


def expand_subnetwork(
    layers: Sequence[TemporalLayer], seeds: Iterable[str]
) -> list[SubnetworkLayer]:
    """Two-ring expansion of a seed node group, independently per layer.

    Five construction steps: take the seeds and their internal edges; follow
    every edge incident to a seed to collect ring-1 nodes; add the edges among
    ring-1 nodes; follow every edge incident to ring 1 to collect ring-2
    nodes. Edges among ring-2 nodes are not included.
    """
    seed_ids = sorted(set(seeds))
    if not seed_ids:
        raise ValueError("seed node group is empty")
    out: list[SubnetworkLayer] = []
    for layer in layers:
        missing = [s for s in seed_ids if s not in layer.index]
        if missing:
            raise KeyError(f"seed nodes not in layer node set: {missing[:5]}")
        seed_idx = np.array([layer.index[s] for s in seed_ids], dtype=np.int64)
        in_seed = np.zeros(layer.n, dtype=bool)
        in_seed[seed_idx] = True

        src, dst = layer.src, layer.dst
        touches_seed = in_seed[src] | in_seed[dst]
        ring1_mask = np.zeros(layer.n, dtype=bool)
        ring1_mask[src[touches_seed]] = True
        ring1_mask[dst[touches_seed]] = True
        ring1_mask &= ~in_seed

        known = in_seed | ring1_mask
        touches_ring1 = ring1_mask[src] | ring1_mask[dst]
        ring2_mask = np.zeros(layer.n, dtype=bool)
        ring2_mask[src[touches_ring1]] = True
        ring2_mask[dst[touches_ring1]] = True
        ring2_mask &= ~known

        keep_edges = touches_seed | (ring1_mask[src] & ring1_mask[dst]) | touches_ring1
        rings: dict[str, int] = {}
        for i in np.flatnonzero(in_seed):
            rings[layer.nodes[i]] = 0
        for i in np.flatnonzero(ring1_mask):
            rings[layer.nodes[i]] = 1
        for i in np.flatnonzero(ring2_mask):
            rings[layer.nodes[i]] = 2

        sub = layer_from_edges(
            layer.interval,
            [
                (layer.nodes[s], layer.nodes[d], w)
                for s, d, w in zip(
                    src[keep_edges], dst[keep_edges], layer.weight[keep_edges]
                )
            ],
            nodes=rings.keys(),
        )
        out.append(SubnetworkLayer(layer=sub, rings=rings))
    return out


# ---------------------------------------------------------------------------
# CSV interfaces
# ---------------------------------------------------------------------------


def write_layers_csv(layers: Sequence[TemporalLayer], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["interval", "src", "dst", "weight"])
        for layer in layers:
            for s, d, w in zip(layer.src, layer.dst, layer.weight):
                writer.writerow([layer.interval, layer.nodes[s], layer.nodes[d], repr(float(w))])


def read_layers_csv(path: str | Path) -> list[TemporalLayer]:
    """Read layers from interval,src,dst,weight rows.

    The universal node set is the union of endpoints in the file, so nodes
    that are singletons in every interval cannot round-trip through this
    format.
    """
    by_interval: dict[str, list[tuple[str, str, float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"empty layer file: {path}")
        for row in reader:
            if not row:
                continue
            interval, s, d, w = row[0], row[1], row[2], float(row[3])
            by_interval.setdefault(interval, []).append((s, d, w))
    ids: set[str] = set()
    for edges in by_interval.values():
        for s, d, _ in edges:
            ids.add(s)
            ids.add(d)
    return [
        layer_from_edges(interval, edges, nodes=ids)
        for interval, edges in by_interval.items()
    ]


def write_stats_csv(stats: Sequence[GraphStats], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "interval",
                "nodes",
                "edges",
                "density",
                "avg_degree",
                "avg_strength",
                "avg_clustering",
                "diameter",
                "avg_path_length",
            ]
        )
        for s in stats:
            writer.writerow(
                [
                    s.interval,
                    s.nodes,
                    s.edges,
                    repr(s.density),
                    repr(s.avg_degree),
                    repr(s.avg_strength),
                    repr(s.avg_clustering),
                    s.diameter,
                    repr(s.avg_path_length),
                ]
            )
