"""Node centrality measures on a single temporal layer.

All measures return per-node score vectors aligned with the layer's node
set. Degree and strength variants are exact counts/sums; closeness and
betweenness run unweighted breadth-first searches over directed edges;
pagerank and the hub/authority pair are damped/normalized power iterations
over the sparse edge list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .graph import TemporalLayer, bfs_distances

__all__ = [
    "METRICS",
    "CentralityVector",
    "CentralityParams",
    "ConvergenceError",
    "degree_centralities",
    "strength_centralities",
    "closeness",
    "betweenness",
    "pagerank",
    "hits",
    "compute_metrics",
    "write_centralities_csv",
]

METRICS = (
    "indegree",
    "outdegree",
    "degree",
    "instrength",
    "outstrength",
    "strength",
    "closeness",
    "harmonic-closeness",
    "betweenness",
    "pagerank",
    "hub",
    "authority",
)


class ConvergenceError(RuntimeError):
    """Iteration cap reached before the tolerance; carries the last iterate."""

    def __init__(self, metric: str, residual: float, iterations: int, last: np.ndarray):
        super().__init__(
            f"{metric} did not converge within {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.metric = metric
        self.residual = residual
        self.iterations = iterations
        self.last = last


@dataclass(frozen=True)
class CentralityVector:
    """Per-node scores for one metric on one layer."""

    metric: str
    interval: str
    nodes: tuple[str, ...]
    scores: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric tag: {self.metric!r}")
        scores = np.ascontiguousarray(self.scores, dtype=np.float64)
        object.__setattr__(self, "scores", scores)
        if len(scores) != len(self.nodes):
            raise ValueError("score length must match node count")
        if len(scores) and (not np.all(np.isfinite(scores)) or scores.min() < 0):
            raise ValueError(f"{self.metric}: scores must be finite and non-negative")

    def score_of(self, node: str) -> float:
        return float(self.scores[self.nodes.index(node)])


@dataclass(frozen=True)
class CentralityParams:
    pagerank_alpha: float = 0.85
    pagerank_tol: float = 1e-10
    pagerank_max_iter: int = 200
    pagerank_weighted: bool = True
    hits_tol: float = 1e-12
    hits_max_iter: int = 1000
    strength_normalized: bool = False


# ---------------------------------------------------------------------------
# counting measures
# ---------------------------------------------------------------------------


def degree_centralities(layer: TemporalLayer):
    """Indegree, outdegree, and total-degree centralities, each k/n."""
    n = layer.n
    if n < 1:
        raise ValueError("layer has no nodes")
    mk = lambda tag, counts: CentralityVector(tag, layer.interval, layer.nodes, counts / n)
    return (
        mk("indegree", layer.in_degree),
        mk("outdegree", layer.out_degree),
        mk("degree", layer.degree),
    )


def strength_centralities(layer: TemporalLayer, normalized: bool = False):
    """Instrength, outstrength, and total strength (incoming + outgoing).

    With `normalized` the sums are divided by the layer's total edge weight.
    """
    scale = layer.total_weight if (normalized and layer.total_weight > 0) else 1.0
    params = {"normalized": normalized}
    mk = lambda tag, s: CentralityVector(tag, layer.interval, layer.nodes, s / scale, params)
    return (
        mk("instrength", layer.in_strength),
        mk("outstrength", layer.out_strength),
        mk("strength", layer.strength),
    )


# ---------------------------------------------------------------------------
# shortest-path measures
# ---------------------------------------------------------------------------


def closeness(layer: TemporalLayer, harmonic: bool = False) -> CentralityVector:
    """Closeness over outgoing unweighted distances.

    The classic form averages distances within each node's reachable set and
    scales by (reachable - 1)/(n - 1) so disconnected layers stay comparable;
    the harmonic form sums reciprocal distances with 1/inf = 0 and is the
    variant that needs no adjustment on disconnected layers.
    """
    n = layer.n
    if n < 2:
        raise ValueError("closeness needs at least 2 nodes")
    indptr, nbrs, _ = layer._out
    scores = np.zeros(n, dtype=np.float64)
    for i in range(n):
        dist = bfs_distances(indptr, nbrs, i, n)
        reached = dist > 0
        if harmonic:
            scores[i] = float((1.0 / dist[reached]).sum())
        else:
            r = int(reached.sum())
            total = int(dist[reached].sum())
            if r and total:
                scores[i] = (r / (n - 1)) * (r / total)
    tag = "harmonic-closeness" if harmonic else "closeness"
    return CentralityVector(tag, layer.interval, layer.nodes, scores)


def betweenness(layer: TemporalLayer) -> CentralityVector:
    """Shortest-path betweenness (directed, unweighted, raw sums).

    Single-source accumulation over breadth-first shortest-path DAGs;
    endpoints are excluded and scores are not normalized.
    """
    n = layer.n
    indptr, nbrs, _ = layer._out
    adj = [nbrs[indptr[i] : indptr[i + 1]].tolist() for i in range(n)]
    bc = np.zeros(n, dtype=np.float64)
    for s in range(n):
        if not adj[s]:
            continue
        stack: list[int] = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0.0] * n
        dist = [-1] * n
        sigma[s] = 1.0
        dist[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            stack.append(v)
            dv = dist[v]
            sv = sigma[v]
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sv
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(stack):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    return CentralityVector("betweenness", layer.interval, layer.nodes, bc)


# ---------------------------------------------------------------------------
# spectral measures
# ---------------------------------------------------------------------------


def pagerank(
    layer: TemporalLayer,
    alpha: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 200,
    weighted: bool = False,
) -> CentralityVector:
    """Damped random-walk scores by power iteration.

    The transition from j splits j's score uniformly over its successors, or
    proportionally to edge weights in weighted mode. Nodes without outgoing
    edges spread their score uniformly over the whole node set. Iteration
    stops when the L1 change drops below `tol`, else raises ConvergenceError.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    n = layer.n
    if n < 1:
        raise ValueError("layer has no nodes")
    src, dst = layer.src, layer.dst
    if weighted:
        trans = layer.weight / layer.out_strength[src]
    else:
        trans = 1.0 / layer.out_degree[src]
    dangling = layer.out_degree == 0

    pr = np.full(n, 1.0 / n)
    base = (1.0 - alpha) / n
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        spread = np.bincount(dst, weights=pr[src] * trans, minlength=n)
        new = alpha * (spread + pr[dangling].sum() / n) + base
        residual = float(np.abs(new - pr).sum())
        pr = new
        if residual < tol:
            params = {
                "alpha": alpha,
                "tol": tol,
                "max_iter": max_iter,
                "weighted": weighted,
                "iterations": iteration,
            }
            return CentralityVector("pagerank", layer.interval, layer.nodes, pr, params)
    raise ConvergenceError("pagerank", residual, max_iter, pr)


def hits(
    layer: TemporalLayer, tol: float = 1e-12, max_iter: int = 1000
) -> tuple[CentralityVector, CentralityVector]:
    """Hub and authority scores via the alternating weighted recursion.

    authority <- incoming weighted hub mass, hub <- outgoing weighted
    authority mass, each renormalized to unit Euclidean norm; stops when the
    max-norm change of both vectors drops below `tol`.
    """
    n = layer.n
    if layer.edge_count == 0:
        raise ValueError("hub/authority scores need at least one edge")
    src, dst, w = layer.src, layer.dst, layer.weight
    h = np.full(n, 1.0 / np.sqrt(n))
    a = np.zeros(n)
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        a_new = np.bincount(dst, weights=h[src] * w, minlength=n)
        norm = np.sqrt((a_new * a_new).sum())
        if norm == 0:
            raise ConvergenceError("authority", np.inf, iteration, a_new)
        a_new /= norm
        h_new = np.bincount(src, weights=a_new[dst] * w, minlength=n)
        norm = np.sqrt((h_new * h_new).sum())
        if norm == 0:
            raise ConvergenceError("hub", np.inf, iteration, h_new)
        h_new /= norm
        residual = max(
            float(np.abs(a_new - a).max()), float(np.abs(h_new - h).max())
        )
        a, h = a_new, h_new
        if residual < tol:
            params = {"tol": tol, "max_iter": max_iter, "iterations": iteration}
            return (
                CentralityVector("hub", layer.interval, layer.nodes, h, params),
                CentralityVector("authority", layer.interval, layer.nodes, a, params),
            )
    raise ConvergenceError("hits", residual, max_iter, a)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def compute_metrics(
    layer: TemporalLayer,
    metrics: Iterable[str],
    params: CentralityParams | None = None,
) -> dict[str, CentralityVector]:
    """Compute the requested metric tags, sharing work between grouped ones."""
    params = params or CentralityParams()
    wanted = list(metrics)
    unknown = [m for m in wanted if m not in METRICS]
    if unknown:
        raise ValueError(f"unknown metric tags: {unknown}")
    out: dict[str, CentralityVector] = {}
    degree_tags = {"indegree", "outdegree", "degree"}
    strength_tags = {"instrength", "outstrength", "strength"}
    if degree_tags & set(wanted):
        for cv in degree_centralities(layer):
            out[cv.metric] = cv
    if strength_tags & set(wanted):
        for cv in strength_centralities(layer, normalized=params.strength_normalized):
            out[cv.metric] = cv
    if "closeness" in wanted:
        out["closeness"] = closeness(layer, harmonic=False)
    if "harmonic-closeness" in wanted:
        out["harmonic-closeness"] = closeness(layer, harmonic=True)
    if "betweenness" in wanted:
        out["betweenness"] = betweenness(layer)
    if "pagerank" in wanted:
        out["pagerank"] = pagerank(
            layer,
            alpha=params.pagerank_alpha,
            tol=params.pagerank_tol,
            max_iter=params.pagerank_max_iter,
            weighted=params.pagerank_weighted,
        )
    if {"hub", "authority"} & set(wanted):
        hub, authority = hits(layer, tol=params.hits_tol, max_iter=params.hits_max_iter)
        out["hub"] = hub
        out["authority"] = authority
    return {m: out[m] for m in wanted}


def write_centralities_csv(vectors: Iterable[CentralityVector], path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "metric", "score", "interval"])
        for cv in vectors:
            for node, score in zip(cv.nodes, cv.scores):
                writer.writerow([node, cv.metric, repr(float(score)), cv.interval])
