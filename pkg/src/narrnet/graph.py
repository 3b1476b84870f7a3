"""Weighted undirected character graphs and the network metrics computed on them."""
from __future__ import annotations

import io
import math
from collections import deque
from types import MappingProxyType
from typing import Hashable, Iterable, Iterator, Mapping, TextIO

import numpy as np

Node = Hashable
Pair = tuple

UNDEFINED = math.nan

EIGEN_TOL = 1e-10
EIGEN_MAX_ITER = 100_000
EIGEN_RESIDUAL = 1e-9


class GraphError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


def pair(a: Node, b: Node) -> Pair:
    """Order-normalized key for the unordered pair {a, b}."""
    if a == b:
        raise GraphError(f"self-pair {a!r} is not allowed")
    return (a, b) if a < b else (b, a)


class WeightedGraph:
    """Undirected, loop-free graph with positive integer edge weights.

    A pair with weight 0 is simply absent. Instances are immutable.
    """

    __slots__ = ("_nodes", "_weights", "_adj")

    def __init__(self, nodes: Iterable[Node] = (), weights: Mapping[Pair, int] | None = None):
        node_set = set(nodes)
        clean: dict[Pair, int] = {}
        for (a, b), w in (weights or {}).items():
            w = int(w)
            if w < 0:
                raise GraphError(f"negative weight {w} on {a!r}-{b!r}")
            if w == 0:
                continue
            key = pair(a, b)
            clean[key] = clean.get(key, 0) + w
            node_set.add(a)
            node_set.add(b)
        adj: dict[Node, dict[Node, int]] = {v: {} for v in node_set}
        for (a, b), w in clean.items():
            adj[a][b] = w
            adj[b][a] = w
        self._nodes = frozenset(node_set)
        self._weights = MappingProxyType(dict(sorted(clean.items())))
        self._adj = MappingProxyType({v: MappingProxyType(nb) for v, nb in adj.items()})

    @classmethod
    def from_interactions(cls, interactions: Iterable[tuple[Node, Node]], nodes: Iterable[Node] = ()):
        """Count each (a, b) occurrence as one unit of weight on {a, b}."""
        counts: dict[Pair, int] = {}
        for a, b in interactions:
            key = pair(a, b)
            counts[key] = counts.get(key, 0) + 1
        return cls(nodes, counts)

    @property
    def nodes(self) -> frozenset:
        return self._nodes

    @property
    def weights(self) -> Mapping[Pair, int]:
        return self._weights

    def weight(self, a: Node, b: Node) -> int:
        if a == b:
            return 0
        return self._weights.get(pair(a, b), 0)

    def neighbors(self, v: Node) -> Mapping[Node, int]:
        return self._adj[v]

    def edges(self) -> Iterator[tuple[Node, Node, int]]:
        for (a, b), w in self._weights.items():
            yield a, b, w

    def sorted_nodes(self) -> list:
        return sorted(self._nodes)

    def subgraph(self, keep: Iterable[Node]) -> "WeightedGraph":
        keep = set(keep) & self._nodes
        return WeightedGraph(keep, {k: w for k, w in self._weights.items() if k[0] in keep and k[1] in keep})

    def adjacency(self, order: list | None = None, weighted: bool = True) -> np.ndarray:
        order = self.sorted_nodes() if order is None else order
        index = {v: i for i, v in enumerate(order)}
        a = np.zeros((len(order), len(order)))
        for (u, v), w in self._weights.items():
            i, j = index[u], index[v]
            a[i, j] = a[j, i] = w if weighted else 1.0
        return a

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self._nodes == other._nodes and dict(self._weights) == dict(other._weights)

    def __hash__(self) -> int:
        return hash((self._nodes, frozenset(self._weights.items())))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={len(self._nodes)}, edges={len(self._weights)}, weight={total_edge_weight(self)})"


# ---------------------------------------------------------------- global metrics

def size(g: WeightedGraph) -> int:
    return len(g.nodes)


def total_edge_weight(g: WeightedGraph) -> int:
    return sum(g.weights.values())


def density(g: WeightedGraph) -> float:
    n = len(g.nodes)
    if n < 2:
        raise GraphError("density is undefined for graphs with fewer than 2 nodes")
    return len(g.weights) / (n * (n - 1) / 2)


def _triangles_and_triples(g: WeightedGraph, v: Node) -> tuple[int, int]:
    nbrs = list(g.neighbors(v))
    k = len(nbrs)
    closed = 0
    for i in range(k):
        ni = g.neighbors(nbrs[i])
        for j in range(i + 1, k):
            if nbrs[j] in ni:
                closed += 1
    return closed, k * (k - 1) // 2


def global_clustering(g: WeightedGraph) -> float:
    """3 x triangles / connected triples, topology only; NaN without any triple."""
    closed = triples = 0
    for v in g.nodes:
        c, t = _triangles_and_triples(g, v)
        closed += c
        triples += t
    # every triangle is closed once at each of its three corners
    if triples == 0:
        return UNDEFINED
    return closed / triples


# ---------------------------------------------------------------- character metrics

def weighted_degree(g: WeightedGraph) -> dict:
    return {v: sum(g.neighbors(v).values()) for v in g.sorted_nodes()}


def local_clustering(g: WeightedGraph) -> dict:
    out = {}
    for v in g.sorted_nodes():
        closed, triples = _triangles_and_triples(g, v)
        out[v] = closed / triples if triples else 0.0
    return out


def _bfs(g: WeightedGraph, s: Node):
    """Hop distances, geodesic counts and visit order from s."""
    dist = {s: 0}
    sigma = {s: 1}
    preds: dict[Node, list] = {s: []}
    order = []
    queue = deque([s])
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in g.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                sigma[w] = 0
                preds[w] = []
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return dist, sigma, preds, order


def betweenness(g: WeightedGraph) -> dict:
    """Unnormalized shortest-path betweenness over unordered pairs (Brandes)."""
    bc = dict.fromkeys(g.sorted_nodes(), 0.0)
    for s in g.nodes:
        _, sigma, preds, order = _bfs(g, s)
        delta = dict.fromkeys(order, 0.0)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    # each unordered pair was accumulated from both endpoints
    return {v: b / 2.0 for v, b in bc.items()}


def closeness(g: WeightedGraph) -> dict:
    """Inverse mean hop distance, taken within each node's own component.

    The component size counts the node itself, so an isolated node has a
    distance sum of 0 and gets closeness 0.
    """
    out = {}
    for v in g.sorted_nodes():
        dist = _bfs(g, v)[0]
        total = sum(dist.values())
        out[v] = len(dist) / total if total else 0.0
    return out


def eigenvector_centrality(g: WeightedGraph, weighted: bool = True, *, tol: float = EIGEN_TOL,
                           max_iter: int = EIGEN_MAX_ITER, return_eigenvalue: bool = False):
    """Leading eigenvector of the adjacency matrix by power iteration.

    Iterates on A + I, which has the same eigenvectors but a strictly dominant
    top eigenvalue even for bipartite graphs. Starts from the uniform vector
    and stops when successive unit-norm iterates differ by less than ``tol``
    in the max norm and ||Av - lambda v|| is at most ``EIGEN_RESIDUAL``.
    """
    if not g.weights:
        raise GraphError("eigenvector centrality needs at least one edge")
    order = g.sorted_nodes()
    a = g.adjacency(order, weighted=weighted)
    n = len(order)
    v = np.full(n, 1.0 / math.sqrt(n))
    for _ in range(max_iter):
        nxt = a @ v + v
        nxt /= np.linalg.norm(nxt)
        step = np.abs(nxt - v).max()
        v = nxt
        if step < tol:
            av = a @ v
            lam = float(v @ av)
            if np.linalg.norm(av - lam * v) <= EIGEN_RESIDUAL:
                break
    else:
        raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")
    out = dict(zip(order, (float(x) for x in v)))
    if return_eigenvalue:
        return out, lam
    return out


METRICS = {
    "degree": weighted_degree,
    "betweenness": betweenness,
    "eigenvector": eigenvector_centrality,
    "closeness": closeness,
    "local_clustering": local_clustering,
}


# ---------------------------------------------------------------- edge-list text format

def write_edges(g: WeightedGraph, out: TextIO) -> None:
    """``a<TAB>b<TAB>w`` per edge, then one bare name per isolated node."""
    for a, b, w in g.edges():
        out.write(f"{a}\t{b}\t{w}\n")
    for v in g.sorted_nodes():
        if not g.neighbors(v):
            out.write(f"{v}\n")


def read_edges(source: TextIO | Iterable[str]) -> WeightedGraph:
    nodes = []
    weights: dict[Pair, int] = {}
    for lineno, line in enumerate(source, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) == 1:
            nodes.append(fields[0])
            continue
        if len(fields) != 3:
            raise GraphError(f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        a, b, w = fields
        try:
            w = int(w)
        except ValueError:
            raise GraphError(f"line {lineno}: weight {w!r} is not an integer") from None
        if w <= 0:
            raise GraphError(f"line {lineno}: weight must be positive")
        key = pair(a, b)
        if key in weights:
            raise GraphError(f"line {lineno}: duplicate edge {a}-{b}")
        weights[key] = w
    return WeightedGraph(nodes, weights)


def dumps_edges(g: WeightedGraph) -> str:
    buf = io.StringIO()
    write_edges(g, buf)
    return buf.getvalue()
