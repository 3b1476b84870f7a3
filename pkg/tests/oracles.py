"""Brute-force reference implementations, independent of the library code paths.

Graphs here are plain ``{node: set(neighbors)}`` dicts. Results are exact
``Fraction`` values.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from itertools import combinations

import networkx as nx


def all_distances(adj, s):
    dist = {s: 0}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def all_geodesics(adj, s, t):
    """Every shortest s-t path, enumerated explicitly."""
    dist_t = all_distances(adj, t)
    if s not in dist_t:
        return []
    paths = []

    def extend(path):
        v = path[-1]
        if v == t:
            paths.append(tuple(path))
            return
        for w in adj[v]:
            if dist_t.get(w) == dist_t[v] - 1:
                extend(path + [w])

    extend([s])
    return paths


def betweenness(adj):
    out = {v: Fraction(0) for v in adj}
    for s, t in combinations(sorted(adj), 2):
        paths = all_geodesics(adj, s, t)
        if not paths:
            continue
        for v in adj:
            if v in (s, t):
                continue
            through = sum(1 for p in paths if v in p)
            out[v] += Fraction(through, len(paths))
    return out


def closeness(adj):
    out = {}
    for v in adj:
        dist = all_distances(adj, v)
        total = sum(dist.values())
        out[v] = Fraction(len(dist), total) if total else Fraction(0)
    return out


def global_clustering(adj):
    """3 x triangles over connected triples, both counted by enumerating vertex triples."""
    triangles = triples = 0
    for a, b, c in combinations(sorted(adj), 3):
        e = (b in adj[a]) + (c in adj[a]) + (c in adj[b])
        if e == 3:
            triangles += 1
            triples += 3
        elif e == 2:
            triples += 1
    return Fraction(3 * triangles, triples) if triples else None


def local_clustering(adj):
    out = {}
    for v in adj:
        pairs = list(combinations(sorted(adj[v]), 2))
        closed = sum(1 for a, b in pairs if b in adj[a])
        out[v] = Fraction(closed, len(pairs)) if pairs else Fraction(0)
    return out


def connected_graphs(max_nodes: int = 8):
    """Connected simple graphs on 2..max_nodes nodes covering every isomorphism class.

    Up to 7 nodes this is the graph atlas. Eight-node graphs are every atlas
    graph on 7 nodes plus a new vertex joined to a non-empty neighbor subset;
    deleting any vertex of an 8-node graph yields an atlas graph, so every
    class appears. With pynauty installed the repeats are dropped by canonical
    certificate (leaving the known 11117 classes); without it they are kept.
    """
    try:
        import pynauty
    except ImportError:
        pynauty = None
    seen = set()
    atlas = nx.graph_atlas_g()
    for g in atlas:
        n = g.number_of_nodes()
        if 2 <= n <= min(max_nodes, 7) and nx.is_connected(g):
            yield {v: set(g[v]) for v in g}
    if max_nodes < 8:
        return
    for g in atlas:
        if g.number_of_nodes() != 7:
            continue
        base = {v: set(g[v]) for v in g}
        comps = [set(c) for c in nx.connected_components(g)]
        for mask in range(1, 1 << 7):
            nbrs = {i for i in range(7) if mask >> i & 1}
            if not all(c & nbrs for c in comps):
                continue
            adj = {v: set(s) for v, s in base.items()}
            adj[7] = set(nbrs)
            for v in nbrs:
                adj[v].add(7)
            if pynauty is not None:
                cert = pynauty.certificate(pynauty.Graph(8, adjacency_dict={v: list(s) for v, s in adj.items()}))
                if cert in seen:
                    continue
                seen.add(cert)
            yield adj
