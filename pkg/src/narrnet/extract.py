"""Observation networks extracted from a simulated episode."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .graph import WeightedGraph, read_edges, write_edges
from .sim import EpisodeSample

NETWORKS = ("manual", "cooc", "nlp")


@dataclass(frozen=True)
class ObservationTriple:
    manual: WeightedGraph
    cooccurrence: WeightedGraph
    nlp: WeightedGraph
    replicate: int = 0

    def __getitem__(self, name: str) -> WeightedGraph:
        return {"manual": self.manual, "cooc": self.cooccurrence, "nlp": self.nlp}[name]


def extract_manual(e: EpisodeSample) -> WeightedGraph:
    return WeightedGraph.from_interactions(e.interactions(), e.characters)


def extract_cooccurrence(e: EpisodeSample) -> WeightedGraph:
    counts: dict = {}
    for sc in e.scenes:
        for p in combinations(sorted(sc.characters), 2):
            counts[p] = counts.get(p, 0) + 1
    return WeightedGraph(e.characters, counts)


def rewire(e: EpisodeSample, q: float, rng: np.random.Generator) -> tuple[list, int]:
    """Misidentify listeners at rate ``q``.

    A misidentified listener is replaced by a uniform draw from the episode's
    characters other than the speaker and the true listener. When that pool is
    empty the interaction is kept. Returns the observed interactions and how
    many were rewired.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    cast = sorted(e.characters)
    observed = []
    n_rewired = 0
    for s, t in e.interactions():
        if rng.random() < q and len(cast) > 2:
            pool = [c for c in cast if c != s and c != t]
            t = pool[int(rng.integers(len(pool)))]
            n_rewired += 1
        observed.append((s, t))
    return observed, n_rewired


def extract_nlp(e: EpisodeSample, q: float, rng: np.random.Generator) -> WeightedGraph:
    """Manual counts after listener rewiring; characters left without interactions drop out."""
    observed, _ = rewire(e, q, rng)
    return WeightedGraph.from_interactions(observed)


def extract_all(e: EpisodeSample, q: float, rng: np.random.Generator, replicate: int | None = None) -> ObservationTriple:
    rep = e.season_replicate if replicate is None else replicate
    return ObservationTriple(extract_manual(e), extract_cooccurrence(e), extract_nlp(e, q, rng), rep)


def write_triple(t: ObservationTriple, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for name in NETWORKS:
        with open(directory / f"{name}.edges", "w", encoding="utf-8", newline="\n") as fh:
            write_edges(t[name], fh)


def read_triple(directory: Path, replicate: int = 0) -> ObservationTriple:
    graphs = {}
    for name in NETWORKS:
        with open(directory / f"{name}.edges", encoding="utf-8") as fh:
            graphs[name] = read_edges(fh)
    return ObservationTriple(graphs["manual"], graphs["cooc"], graphs["nlp"], replicate)
