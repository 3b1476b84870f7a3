"""Random-walk scenes on a simulated season network, concatenated into episodes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, TextIO

import numpy as np

from .graph import WeightedGraph, eigenvector_centrality
from .model import SeasonModel, SeasonNetwork, simulate_season


class SimulationError(RuntimeError):
    pass


class EdgelessSeason(SimulationError):
    pass


class ReplicateError(SimulationError):
    def __init__(self, replicate: int, cause: BaseException):
        self.replicate = replicate
        super().__init__(f"replicate {replicate}: {cause}")


@dataclass(frozen=True)
class SimConfig:
    n_scenes: int = 15
    n_interactions_per_scene: int = 4
    n_replicates: int = 10_000
    rewire_prob: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.n_scenes < 1:
            raise ValueError("n_scenes must be at least 1")
        if self.n_interactions_per_scene < 1:
            raise ValueError("n_interactions_per_scene must be at least 1")
        if self.n_replicates < 0:
            raise ValueError("n_replicates must be non-negative")
        if not 0.0 <= self.rewire_prob <= 1.0:
            raise ValueError("rewire_prob must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SceneRecord:
    characters: frozenset
    interactions: tuple[tuple, ...]

    def __post_init__(self):
        for s, t in self.interactions:
            if s == t:
                raise ValueError(f"{s!r} cannot interact with themselves")
            if s not in self.characters or t not in self.characters:
                raise ValueError(f"interaction {s!r}->{t!r} involves a character outside the scene")

    @classmethod
    def from_interactions(cls, interactions: Iterable[tuple]) -> "SceneRecord":
        interactions = tuple((s, t) for s, t in interactions)
        return cls(frozenset(c for st in interactions for c in st), interactions)


@dataclass(frozen=True)
class EpisodeSample:
    scenes: tuple[SceneRecord, ...]
    season_replicate: int = 0

    @property
    def characters(self) -> frozenset:
        return frozenset().union(*(sc.characters for sc in self.scenes))

    def interactions(self) -> Iterator[tuple]:
        for sc in self.scenes:
            yield from sc.interactions

    def graph(self) -> WeightedGraph:
        return WeightedGraph.from_interactions(self.interactions(), self.characters)


class Replicate(NamedTuple):
    index: int
    season: SeasonNetwork
    episode: EpisodeSample


class ReplicateStreams(NamedTuple):
    season: np.random.Generator
    scenes: np.random.Generator
    nlp: np.random.Generator


def replicate_streams(seed: int, k: int) -> ReplicateStreams:
    """Independent Philox streams for replicate ``k``, reproducible in isolation."""
    children = np.random.SeedSequence(seed, spawn_key=(k,)).spawn(3)
    return ReplicateStreams(*(np.random.Generator(np.random.Philox(c)) for c in children))


def _pick(cdf: np.ndarray, rng: np.random.Generator) -> int:
    return int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))


class SceneSampler:
    """Precomputed start and step distributions for walks on one season network."""

    def __init__(self, u: WeightedGraph | SeasonNetwork):
        g = u.graph if isinstance(u, SeasonNetwork) else u
        if not g.weights:
            raise EdgelessSeason("season network has no edges")
        self.order = g.sorted_nodes()
        cent = eigenvector_centrality(g)
        p = np.clip(np.array([cent[v] for v in self.order]), 0.0, None)
        self.start_probs = p / p.sum()
        self._start_cdf = np.cumsum(self.start_probs)
        self._steps = {}
        for v in self.order:
            nbrs = g.neighbors(v)
            if nbrs:
                names = sorted(nbrs)
                self._steps[v] = (names, np.cumsum([nbrs[w] for w in names], dtype=float))

    def start(self, rng: np.random.Generator):
        while True:
            v = self.order[min(_pick(self._start_cdf, rng), len(self.order) - 1)]
            # residual mass can land on an isolated node; redraw keeps the conditional law
            if v in self._steps:
                return v

    def step(self, v, rng: np.random.Generator):
        names, cdf = self._steps[v]
        return names[min(_pick(cdf, rng), len(names) - 1)]

    def scene(self, n_int: int, rng: np.random.Generator) -> SceneRecord:
        current = self.start(rng)
        interactions = []
        for _ in range(n_int):
            nxt = self.step(current, rng)
            interactions.append((current, nxt))
            current = nxt
        return SceneRecord.from_interactions(interactions)


def simulate_scene(u: WeightedGraph | SeasonNetwork, n_int: int, rng: np.random.Generator) -> SceneRecord:
    """One scene: a weighted random walk of ``n_int`` steps from a centrality-weighted start.

    Each step records ``(speaker, listener)`` with the walker's current node as
    speaker.
    """
    return SceneSampler(u).scene(n_int, rng)


def assemble_episode(scenes: Iterable[SceneRecord], season_replicate: int = 0) -> EpisodeSample:
    scenes = tuple(scenes)
    if not scenes:
        raise ValueError("an episode needs at least one scene")
    return EpisodeSample(scenes, season_replicate)


def simulate_episode(u: SeasonNetwork, n_scenes: int, n_int: int, rng: np.random.Generator) -> EpisodeSample:
    sampler = SceneSampler(u)
    return assemble_episode((sampler.scene(n_int, rng) for _ in range(n_scenes)), u.replicate)


def simulate_replicate(model: SeasonModel, cfg: SimConfig, k: int) -> Replicate:
    """Replicate ``k``; raises ``EdgelessSeason`` when the season draw has no edges."""
    streams = replicate_streams(cfg.seed, k)
    season = simulate_season(model, streams.season, replicate=k)
    episode = simulate_episode(season, cfg.n_scenes, cfg.n_interactions_per_scene, streams.scenes)
    return Replicate(k, season, episode)


def run_replicates(model: SeasonModel, cfg: SimConfig, skipped: list | None = None) -> Iterator[Replicate]:
    """Yield ``cfg.n_replicates`` replicates in order.

    Edgeless season draws are skipped and their indices appended to ``skipped``.
    """
    for k in range(cfg.n_replicates):
        try:
            yield simulate_replicate(model, cfg, k)
        except EdgelessSeason:
            if skipped is not None:
                skipped.append(k)
        except Exception as exc:
            raise ReplicateError(k, exc) from exc


# ---------------------------------------------------------------- episode text format

def write_episode(e: EpisodeSample, out: TextIO) -> None:
    for i, sc in enumerate(e.scenes, 1):
        out.write(f"SCENE {i}\n")
        for s, t in sc.interactions:
            out.write(f"{s}\t{t}\n")


def read_episode(source: TextIO | Iterable[str], season_replicate: int = 0) -> EpisodeSample:
    scenes: list[list] = []
    for lineno, line in enumerate(source, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("SCENE "):
            scenes.append([])
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not scenes:
            raise ValueError(f"line {lineno}: expected speaker<TAB>listener inside a SCENE block")
        scenes[-1].append(tuple(fields))
    return assemble_episode((SceneRecord.from_interactions(s) for s in scenes), season_replicate)
