"""Two-class Poisson model of a season's interaction network."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .graph import WeightedGraph

FRIENDS_CORE = ("CHANDLER", "JOEY", "MONICA", "PHOEBE", "RACHEL", "ROSS")


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class CharacterPartition:
    core: frozenset
    non_core: frozenset

    def __post_init__(self):
        if self.core & self.non_core:
            raise ModelError(f"characters in both classes: {sorted(self.core & self.non_core)}")

    @classmethod
    def from_core(cls, characters: Iterable, core: Iterable) -> "CharacterPartition":
        core = frozenset(core)
        return cls(core, frozenset(characters) - core)

    @property
    def characters(self) -> frozenset:
        return self.core | self.non_core


@dataclass(frozen=True)
class SeasonModel:
    partition: CharacterPartition
    lambda_cc: float
    lambda_cn: float
    lambda_nn: float
    season: int = 0

    def __post_init__(self):
        for name in ("lambda_cc", "lambda_cn", "lambda_nn"):
            rate = getattr(self, name)
            if not (math.isfinite(rate) and rate >= 0):
                raise ModelError(f"{name} must be finite and non-negative, got {rate}")

    def rate(self, a, b) -> float:
        ca, cb = a in self.partition.core, b in self.partition.core
        if ca and cb:
            return self.lambda_cc
        if ca or cb:
            return self.lambda_cn
        return self.lambda_nn


@dataclass(frozen=True)
class SeasonNetwork:
    graph: WeightedGraph
    replicate: int = 0


def fit(graph: WeightedGraph, partition: CharacterPartition, season: int = 0) -> SeasonModel:
    """Maximum-likelihood rates: mean weight over every pair of each class combination.

    Pairs with no interactions count as zero observations.
    """
    missing = graph.nodes - partition.characters
    if missing:
        raise ModelError(f"graph characters missing from the partition: {sorted(missing)[:5]}")
    n_core, n_non = len(partition.core), len(partition.non_core)
    counts = {"cc": n_core * (n_core - 1) // 2, "cn": n_core * n_non, "nn": n_non * (n_non - 1) // 2}
    sums = dict.fromkeys(counts, 0)
    for a, b, w in graph.edges():
        ca, cb = a in partition.core, b in partition.core
        sums["cc" if ca and cb else "cn" if ca or cb else "nn"] += w
    for key, n in counts.items():
        if n == 0:
            raise ModelError(f"class combination {key!r} has no candidate pairs")
    return SeasonModel(partition, sums["cc"] / counts["cc"], sums["cn"] / counts["cn"],
                       sums["nn"] / counts["nn"], season)


def _rate_vector(model: SeasonModel, order: list) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    is_core = np.array([v in model.partition.core for v in order])
    iu, ju = np.triu_indices(len(order), k=1)
    both = is_core[iu] & is_core[ju]
    either = is_core[iu] | is_core[ju]
    rates = np.where(both, model.lambda_cc, np.where(either, model.lambda_cn, model.lambda_nn))
    return iu, ju, rates


def simulate_season(model: SeasonModel, rng: np.random.Generator, replicate: int = 0) -> SeasonNetwork:
    """Draw an independent Poisson weight for every pair of characters."""
    order = sorted(model.partition.characters)
    iu, ju, rates = _rate_vector(model, order)
    draws = rng.poisson(rates)
    nz = np.flatnonzero(draws)
    weights = {(order[iu[k]], order[ju[k]]): int(draws[k]) for k in nz}
    return SeasonNetwork(WeightedGraph(order, weights), replicate)


# ---------------------------------------------------------------- model files

def write_model(model: SeasonModel, out: TextIO) -> None:
    out.write(f"season: {model.season}\n")
    out.write(f"lambda_cc: {model.lambda_cc!r}\n")
    out.write(f"lambda_cn: {model.lambda_cn!r}\n")
    out.write(f"lambda_nn: {model.lambda_nn!r}\n")
    out.write(f"core: {','.join(sorted(model.partition.core))}\n")
    out.write(f"characters: {','.join(sorted(model.partition.characters))}\n")


def read_model(source: TextIO | Iterable[str]) -> SeasonModel:
    fields = {}
    for lineno, line in enumerate(source, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ModelError(f"line {lineno}: expected 'key: value'")
        fields[key.strip()] = value.strip()
    required = ("season", "lambda_cc", "lambda_cn", "lambda_nn", "core", "characters")
    absent = [k for k in required if k not in fields]
    if absent:
        raise ModelError(f"model file lacks {', '.join(absent)}")

    def names(text):
        return [n.strip() for n in text.split(",") if n.strip()]

    characters = names(fields["characters"])
    core = names(fields["core"])
    if not set(core) <= set(characters):
        raise ModelError("core characters must be listed among the characters")
    try:
        return SeasonModel(CharacterPartition.from_core(characters, core), float(fields["lambda_cc"]),
                           float(fields["lambda_cn"]), float(fields["lambda_nn"]), int(fields["season"]))
    except ValueError as exc:
        raise ModelError(str(exc)) from None


def synthetic_model(n_core: int, n_non_core: int, lambda_cc: float, lambda_cn: float, lambda_nn: float,
                    season: int = 0) -> SeasonModel:
    """Model over placeholder characters ``C1..`` and ``N1..``; handy when only rates are known."""
    core = [f"C{i}" for i in range(1, n_core + 1)]
    non = [f"N{i}" for i in range(1, n_non_core + 1)]
    return SeasonModel(CharacterPartition(frozenset(core), frozenset(non)), lambda_cc, lambda_cn, lambda_nn, season)
