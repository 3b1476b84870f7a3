"""Readers for manual interaction logs, episode scripts and alias maps."""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, TextIO

from .graph import WeightedGraph, pair

HEADER = ("season", "episode", "scene", "char_a", "char_b")
DEFAULT_SCENE_MARKER = "[Scene:"

_DIALOGUE = re.compile(r"^\s*([^:\[\]()]+?)\s*:\s*(.*)$")
_JOINT_SPEAKERS = re.compile(r"\s*(?:,|&|\bAND\b)\s*")
_MAX_NAME_LEN = 40


class ParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


class ScriptWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Interaction:
    season: int
    episode: int
    scene: int
    char_a: str
    char_b: str


@dataclass(frozen=True)
class InteractionLog:
    records: tuple[Interaction, ...] = ()

    def __post_init__(self):
        last_scene: dict[tuple[int, int], int] = {}
        for r in self.records:
            if r.char_a == r.char_b:
                raise ParseError(f"self-interaction of {r.char_a!r}")
            key = (r.season, r.episode)
            if r.scene < last_scene.get(key, r.scene):
                raise ParseError(f"scene {r.scene} after scene {last_scene[key]} in season {r.season} episode {r.episode}")
            last_scene[key] = r.scene

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def seasons(self) -> list[int]:
        return sorted({r.season for r in self.records})


def parse_interaction_log(source: TextIO | Iterable[str]) -> InteractionLog:
    """Read the ``season,episode,scene,char_a,char_b`` CSV."""
    records = []
    last_scene: dict[tuple[int, int], int] = {}
    seen_header = False
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if tuple(f.lower() for f in fields) == HEADER:
            if seen_header:
                raise ParseError("duplicate header", lineno)
            seen_header = True
            continue
        if not seen_header:
            raise ParseError(f"expected header {','.join(HEADER)}", lineno)
        if len(fields) != 5:
            raise ParseError(f"expected 5 fields, got {len(fields)}", lineno)
        try:
            season, episode, scene = (int(f) for f in fields[:3])
        except ValueError:
            raise ParseError("season, episode and scene must be integers", lineno) from None
        a, b = fields[3], fields[4]
        if not a or not b:
            raise ParseError("empty character name", lineno)
        if a == b:
            raise ParseError(f"self-interaction of {a!r}", lineno)
        key = (season, episode)
        if scene < last_scene.get(key, scene):
            raise ParseError(f"scene index {scene} decreases within season {season} episode {episode}", lineno)
        last_scene[key] = scene
        records.append(Interaction(season, episode, scene, a, b))
    if not seen_header:
        raise ParseError("missing header")
    return InteractionLog(tuple(records))


def write_interaction_log(log: InteractionLog, out: TextIO) -> None:
    out.write(",".join(HEADER) + "\n")
    for r in log:
        out.write(f"{r.season},{r.episode},{r.scene},{r.char_a},{r.char_b}\n")


def _normalize_name(name: str) -> str:
    return " ".join(name.split()).upper()


@dataclass(frozen=True)
class AliasMap:
    """Ordered exact-match rules ``alias -> canonical`` on trimmed, upper-cased names."""

    rules: tuple[tuple[str, str], ...] = ()
    _lookup: Mapping[str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lookup: dict[str, str] = {}
        for alias, canonical in self.rules:
            alias, canonical = _normalize_name(alias), _normalize_name(canonical)
            lookup.setdefault(alias, canonical)
        for canonical in set(lookup.values()):
            if lookup.get(canonical, canonical) != canonical:
                raise ValueError(f"canonical name {canonical!r} is itself mapped to {lookup[canonical]!r}")
        object.__setattr__(self, "_lookup", lookup)

    def resolve(self, name: str) -> str:
        name = _normalize_name(name)
        return self._lookup.get(name, name)


def parse_alias_map(source: TextIO | Iterable[str]) -> AliasMap:
    rules = []
    for lineno, line in enumerate(source, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
            raise ParseError("expected alias<TAB>canonical", lineno)
        rules.append((fields[0], fields[1]))
    return AliasMap(tuple(rules))


@dataclass(frozen=True)
class ScriptScene:
    episode: int
    scene: int
    speakers: tuple[str, ...]
    season: int = 0

    def __post_init__(self):
        if not self.speakers:
            raise ValueError("a scene needs at least one speaker")

    @property
    def characters(self) -> frozenset[str]:
        return frozenset(self.speakers)


def parse_script(source: TextIO | Iterable[str], aliases: AliasMap | None = None, *,
                 marker: str = DEFAULT_SCENE_MARKER, episode: int = 0, season: int = 0) -> list[ScriptScene]:
    """Split a transcript into scenes and collect who speaks in each.

    Scene breaks are lines starting with ``marker``. Dialogue lines look like
    ``NAME: text``; joint speakers (``ROSS AND RACHEL:``) count for each name
    unless the whole name is an alias.
    Lines in parentheses or brackets are stage directions. Anything else is
    treated as wrapped dialogue and skipped. Questionable lines are reported
    through ``ScriptWarning``.
    """
    aliases = aliases or AliasMap()
    marker_folded = marker.casefold()
    scenes: list[list[str]] = []
    saw_marker = False
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line:
            continue
        if line.casefold().startswith(marker_folded):
            scenes.append([])
            saw_marker = True
            continue
        if line[0] in "([":
            continue
        m = _DIALOGUE.match(line)
        if m is None:
            continue
        name = m.group(1)
        if len(name) > _MAX_NAME_LEN or not any(c.isalpha() for c in name):
            warnings.warn(f"line {lineno}: unrecognised speaker {name[:_MAX_NAME_LEN]!r}", ScriptWarning, stacklevel=2)
            continue
        if not saw_marker:
            warnings.warn(f"line {lineno}: dialogue before the first scene marker ignored", ScriptWarning, stacklevel=2)
            continue
        name = _normalize_name(name)
        parts = [name] if aliases.resolve(name) != name else _JOINT_SPEAKERS.split(name)
        scenes[-1].extend(aliases.resolve(p) for p in parts if p)
    if not saw_marker:
        raise ParseError(f"no scene marker {marker!r} found")
    out = []
    for speakers in scenes:
        if speakers:
            unique = tuple(dict.fromkeys(speakers))
            out.append(ScriptScene(episode, len(out) + 1, unique, season))
    return out


def _slice_key(season: int, episode: int, granularity: str):
    if granularity == "episode":
        return (season, episode)
    if granularity == "season":
        return season
    raise ValueError(f"granularity must be 'episode' or 'season', not {granularity!r}")


def log_to_graphs(log: InteractionLog, granularity: str = "episode") -> dict:
    """Interaction counts per time slice.

    Keys are ``(season, episode)`` tuples for episode granularity, season
    numbers otherwise.
    """
    counts: dict = {}
    for r in log:
        key = _slice_key(r.season, r.episode, granularity)
        slot = counts.setdefault(key, {})
        p = pair(r.char_a, r.char_b)
        slot[p] = slot.get(p, 0) + 1
    return {k: WeightedGraph((), w) for k, w in sorted(counts.items())}


def scenes_to_cooccurrence(scenes: Iterable[ScriptScene], granularity: str = "episode") -> dict:
    """Add a unit-weight clique over each scene's speakers."""
    nodes: dict = {}
    counts: dict = {}
    for sc in scenes:
        key = _slice_key(sc.season, sc.episode, granularity)
        nodes.setdefault(key, set()).update(sc.speakers)
        slot = counts.setdefault(key, {})
        for a, b in combinations(sorted(sc.characters), 2):
            slot[(a, b)] = slot.get((a, b), 0) + 1
    return {k: WeightedGraph(nodes[k], counts[k]) for k in sorted(nodes)}


@dataclass(frozen=True)
class SeasonSummary:
    season: int
    episodes: int
    characters: int
    interactions: int
    scenes: int

    @property
    def ints_per_episode(self) -> float:
        return self.interactions / self.episodes if self.episodes else math.nan

    @property
    def scenes_per_episode(self) -> float:
        return self.scenes / self.episodes if self.episodes else math.nan

    @property
    def ints_per_scene(self) -> float:
        return self.interactions / self.scenes if self.scenes else math.nan


def summarize(log: InteractionLog, scene_counts: Mapping[tuple[int, int], int] | None = None,
              seasons: Iterable[int] = ()) -> list[SeasonSummary]:
    """Per-season counts in the layout of the usual dataset overview table.

    ``scene_counts`` maps ``(season, episode)`` to the number of scenes; when
    omitted the distinct scene indices of the log are used. Seasons listed in
    ``seasons`` but absent from the data yield an all-zero row.
    """
    if scene_counts is None:
        distinct: dict[tuple[int, int], set] = {}
        for r in log:
            distinct.setdefault((r.season, r.episode), set()).add(r.scene)
        scene_counts = {k: len(v) for k, v in distinct.items()}
    episodes: dict[int, set] = {}
    chars: dict[int, set] = {}
    ints: dict[int, int] = {}
    for r in log:
        episodes.setdefault(r.season, set()).add(r.episode)
        chars.setdefault(r.season, set()).update((r.char_a, r.char_b))
        ints[r.season] = ints.get(r.season, 0) + 1
    scenes: dict[int, int] = {}
    for (season, ep), n in scene_counts.items():
        scenes[season] = scenes.get(season, 0) + n
        episodes.setdefault(season, set()).add(ep)
    all_seasons = sorted(set(episodes) | set(seasons))
    return [
        SeasonSummary(m, len(episodes.get(m, ())), len(chars.get(m, ())), ints.get(m, 0), scenes.get(m, 0))
        for m in all_seasons
    ]
