"""Replicate trees on disk: simulate observation triples, then correlate them."""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from . import __version__
from .analysis import CorrelationReport, write_correlations, write_globals, write_summary
from .extract import NETWORKS, extract_all, read_triple, write_triple
from .model import SeasonModel
from .sim import EdgelessSeason, ReplicateError, SimConfig, replicate_streams, simulate_replicate, write_episode

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"


class TreeError(ValueError):
    pass


def rep_dir(root: Path, k: int) -> Path:
    return Path(root) / f"rep_{k}"


def _simulate_one(model: SeasonModel, cfg: SimConfig, root: Path, k: int) -> bool:
    try:
        rep = simulate_replicate(model, cfg, k)
    except EdgelessSeason:
        return False
    except Exception as exc:
        raise ReplicateError(k, exc) from exc
    triple = extract_all(rep.episode, cfg.rewire_prob, replicate_streams(cfg.seed, k).nlp, k)
    d = rep_dir(root, k)
    write_triple(triple, d)
    with open(d / "episode.txt", "w", encoding="utf-8", newline="\n") as fh:
        write_episode(rep.episode, fh)
    return True


def _fan_out(fn, args: Iterable[tuple], workers: int) -> Iterator:
    args = list(args)
    if workers <= 1 or len(args) < 2:
        for a in args:
            yield fn(*a)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, *zip(*args), chunksize=max(1, len(args) // (workers * 8)))


def simulate_tree(model: SeasonModel, cfg: SimConfig, root: Path, *, core: Iterable | None = None,
                  model_source: str | None = None, workers: int = 1) -> dict:
    """Write ``rep_<k>/{manual,cooc,nlp}.edges`` for every replicate, then the manifest.

    The manifest goes last, so a tree without one is an interrupted run.
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    stale = root / MANIFEST
    if stale.exists():
        stale.unlink()
    started = datetime.now(timezone.utc).isoformat()
    core = sorted(model.partition.core if core is None else core)
    ok = list(_fan_out(_simulate_one, ((model, cfg, root, k) for k in range(cfg.n_replicates)), workers))
    skipped = [k for k, done in enumerate(ok) if not done]
    for k in skipped:
        log.warning("replicate %d skipped: edgeless season network", k)
    manifest = {
        "tool": "narrnet",
        "version": __version__,
        "config": asdict(cfg),
        "model": {
            "source": model_source,
            "season": model.season,
            "lambda_cc": model.lambda_cc,
            "lambda_cn": model.lambda_cn,
            "lambda_nn": model.lambda_nn,
            "core": sorted(model.partition.core),
            "characters": sorted(model.partition.characters),
        },
        "core": core,
        "seed": cfg.seed,
        "skipped": skipped,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
    }
    with open(root / MANIFEST, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def read_manifest(root: Path) -> dict:
    path = Path(root) / MANIFEST
    if not path.exists():
        raise TreeError(f"{root}: no {MANIFEST}; the run is missing or incomplete")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def expected_replicates(manifest: dict) -> list[int]:
    skipped = set(manifest.get("skipped", ()))
    return [k for k in range(manifest["config"]["n_replicates"]) if k not in skipped]


def _compare_one(root: Path, k: int, core: list, weighted_eigenvector: bool) -> CorrelationReport:
    report = CorrelationReport(core, weighted_eigenvector)
    report.add(read_triple(rep_dir(root, k), k))
    return report


def compare_tree(root: Path, out: Path | None = None, *, core: Iterable | None = None,
                 weighted_eigenvector: bool = True, workers: int = 1) -> CorrelationReport:
    """Correlate every replicate of a finished tree; writes ``correlations.csv``,
    ``summary.json`` and ``global.csv`` into ``out`` (default: the tree)."""
    root = Path(root)
    manifest = read_manifest(root)
    reps = expected_replicates(manifest)
    if not reps:
        raise TreeError(f"{root}: the tree holds no replicates")
    missing = [k for k in reps if not all((rep_dir(root, k) / f"{n}.edges").exists() for n in NETWORKS)]
    if missing:
        raise TreeError(f"{root}: missing replicate(s) {', '.join(f'rep_{k}' for k in missing[:10])}")
    core = sorted(manifest.get("core", ()) if core is None else core)
    report = CorrelationReport(core, weighted_eigenvector)
    for part in _fan_out(_compare_one, ((root, k, core, weighted_eigenvector) for k in reps), workers):
        report.rows.extend(part.rows)
        report.globals.extend(part.globals)
    out = root if out is None else Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for name, writer in (("correlations.csv", write_correlations), ("summary.json", write_summary),
                         ("global.csv", write_globals)):
        with open(out / name, "w", encoding="utf-8", newline="") as fh:
            writer(report, fh)
    return report


def default_workers() -> int:
    return max(1, (os.cpu_count() or 1) - 1)
