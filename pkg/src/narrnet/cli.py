"""``narrnet`` command line.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import re
import sys
import warnings
from pathlib import Path

from . import __version__
from .analysis import AnalysisError, rank_character, trend_core_interactions, write_trend
from .experiment import TreeError, compare_tree, simulate_tree
from .graph import GraphError, WeightedGraph, read_edges, write_edges
from .ingest import (DEFAULT_SCENE_MARKER, AliasMap, ParseError, ScriptWarning, log_to_graphs,
                     parse_alias_map, parse_interaction_log, parse_script, scenes_to_cooccurrence, summarize)
from .model import CharacterPartition, ModelError, fit, read_model, synthetic_model, write_model
from .sim import SimConfig, SimulationError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

DEFAULTS = {
    "n_sims": 10_000,
    "scenes": 15,
    "ints_per_scene": 4,
    "rewire_prob": 0.3,
    "seed": 0,
    "season": None,
    "scene_marker": DEFAULT_SCENE_MARKER,
    "workers": 1,
}

_SEASON_IN_NAME = re.compile(r"^s?(\d+)", re.IGNORECASE)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _names(text: str | None) -> list[str] | None:
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [str(n).strip() for n in text if str(n).strip()]
    return [n.strip() for n in text.split(",") if n.strip()]


def _apply_config(args: argparse.Namespace) -> None:
    """Fill unset flags from the JSON config, then from defaults; flags win."""
    config = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(config, dict):
            raise UsageError("config must be a JSON object")
        config = {k.replace("-", "_"): v for k, v in config.items()}
    for key, value in vars(args).items():
        if value is None:
            if key in config:
                setattr(args, key, config[key])
            elif key in DEFAULTS:
                setattr(args, key, DEFAULTS[key])


def _open_text(path, mode="r"):
    return open(path, mode, encoding="utf-8", newline="" if "w" in mode else None)


def cmd_fit(args) -> int:
    core = _names(args.core)
    if not core:
        raise UsageError("--core is required: a comma-separated list of core characters")
    with _open_text(args.interactions) as fh:
        log = parse_interaction_log(fh)
    seasons = log.seasons()
    season = args.season
    if season is None:
        if len(seasons) != 1:
            raise UsageError(f"the log spans seasons {seasons}; pick one with --season")
        season = seasons[0]
    graphs = log_to_graphs(log, "season")
    if season not in graphs:
        raise ModelError(f"season {season} has no interactions in {args.interactions}")
    g = graphs[season]
    model = fit(g, CharacterPartition.from_core(g.nodes | set(core), core), season)
    _write_model(model, args.out)
    print(f"season {season}: lambda_cc={model.lambda_cc:.6g} lambda_cn={model.lambda_cn:.6g} "
          f"lambda_nn={model.lambda_nn:.6g}")
    return EXIT_OK


def _write_model(model, out):
    if out in (None, "-"):
        write_model(model, sys.stdout)
    else:
        with _open_text(out, "w") as fh:
            write_model(model, fh)


def cmd_synth_model(args) -> int:
    model = synthetic_model(args.n_core, args.n_non_core, args.lambda_cc, args.lambda_cn, args.lambda_nn, args.season)
    _write_model(model, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.out is None:
        raise UsageError("--out is required")
    with _open_text(args.model) as fh:
        model = read_model(fh)
    try:
        cfg = SimConfig(int(args.scenes), int(args.ints_per_scene), int(args.n_sims), float(args.rewire_prob),
                        int(args.seed))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    core = _names(args.core)
    manifest = simulate_tree(model, cfg, Path(args.out), core=core, model_source=str(args.model),
                             workers=int(args.workers))
    n_done = cfg.n_replicates - len(manifest["skipped"])
    print(f"wrote {n_done} replicates to {args.out} ({len(manifest['skipped'])} skipped)")
    return EXIT_OK


def cmd_compare(args) -> int:
    report = compare_tree(Path(args.tree), None if args.out is None else Path(args.out), core=_names(args.core),
                          weighted_eigenvector=not args.unweighted_eigenvector, workers=int(args.workers))
    agg = report.aggregates()
    for comp, metrics in agg["correlations"].items():
        for metric, stats in metrics.items():
            med = "undefined" if stats["median"] is None else f"{stats['median']:.3f}"
            print(f"{comp:15s} {metric:17s} median={med} skipped={stats['skipped']}")
    for comp, vals in agg["global"]["pearson"].items():
        print(f"{comp:15s} density pearson={vals['density']:.3f}")
    return EXIT_OK


def cmd_parse_script(args) -> int:
    scripts = sorted(p for p in Path(args.scripts).iterdir() if p.is_file())
    if not scripts:
        raise ParseError(f"{args.scripts} holds no script files")
    aliases = AliasMap()
    if args.aliases:
        with _open_text(args.aliases) as fh:
            aliases = parse_alias_map(fh)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    messages = []
    written = 0
    for episode, path in enumerate(scripts, 1):
        m = _SEASON_IN_NAME.match(path.stem)
        season = int(m.group(1)) if m else 0
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ScriptWarning)
            try:
                with _open_text(path) as fh:
                    scenes = parse_script(fh, aliases, marker=args.scene_marker, episode=episode, season=season)
            except ParseError as exc:
                messages.append(f"{path.name}: {exc}")
                print(f"{path.name}: {exc}", file=sys.stderr)
                continue
        messages.extend(f"{path.name}: {w.message}" for w in caught)
        g = scenes_to_cooccurrence(scenes).get((season, episode), WeightedGraph())
        with _open_text(out / f"{path.stem}.edges", "w") as fh:
            write_edges(g, fh)
        written += 1
    with _open_text(out / "parse_warnings.log", "w") as fh:
        fh.writelines(m + "\n" for m in messages)
    print(f"wrote {written} of {len(scripts)} episodes to {out}; {len(messages)} warnings")
    return EXIT_OK


def read_season_graphs(directory: Path) -> dict[int, WeightedGraph]:
    """Sum the ``*.edges`` files of a directory by the season number leading each file name."""
    acc: dict[int, dict] = {}
    nodes: dict[int, set] = {}
    files = sorted(Path(directory).glob("*.edges"))
    if not files:
        raise ParseError(f"{directory} holds no .edges files")
    for path in files:
        m = _SEASON_IN_NAME.match(path.stem)
        if not m:
            raise ParseError(f"{path.name}: cannot tell the season from the file name")
        season = int(m.group(1))
        with _open_text(path) as fh:
            g = read_edges(fh)
        nodes.setdefault(season, set()).update(g.nodes)
        slot = acc.setdefault(season, {})
        for key, w in g.weights.items():
            slot[key] = slot.get(key, 0) + w
    return {m: WeightedGraph(nodes[m], acc[m]) for m in sorted(acc)}


def _dataset_arg(text: str) -> tuple[str, str]:
    name, sep, path = text.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError("expected NAME=DIRECTORY")
    return name, path


def cmd_trend(args) -> int:
    core = _names(args.core)
    if not core or len(core) < 2:
        raise UsageError("--core needs at least two characters")
    datasets = {name: read_season_graphs(Path(path)) for name, path in args.dataset}
    coverage = {name: set(graphs) for name, graphs in datasets.items()}
    if len({frozenset(c) for c in coverage.values()}) > 1:
        print("warning: datasets cover different seasons: "
              + "; ".join(f"{n}={sorted(c)}" for n, c in coverage.items()), file=sys.stderr)
    fits = {name: trend_core_interactions(graphs, core) for name, graphs in datasets.items()}
    with (_open_text(args.out, "w") if args.out not in (None, "-") else contextlib.nullcontext(sys.stdout)) as fh:
        write_trend(fits, fh)
    for name, f in fits.items():
        print(f"{name}: slope={f.slope:.4g} intercept={f.intercept:.4g}", file=sys.stderr)
    return EXIT_OK


def cmd_graphs(args) -> int:
    with _open_text(args.interactions) as fh:
        log = parse_interaction_log(fh)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graphs = log_to_graphs(log, args.granularity)
    for key, g in graphs.items():
        name = f"s{key:02d}" if args.granularity == "season" else f"s{key[0]:02d}e{key[1]:02d}"
        with _open_text(out / f"{name}.edges", "w") as fh:
            write_edges(g, fh)
    print(f"wrote {len(graphs)} edge lists to {out}")
    return EXIT_OK


def cmd_summarize(args) -> int:
    with _open_text(args.interactions) as fh:
        log = parse_interaction_log(fh)
    print("season,episodes,characters,interactions,scenes,ints_per_episode,scenes_per_episode,ints_per_scene")
    for s in summarize(log):
        print(f"{s.season},{s.episodes},{s.characters},{s.interactions},{s.scenes},"
              f"{s.ints_per_episode:.2f},{s.scenes_per_episode:.2f},{s.ints_per_scene:.2f}")
    return EXIT_OK


def cmd_rank(args) -> int:
    graphs = read_season_graphs(Path(args.graphs))
    ranks = rank_character(graphs, args.character, args.metric)
    print(f"season,{args.metric}_rank")
    for m, r in ranks.items():
        print(f"{m},{r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="narrnet", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"narrnet {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("fit", help="fit the two-class Poisson model to one season of a manual log")
    s.add_argument("interactions")
    s.add_argument("--core")
    s.add_argument("--season", type=int)
    s.add_argument("--out", help="model file (default: stdout)")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("synth-model", help="write a model over placeholder characters from given rates")
    s.add_argument("--n-core", type=int, default=6)
    s.add_argument("--n-non-core", type=int, default=93)
    s.add_argument("--lambda-cc", type=float, default=81.0)
    s.add_argument("--lambda-cn", type=float, default=0.71)
    s.add_argument("--lambda-nn", type=float, default=0.0093)
    s.add_argument("--season", type=int, default=6)
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth_model)

    s = sub.add_parser("simulate", help="simulate replicate episodes and their three observation networks")
    s.add_argument("model")
    s.add_argument("--config", help="JSON file of flag values; explicit flags win")
    s.add_argument("--n-sims", type=int)
    s.add_argument("--scenes", type=int)
    s.add_argument("--ints-per-scene", type=int)
    s.add_argument("--rewire-prob", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--core", help="core characters recorded for later comparison (default: the model's)")
    s.add_argument("--out")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("compare", help="correlate metrics across a replicate tree")
    s.add_argument("tree")
    s.add_argument("--config")
    s.add_argument("--core", help="default: the core recorded in the manifest")
    s.add_argument("--out", help="output directory (default: the tree)")
    s.add_argument("--workers", type=int)
    s.add_argument("--unweighted-eigenvector", action="store_true")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("parse-script", help="co-occurrence edge lists from episode scripts")
    s.add_argument("scripts")
    s.add_argument("--config")
    s.add_argument("--aliases", help="alias<TAB>canonical file")
    s.add_argument("--scene-marker")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_parse_script)

    s = sub.add_parser("trend", help="per-season core interaction averages with least-squares lines")
    s.add_argument("--dataset", action="append", type=_dataset_arg, required=True, metavar="NAME=DIR")
    s.add_argument("--core", required=True)
    s.add_argument("--out", help="trend.csv path (default: stdout)")
    s.set_defaults(func=cmd_trend)

    s = sub.add_parser("graphs", help="edge lists per season or episode from a manual log")
    s.add_argument("interactions")
    s.add_argument("--granularity", choices=("episode", "season"), default="season")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_graphs)

    s = sub.add_parser("summarize", help="per-season counts of a manual log")
    s.add_argument("interactions")
    s.set_defaults(func=cmd_summarize)

    s = sub.add_parser("rank", help="per-season dense rank of one character")
    s.add_argument("--graphs", required=True, help="directory of per-season .edges files")
    s.add_argument("--character", required=True)
    s.add_argument("--metric", default="betweenness",
                   choices=("degree", "betweenness", "eigenvector", "closeness", "local_clustering"))
    s.set_defaults(func=cmd_rank)
    return p


DATA_ERRORS = (ParseError, GraphError, ModelError, AnalysisError, TreeError, SimulationError, OSError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _apply_config(args)
        return args.func(args)
    except UsageError as exc:
        print(f"narrnet {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"narrnet {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        logging.getLogger("narrnet").exception("internal error")
        print(f"narrnet {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
