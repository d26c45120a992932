"""Command-line pipeline: parse, align, build, analyze, communities, export.

Each command reads declared JSON inputs and writes declared JSON/CSV outputs.
Exit code 0 on success; failures print one machine-parsable line to stderr
with a distinct code per error class.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__, aligner, annotations, captions, communities, exports, graph, metrics, textkit
from . import script_parser, subtitle_parser
from .errors import (
    AlignmentError,
    ConfigurationError,
    ImportFormatError,
    MovielayersError,
    ScriptParseError,
    SrtParseError,
    ValidationError,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MISSING_INPUT = 2
EXIT_SCHEMA = 3
EXIT_ALIGNMENT = 4
EXIT_PARSE = 5

OUTPUT_DIR_ENV = "MOVIELAYERS_OUT"

GRAPH_VIEWS = ("ALL", "ALL_MINUS_CAPTIONS")


class MissingInputError(MovielayersError):
    pass


def _require(path: str | None, what: str) -> Path:
    if path is None:
        raise MissingInputError(f"missing required input: {what}")
    p = Path(path)
    if not p.exists():
        raise MissingInputError(f"{what} not found: {p}")
    return p


def _out_path(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


class _ConfigArgumentParser(argparse.ArgumentParser):
    """Supports `movielayers align @run.conf ...` with key = value lines.

    Config lines map to long options (`cosine_threshold = 0.25` becomes
    `--cosine-threshold=0.25`); blank lines and # comments are ignored.
    Explicit flags given after the @file win.
    """

    def convert_arg_line_to_args(self, line: str) -> list[str]:
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            return []
        if stripped.startswith("-"):
            return [stripped]
        if "=" not in stripped:
            raise ConfigurationError(f"config line not in key = value form: {stripped!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        flag = "--" + key.replace("_", "-")
        return [f"{flag}={value}"] if value else [flag]


def _stoplist(args) -> textkit.Stoplist:
    if getattr(args, "stopwords", None):
        return textkit.Stoplist.load(_require(args.stopwords, "stopword list"))
    return textkit.Stoplist.default()


def _select_view(g: graph.MultilayerGraph, args) -> graph.MultilayerGraph:
    layer = getattr(args, "layer", None)
    view = getattr(args, "graph", None) or "ALL"
    if layer and view != "ALL":
        raise ValidationError("--layer and --graph are mutually exclusive selectors")
    if layer:
        try:
            family = graph.EdgeFamily[layer.upper()]
        except KeyError:
            raise ValidationError(f"unknown layer family {layer!r}; expected one of "
                                  + ", ".join(f.name for f in graph.EdgeFamily)) from None
        return g.layer_subgraph(family)
    if view == "ALL_MINUS_CAPTIONS":
        return g.drop_layer(graph.LayerKind.CAPTION)
    if view != "ALL":
        raise ValidationError(f"unknown graph view {view!r}; expected {GRAPH_VIEWS}")
    return g


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_parse(args) -> int:
    script_path = _require(args.script, "script file")
    text = script_path.read_text(encoding="utf-8", errors="replace")
    scenes = script_parser.chunk_scenes(text)
    conversations = [
        conv
        for scene in scenes
        for conv in script_parser.detect_conversations(scene, scene_level=args.scene_level_conversations)
    ]
    out = _out_path(args.out)
    out.write_text(exports.scenes_to_json(scenes, conversations), encoding="utf-8")
    print(f"parsed {len(scenes)} scenes, {len(conversations)} conversations -> {out}")
    return EXIT_OK


def cmd_align(args) -> int:
    scenes, _ = exports.scenes_from_json(_require(args.scenes, "scenes JSON").read_text(encoding="utf-8"))
    srt_path = _require(args.srt, "subtitle file")
    if srt_path.suffix.lower() == ".json":
        blocks = exports.subtitles_from_json(srt_path.read_text(encoding="utf-8"))
    else:
        blocks = subtitle_parser.parse_srt(srt_path.read_bytes())
    shots = None
    if args.shots:
        shots = aligner.ShotList.from_json_file(_require(args.shots, "shots JSON"))
    timeline = aligner.align(
        scenes, blocks, shots=shots, cosine_threshold=args.cosine_threshold
    )
    out = _out_path(args.out)
    out.write_text(exports.timeline_to_json(timeline), encoding="utf-8")
    report = aligner.alignment_report(timeline)
    print(aligner.format_report_row(srt_path.stem, report))
    print(f"timeline -> {out}")
    if args.subtitles_out:
        sub_out = _out_path(args.subtitles_out)
        sub_out.write_text(exports.subtitles_to_json(blocks), encoding="utf-8")
        print(f"subtitles -> {sub_out}")
    return EXIT_OK


def cmd_build(args) -> int:
    stoplist = _stoplist(args)
    timeline = exports.timeline_from_json(
        _require(args.timeline, "timeline JSON").read_text(encoding="utf-8")
    )
    entities = annotations.EntityDictionary.from_json_file(
        _require(args.entities, "entities JSON")
    ) if args.entities else annotations.EntityDictionary()
    faces, caption_obs = annotations.load_annotations(
        _require(args.faces, "faces JSON"), _require(args.captions, "captions JSON")
    )

    emitted = timeline.scenes
    if args.scenes:
        _, stored = exports.scenes_from_json(
            _require(args.scenes, "scenes JSON").read_text(encoding="utf-8")
        )
        emitted_indices = {s.index for s in emitted if s.kind is not script_parser.SceneKind.META}
        conversations = [c for c in stored if c.scene_index in emitted_indices]
    else:
        conversations = [
            conv
            for scene in emitted
            for conv in script_parser.detect_conversations(scene)
        ]
    annotations.assign_keywords(emitted, conversations, entities, stoplist, top_k=args.keyword_top)
    conversations = annotations.canonicalize_conversations(conversations, entities)
    result = annotations.bundle_by_scene(timeline, faces, caption_obs, entities, conversations)
    captions.select_scene_captions(
        result.bundles, stoplist, k=args.caption_top, raw_sentences=args.raw_caption_sentences
    )
    g = graph.build(result.bundles, conversations, include_mentions=args.mention_presence)
    g.validate()
    out = _out_path(args.out)
    out.write_text(exports.graph_to_json(g), encoding="utf-8")
    print(
        f"graph: {g.node_count} nodes, {g.edge_count} edges "
        f"({result.dropped} observations outside scene intervals) -> {out}"
    )
    return EXIT_OK


def cmd_analyze(args) -> int:
    g = exports.graph_from_json(_require(args.graph_file, "graph JSON").read_text(encoding="utf-8"))
    view = _select_view(g, args)
    if view.node_count == 0:
        raise ValidationError("selected view has no nodes")
    entries = metrics.influence_scores(view, tol=args.eigen_tol)
    if args.top:
        entries = entries[: args.top]
    out = _out_path(args.out)
    out.write_text(exports.influence_to_csv(entries, seed=args.seed), encoding="utf-8")
    print(f"influence ranking ({len(entries)} rows) -> {out}")
    if args.stats:
        stats_out = _out_path(args.stats)
        stats_out.write_text(exports.topology_to_json(metrics.topology(view)), encoding="utf-8")
        print(f"topology stats -> {stats_out}")
    return EXIT_OK


def cmd_communities(args) -> int:
    g = exports.graph_from_json(_require(args.graph_file, "graph JSON").read_text(encoding="utf-8"))
    view = _select_view(g, args)
    if view.node_count == 0:
        raise ValidationError("selected view has no nodes")
    partition = communities.louvain(view, resolution=args.resolution, seed=args.seed)
    out = _out_path(args.out)
    out.write_text(exports.partition_to_json(view, partition, seed=args.seed), encoding="utf-8")
    report = communities.community_report(view, partition)
    print(
        f"{report['community_count']} communities, modularity {report['modularity']:.4f} -> {out}"
    )
    if args.report:
        report_out = _out_path(args.report)
        report_out.write_text(exports._dump(report), encoding="utf-8")
        print(f"community report -> {report_out}")
    return EXIT_OK


def cmd_export(args) -> int:
    g = exports.graph_from_json(_require(args.graph_file, "graph JSON").read_text(encoding="utf-8"))
    fmt = args.format
    out = _out_path(args.out)
    if fmt == "gexf":
        out.write_text(exports.to_gexf(g, seed=args.seed), encoding="utf-8")
    elif fmt == "graphml":
        out.write_text(exports.to_graphml(g, seed=args.seed), encoding="utf-8")
    elif fmt == "json":
        out.write_text(exports.graph_to_json(g, seed=args.seed), encoding="utf-8")
    elif fmt == "csv":
        exports.to_csv_dir(g, out, seed=args.seed)
    else:
        raise ValidationError(f"unknown export format {fmt!r}")
    print(f"exported {fmt} -> {out}")
    return EXIT_OK


def cmd_import(args) -> int:
    g = exports.import_released_dataset(_require(args.path, "dataset file"))
    per_layer = {
        layer.value: len(g.layer_nodes(layer)) for layer in graph.LayerKind
    }
    out = _out_path(args.out)
    out.write_text(exports.graph_to_json(g), encoding="utf-8")
    print(
        f"imported {g.node_count} nodes / {g.edge_count} edges; per layer: "
        + ", ".join(f"{k}={v}" for k, v in per_layer.items())
        + f" -> {out}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _ConfigArgumentParser(
        prog="movielayers",
        description="Multilayer narrative networks from scripts, subtitles, and annotations.",
        fromfile_prefix_chars="@",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="chunk a screenplay into scenes JSON")
    p.add_argument("--script", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scene-level-conversations", action="store_true")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("align", help="match scenes to subtitles and build the timeline")
    p.add_argument("--scenes", required=True)
    p.add_argument("--srt", required=True, help=".srt file or subtitles JSON")
    p.add_argument("--shots", default=None)
    p.add_argument("--cosine-threshold", type=float, default=aligner.DEFAULT_COSINE_THRESHOLD)
    p.add_argument("--out", required=True)
    p.add_argument("--subtitles-out", default=None)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("build", help="construct the multilayer graph")
    p.add_argument("--timeline", required=True)
    p.add_argument("--scenes", default=None,
                   help="scenes JSON from `parse`; reuses its conversations")
    p.add_argument("--faces", required=True)
    p.add_argument("--captions", required=True)
    p.add_argument("--entities", default=None)
    p.add_argument("--stopwords", default=None)
    p.add_argument("--caption-top", type=int, default=captions.DEFAULT_TOP_K)
    p.add_argument("--keyword-top", type=int, default=annotations.DEFAULT_KEYWORD_TOP_K)
    p.add_argument("--mention-presence", action="store_true",
                   help="count emphasized description mentions as scene presence")
    p.add_argument("--raw-caption-sentences", action="store_true",
                   help="score captions on raw sentences rather than sorted word bags")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("analyze", help="centralities and influence ranking")
    p.add_argument("graph_file", help="graph JSON path")
    p.add_argument("--layer", default=None, help="edge family view, e.g. CC or CK")
    p.add_argument("--graph", choices=GRAPH_VIEWS, default=None,
                   help="whole-graph view: ALL or ALL_MINUS_CAPTIONS")
    p.add_argument("--top", type=int, default=None)
    p.add_argument("--eigen-tol", type=float, default=metrics.DEFAULT_EIGEN_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--stats", default=None, help="also write topology stats JSON here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("communities", help="Louvain communities and modularity")
    p.add_argument("graph_file", help="graph JSON path")
    p.add_argument("--layer", default=None)
    p.add_argument("--graph", choices=GRAPH_VIEWS, default=None)
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("export", help="write GEXF/GraphML/CSV/JSON")
    p.add_argument("graph_file", help="graph JSON path")
    p.add_argument("--format", choices=("gexf", "graphml", "csv", "json"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import", help="import a released layer-tagged network")
    p.add_argument("--path", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_import)

    return parser


_ERROR_CODES = [
    (MissingInputError, EXIT_MISSING_INPUT, "missing-input"),
    ((ValidationError, ConfigurationError, ImportFormatError), EXIT_SCHEMA, "schema"),
    (AlignmentError, EXIT_ALIGNMENT, "alignment"),
    ((ScriptParseError, SrtParseError), EXIT_PARSE, "parse"),
]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except MovielayersError as exc:
        for types, code, kind in _ERROR_CODES:
            if isinstance(exc, types):
                print(f"movielayers-error code={code} kind={kind} msg={exc}", file=sys.stderr)
                return code
        print(f"movielayers-error code={EXIT_ERROR} kind=internal msg={exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
