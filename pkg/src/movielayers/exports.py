"""File formats: scenes/timeline/graph/partition JSON, influence CSV, GEXF/GraphML.

Every exporter is deterministic (stable ordering, no timestamps) so reports
are byte-identical across runs with the same inputs and seed; the seed is
recorded in each output's header. Each exporter round-trips through its
matching importer.
"""

from __future__ import annotations

import csv
import io
import json
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Sequence

from .aligner import AlignmentStats, MatchMethod, Timeline, UtteranceMatch
from .communities import Partition
from .errors import ImportFormatError
from .graph import LayerKind, MultilayerGraph, NodeRef, node_key
from .metrics import InfluenceEntry, TopologyStats
from .script_parser import Conversation, Scene, SceneHeading, SceneKind, Setting, Utterance
from .subtitle_parser import SubtitleBlock

TOOL_NAME = "movielayers"

_LAYER_ALIASES = {
    "c": LayerKind.CHARACTER,
    "character": LayerKind.CHARACTER,
    "characters": LayerKind.CHARACTER,
    "l": LayerKind.LOCATION,
    "location": LayerKind.LOCATION,
    "locations": LayerKind.LOCATION,
    "k": LayerKind.KEYWORD,
    "keyword": LayerKind.KEYWORD,
    "keywords": LayerKind.KEYWORD,
    "f": LayerKind.FACE,
    "face": LayerKind.FACE,
    "faces": LayerKind.FACE,
    "ca": LayerKind.CAPTION,
    "caption": LayerKind.CAPTION,
    "captions": LayerKind.CAPTION,
}


def parse_layer_tag(tag: str) -> LayerKind:
    try:
        return _LAYER_ALIASES[str(tag).strip().lower()]
    except KeyError:
        raise ImportFormatError(f"unknown layer tag {tag!r}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Scenes and conversations
# ---------------------------------------------------------------------------


def _scene_record(scene: Scene) -> dict:
    heading = None
    if scene.heading is not None:
        heading = {
            "setting": scene.heading.setting.value,
            "location": scene.heading.location,
            "time_of_day": scene.heading.time_of_day,
            "raw": scene.heading.raw,
        }
    return {
        "index": scene.index,
        "heading": heading,
        "description": scene.description,
        "emphasized_terms": sorted(scene.emphasized_terms),
        "utterances": [
            {
                "speaker": u.speaker,
                "text": u.text,
                "index_in_scene": u.index_in_scene,
                "preceded_by_description": u.preceded_by_description,
            }
            for u in scene.utterances
        ],
        "time_bounds": list(scene.time_bounds) if scene.time_bounds else None,
        "kind": scene.kind.value if scene.kind else None,
        "regrouped": list(scene.regrouped),
    }


def _scene_from_record(rec: dict) -> Scene:
    heading = None
    if rec.get("heading"):
        h = rec["heading"]
        heading = SceneHeading(
            setting=Setting(h["setting"]),
            location=h["location"],
            time_of_day=h.get("time_of_day"),
            raw=h.get("raw", ""),
        )
    utterances = [
        Utterance(
            speaker=u["speaker"],
            text=u["text"],
            index_in_scene=u["index_in_scene"],
            preceded_by_description=u.get("preceded_by_description", False),
        )
        for u in rec.get("utterances", [])
    ]
    bounds = rec.get("time_bounds")
    return Scene(
        index=rec["index"],
        heading=heading,
        description=rec.get("description", ""),
        utterances=utterances,
        emphasized_terms=frozenset(rec.get("emphasized_terms", [])),
        time_bounds=tuple(bounds) if bounds else None,
        kind=SceneKind(rec["kind"]) if rec.get("kind") else None,
        regrouped=tuple(rec.get("regrouped", [])),
    )


def scenes_to_json(scenes: Sequence[Scene], conversations: Sequence[Conversation] = ()) -> str:
    return _dump(
        {
            "meta": {"tool": TOOL_NAME},
            "scenes": [_scene_record(s) for s in scenes],
            "conversations": [
                {
                    "scene_index": c.scene_index,
                    "participants": sorted(c.participants),
                    "utterance_indices": list(c.utterance_indices),
                    "keywords": list(c.keywords),
                    "speaker_terms": {k: sorted(v) for k, v in sorted(c.speaker_terms.items())},
                }
                for c in conversations
            ],
        }
    )


def scenes_from_json(text: str) -> tuple[list[Scene], list[Conversation]]:
    data = json.loads(text)
    scenes = [_scene_from_record(r) for r in data["scenes"]]
    conversations = [
        Conversation(
            scene_index=c["scene_index"],
            participants=frozenset(c["participants"]),
            utterance_indices=tuple(c["utterance_indices"]),
            keywords=list(c.get("keywords", [])),
            speaker_terms={k: set(v) for k, v in c.get("speaker_terms", {}).items()},
        )
        for c in data.get("conversations", [])
    ]
    return scenes, conversations


# ---------------------------------------------------------------------------
# Subtitles and timeline
# ---------------------------------------------------------------------------


def subtitles_to_json(blocks: Sequence[SubtitleBlock]) -> str:
    return _dump(
        {
            "meta": {"tool": TOOL_NAME},
            "blocks": [
                {"index": b.index, "start_ms": b.start_ms, "end_ms": b.end_ms, "lines": list(b.lines)}
                for b in blocks
            ],
        }
    )


def subtitles_from_json(text: str) -> list[SubtitleBlock]:
    data = json.loads(text)
    return [
        SubtitleBlock(
            index=b["index"], start_ms=b["start_ms"], end_ms=b["end_ms"], lines=tuple(b["lines"])
        )
        for b in data["blocks"]
    ]


def timeline_to_json(timeline: Timeline) -> str:
    s = timeline.stats
    return _dump(
        {
            "meta": {"tool": TOOL_NAME, "movie_end_ms": timeline.movie_end_ms},
            "stats": {
                "matched": s.matched,
                "boundary_retrieved": s.boundary_retrieved,
                "boundary_retrieved_empty": s.boundary_retrieved_empty,
                "meta": s.meta,
                "meta_empty": s.meta_empty,
                "total": s.total,
                "total_empty": s.empty,
            },
            "scenes": [_scene_record(sc) for sc in timeline.scenes],
            "matches": [
                {
                    "scene_index": m.scene_index,
                    "utterance_index": m.utterance_index,
                    "subtitle_indices": list(m.subtitle_indices),
                    "method": m.method.value,
                    "score": m.score,
                }
                for m in timeline.matches
            ],
        }
    )


def timeline_from_json(text: str) -> Timeline:
    data = json.loads(text)
    st = data["stats"]
    stats = AlignmentStats(
        matched=st["matched"],
        boundary_retrieved=st["boundary_retrieved"],
        boundary_retrieved_empty=st["boundary_retrieved_empty"],
        meta=st["meta"],
        meta_empty=st["meta_empty"],
    )
    matches = [
        UtteranceMatch(
            scene_index=m["scene_index"],
            utterance_index=m["utterance_index"],
            subtitle_indices=tuple(m["subtitle_indices"]),
            method=MatchMethod(m["method"]),
            score=m["score"],
        )
        for m in data.get("matches", [])
    ]
    return Timeline(
        scenes=[_scene_from_record(r) for r in data["scenes"]],
        matches=matches,
        stats=stats,
        movie_end_ms=data["meta"]["movie_end_ms"],
    )


# ---------------------------------------------------------------------------
# Graph JSON
# ---------------------------------------------------------------------------


def graph_to_json(g: MultilayerGraph, seed: int | None = None) -> str:
    nodes = sorted(g.nodes, key=node_key)
    index = {n: i for i, n in enumerate(nodes)}
    edges = sorted(
        (
            {"a": index[a], "b": index[b], "family": fam.name, "scenes": sorted(scenes)}
            for a, b, fam, scenes in g.edges()
        ),
        key=lambda e: (e["a"], e["b"]),
    )
    return _dump(
        {
            "meta": {"tool": TOOL_NAME, "seed": seed},
            "nodes": [{"layer": n.layer.value, "id": n.id} for n in nodes],
            "edges": edges,
        }
    )


def graph_from_json(text: str) -> MultilayerGraph:
    data = json.loads(text)
    if "nodes" not in data or "edges" not in data:
        raise ImportFormatError("graph JSON must contain 'nodes' and 'edges'")
    g = MultilayerGraph()
    refs = []
    for i, n in enumerate(data["nodes"]):
        if "layer" not in n:
            raise ImportFormatError(f"node {n.get('id', i)!r} is missing its layer tag")
        refs.append(g.add_node(parse_layer_tag(n["layer"]), str(n["id"])))
    for e in data["edges"]:
        a, b = refs[e["a"]], refs[e["b"]]
        scenes = e.get("scenes", [])
        if scenes:
            for s in scenes:
                g.add_edge(a, b, scene=s)
        else:
            g.add_edge(a, b)
    return g


# ---------------------------------------------------------------------------
# Influence CSV and topology JSON
# ---------------------------------------------------------------------------


def influence_to_csv(entries: Sequence[InfluenceEntry], seed: int | None = None) -> str:
    buf = io.StringIO()
    buf.write(f"# {TOOL_NAME} seed={seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["node", "layer", "degree", "betweenness", "eigen", "rank_deg", "rank_btw", "rank_eig", "influence"]
    )
    for e in entries:
        node = e.node
        name, layer = (node.id, node.layer.value) if isinstance(node, NodeRef) else (str(node), "")
        writer.writerow(
            [
                name,
                layer,
                e.degree,
                f"{e.betweenness:.4f}",
                f"{e.eigenvector:.4f}",
                f"{e.rank_degree:.2f}",
                f"{e.rank_betweenness:.2f}",
                f"{e.rank_eigenvector:.2f}",
                f"{e.influence:.2f}",
            ]
        )
    return buf.getvalue()


def topology_to_json(stats: TopologyStats) -> str:
    return _dump(
        {
            "node_count": stats.node_count,
            "edge_count": stats.edge_count,
            "density": stats.density,
            "diameter": stats.diameter,
            "avg_shortest_path": stats.avg_shortest_path,
            "avg_clustering": stats.avg_clustering,
            "degree_assortativity": stats.degree_assortativity,
            "assortativity_defined": stats.assortativity_defined,
            "connected_components": stats.connected_components,
        }
    )


def partition_to_json(g: MultilayerGraph, partition: Partition, seed: int | None = None) -> str:
    comms: dict[int, list[NodeRef]] = {}
    for node, c in partition.assignment.items():
        comms.setdefault(c, []).append(node)
    return _dump(
        {
            "meta": {"tool": TOOL_NAME, "seed": seed},
            "modularity": partition.modularity,
            "communities": [
                {
                    "id": c,
                    "members": [
                        {"layer": n.layer.value, "id": n.id}
                        for n in sorted(comms[c], key=node_key)
                    ],
                }
                for c in sorted(comms)
            ],
        }
    )


# ---------------------------------------------------------------------------
# GEXF / GraphML
# ---------------------------------------------------------------------------


def _node_xml_id(n: NodeRef) -> str:
    return f"{n.layer.value}::{n.id}"


def to_gexf(g: MultilayerGraph, seed: int | None = None) -> str:
    root = ET.Element("gexf", {"xmlns": "http://www.gexf.net/1.2draft", "version": "1.2"})
    meta = ET.SubElement(root, "meta")
    ET.SubElement(meta, "creator").text = TOOL_NAME
    ET.SubElement(meta, "description").text = f"seed={seed}"
    graph_el = ET.SubElement(root, "graph", {"defaultedgetype": "undirected"})
    nattrs = ET.SubElement(graph_el, "attributes", {"class": "node"})
    ET.SubElement(nattrs, "attribute", {"id": "layer", "title": "layer", "type": "string"})
    eattrs = ET.SubElement(graph_el, "attributes", {"class": "edge"})
    ET.SubElement(eattrs, "attribute", {"id": "family", "title": "family", "type": "string"})
    ET.SubElement(eattrs, "attribute", {"id": "scenes", "title": "scenes", "type": "string"})

    nodes_el = ET.SubElement(graph_el, "nodes")
    for n in sorted(g.nodes, key=node_key):
        node_el = ET.SubElement(nodes_el, "node", {"id": _node_xml_id(n), "label": n.id})
        av = ET.SubElement(node_el, "attvalues")
        ET.SubElement(av, "attvalue", {"for": "layer", "value": n.layer.value})
    edges_el = ET.SubElement(graph_el, "edges")
    ordered = sorted(g.edges(), key=lambda e: (node_key(e[0]), node_key(e[1])))
    for i, (a, b, fam, scenes) in enumerate(ordered):
        edge_el = ET.SubElement(
            edges_el,
            "edge",
            {"id": str(i), "source": _node_xml_id(a), "target": _node_xml_id(b)},
        )
        av = ET.SubElement(edge_el, "attvalues")
        ET.SubElement(av, "attvalue", {"for": "family", "value": fam.name})
        ET.SubElement(av, "attvalue", {"for": "scenes", "value": "|".join(map(str, sorted(scenes)))})
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def _local(tag: str) -> str:
    return tag.split("}")[-1]


def _iter_local(el, name: str):
    for child in el.iter():
        if _local(child.tag) == name:
            yield child


def from_gexf(text: str) -> MultilayerGraph:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ImportFormatError(f"not valid GEXF: {exc}") from exc
    g = MultilayerGraph()
    by_xml_id: dict[str, NodeRef] = {}
    for node_el in _iter_local(root, "node"):
        attrs = {
            av.get("for"): av.get("value")
            for av in _iter_local(node_el, "attvalue")
        }
        layer_tag = attrs.get("layer")
        if layer_tag is None:
            raise ImportFormatError(f"GEXF node {node_el.get('id')!r} is missing its layer tag")
        label = node_el.get("label") or node_el.get("id")
        ref = g.add_node(parse_layer_tag(layer_tag), label)
        by_xml_id[node_el.get("id")] = ref
    for edge_el in _iter_local(root, "edge"):
        src, dst = edge_el.get("source"), edge_el.get("target")
        if src not in by_xml_id or dst not in by_xml_id:
            raise ImportFormatError(f"GEXF edge references unknown node: {src!r} -> {dst!r}")
        attrs = {av.get("for"): av.get("value") for av in _iter_local(edge_el, "attvalue")}
        scenes = [int(x) for x in attrs.get("scenes", "").split("|") if x]
        a, b = by_xml_id[src], by_xml_id[dst]
        if scenes:
            for s in scenes:
                g.add_edge(a, b, scene=s)
        else:
            g.add_edge(a, b)
    return g


def to_graphml(g: MultilayerGraph, seed: int | None = None) -> str:
    root = ET.Element("graphml", {"xmlns": "http://graphml.graphdrawing.org/xmlns"})
    ET.SubElement(
        root, "key", {"id": "layer", "for": "node", "attr.name": "layer", "attr.type": "string"}
    )
    ET.SubElement(
        root, "key", {"id": "family", "for": "edge", "attr.name": "family", "attr.type": "string"}
    )
    ET.SubElement(
        root, "key", {"id": "scenes", "for": "edge", "attr.name": "scenes", "attr.type": "string"}
    )
    ET.SubElement(
        root, "key", {"id": "seed", "for": "graph", "attr.name": "seed", "attr.type": "string"}
    )
    graph_el = ET.SubElement(root, "graph", {"id": "G", "edgedefault": "undirected"})
    seed_el = ET.SubElement(graph_el, "data", {"key": "seed"})
    seed_el.text = str(seed)
    for n in sorted(g.nodes, key=node_key):
        node_el = ET.SubElement(graph_el, "node", {"id": _node_xml_id(n)})
        data = ET.SubElement(node_el, "data", {"key": "layer"})
        data.text = n.layer.value
    ordered = sorted(g.edges(), key=lambda e: (node_key(e[0]), node_key(e[1])))
    for a, b, fam, scenes in ordered:
        edge_el = ET.SubElement(
            graph_el, "edge", {"source": _node_xml_id(a), "target": _node_xml_id(b)}
        )
        fam_el = ET.SubElement(edge_el, "data", {"key": "family"})
        fam_el.text = fam.name
        sc_el = ET.SubElement(edge_el, "data", {"key": "scenes"})
        sc_el.text = "|".join(map(str, sorted(scenes)))
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def from_graphml(text: str) -> MultilayerGraph:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ImportFormatError(f"not valid GraphML: {exc}") from exc
    g = MultilayerGraph()
    by_xml_id: dict[str, NodeRef] = {}
    for node_el in _iter_local(root, "node"):
        data = {d.get("key"): (d.text or "") for d in _iter_local(node_el, "data")}
        if "layer" not in data:
            raise ImportFormatError(f"GraphML node {node_el.get('id')!r} is missing its layer tag")
        xml_id = node_el.get("id")
        label = xml_id.split("::", 1)[1] if "::" in xml_id else xml_id
        by_xml_id[xml_id] = g.add_node(parse_layer_tag(data["layer"]), label)
    for edge_el in _iter_local(root, "edge"):
        src, dst = edge_el.get("source"), edge_el.get("target")
        if src not in by_xml_id or dst not in by_xml_id:
            raise ImportFormatError(f"GraphML edge references unknown node: {src!r} -> {dst!r}")
        data = {d.get("key"): (d.text or "") for d in _iter_local(edge_el, "data")}
        scenes = [int(x) for x in data.get("scenes", "").split("|") if x]
        a, b = by_xml_id[src], by_xml_id[dst]
        if scenes:
            for s in scenes:
                g.add_edge(a, b, scene=s)
        else:
            g.add_edge(a, b)
    return g


# ---------------------------------------------------------------------------
# CSV pair (nodes.csv + edges.csv in a directory)
# ---------------------------------------------------------------------------


def to_csv_dir(g: MultilayerGraph, out_dir: str | Path, seed: int | None = None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "nodes.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {TOOL_NAME} seed={seed}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["layer", "id"])
        for n in sorted(g.nodes, key=node_key):
            writer.writerow([n.layer.value, n.id])
    with open(out / "edges.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {TOOL_NAME} seed={seed}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["layer_a", "id_a", "layer_b", "id_b", "family", "scenes"])
        ordered = sorted(g.edges(), key=lambda e: (node_key(e[0]), node_key(e[1])))
        for a, b, fam, scenes in ordered:
            writer.writerow(
                [a.layer.value, a.id, b.layer.value, b.id, fam.name, "|".join(map(str, sorted(scenes)))]
            )


def from_csv_dir(path: str | Path) -> MultilayerGraph:
    base = Path(path)
    nodes_file, edges_file = base / "nodes.csv", base / "edges.csv"
    if not nodes_file.is_file() or not edges_file.is_file():
        raise ImportFormatError(f"CSV import needs nodes.csv and edges.csv under {base}")
    g = MultilayerGraph()

    def rows(p: Path):
        with open(p, encoding="utf-8", newline="") as fh:
            filtered = (ln for ln in fh if not ln.startswith("#"))
            yield from csv.DictReader(filtered)

    for row in rows(nodes_file):
        if not row.get("layer"):
            raise ImportFormatError(f"CSV node {row.get('id')!r} is missing its layer tag")
        g.add_node(parse_layer_tag(row["layer"]), row["id"])
    for row in rows(edges_file):
        a = NodeRef(parse_layer_tag(row["layer_a"]), row["id_a"])
        b = NodeRef(parse_layer_tag(row["layer_b"]), row["id_b"])
        scenes = [int(x) for x in (row.get("scenes") or "").split("|") if x]
        if scenes:
            for s in scenes:
                g.add_edge(a, b, scene=s)
        else:
            g.add_edge(a, b)
    return g


# ---------------------------------------------------------------------------
# Released-dataset import adapter
# ---------------------------------------------------------------------------


def import_released_dataset(path: str | Path) -> MultilayerGraph:
    """Thin adapter for externally published layer-tagged networks.

    Accepts this package's graph JSON, a generic node-link JSON
    ({"nodes": [{"id", "layer"}], "links"/"edges": [{"source", "target"}]}),
    GEXF, GraphML, or a directory holding nodes.csv/edges.csv. Layer tags may
    be short codes or full names. Edge families are inferred from endpoint
    layers when absent.
    """
    p = Path(path)
    if p.is_dir():
        return from_csv_dir(p)
    text = p.read_text(encoding="utf-8")
    suffix = p.suffix.lower()
    if suffix == ".gexf":
        return from_gexf(text)
    if suffix == ".graphml":
        return from_graphml(text)
    data = json.loads(text)
    if isinstance(data, dict) and "edges" in data and data.get("edges") and isinstance(
        data["edges"][0], dict
    ) and "a" in data["edges"][0]:
        return graph_from_json(text)
    if isinstance(data, dict) and "nodes" in data:
        g = MultilayerGraph()
        refs: dict[str, NodeRef] = {}
        for i, n in enumerate(data["nodes"]):
            node_id = str(n.get("id", i))
            if "layer" not in n:
                raise ImportFormatError(f"node {node_id!r} is missing its layer tag")
            refs[node_id] = g.add_node(parse_layer_tag(n["layer"]), node_id)
        links = data.get("links", data.get("edges", []))
        for e in links:
            src, dst = str(e["source"]), str(e["target"])
            if src not in refs or dst not in refs:
                raise ImportFormatError(f"edge references unknown node: {src!r} -> {dst!r}")
            g.add_edge(refs[src], refs[dst])
        return g
    raise ImportFormatError(f"unrecognized graph file format: {p}")
