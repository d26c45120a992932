"""Five-layer multilayer network: typed nodes, 15 edge families, views.

Edges are undirected and unweighted; re-inducing an existing edge extends
its scene provenance instead of adding multiplicity. Every edge family is
determined by its endpoints' layers, which the graph enforces on insertion.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

from .annotations import SceneBundle
from .errors import BuildError
from .script_parser import Conversation


class LayerKind(Enum):
    CHARACTER = "C"
    LOCATION = "L"
    KEYWORD = "K"
    FACE = "F"
    CAPTION = "Ca"


class EdgeFamily(Enum):
    CC = ("C", "C")
    LL = ("L", "L")
    KK = ("K", "K")
    FF = ("F", "F")
    CACA = ("Ca", "Ca")
    CK = ("C", "K")
    CL = ("C", "L")
    CF = ("C", "F")
    CCA = ("C", "Ca")
    KL = ("K", "L")
    KF = ("K", "F")
    KCA = ("K", "Ca")
    LF = ("L", "F")
    LCA = ("L", "Ca")
    FCA = ("F", "Ca")

    @property
    def layers(self) -> frozenset[LayerKind]:
        return frozenset(LayerKind(code) for code in self.value)

    @property
    def is_intra(self) -> bool:
        return self.value[0] == self.value[1]


_FAMILY_BY_LAYERS: dict[frozenset[LayerKind], EdgeFamily] = {
    fam.layers: fam for fam in EdgeFamily
}


def family_for(a: LayerKind, b: LayerKind) -> EdgeFamily:
    return _FAMILY_BY_LAYERS[frozenset((a, b))]


@dataclass(frozen=True)
class NodeRef:
    layer: LayerKind
    id: str


def node_key(n: NodeRef) -> tuple[str, str]:
    return (n.layer.value, n.id)


EdgeKey = tuple[NodeRef, NodeRef, EdgeFamily]


class MultilayerGraph:
    """Undirected typed graph; nodes keep insertion order, edges canonical order."""

    def __init__(self):
        self._nodes: dict[NodeRef, None] = {}
        self._edges: dict[tuple[NodeRef, NodeRef, EdgeFamily], list[int]] = {}

    # -- construction --------------------------------------------------

    def add_node(self, layer: LayerKind, node_id: str) -> NodeRef:
        if not node_id:
            raise BuildError("node id must be non-empty")
        ref = NodeRef(layer, node_id)
        self._nodes.setdefault(ref, None)
        return ref

    def add_edge(self, a: NodeRef, b: NodeRef, scene: int | None = None) -> None:
        if a == b:
            return  # self-loops carry no information for the target metrics
        family = family_for(a.layer, b.layer)
        if node_key(a) > node_key(b):
            a, b = b, a
        self._nodes.setdefault(a, None)
        self._nodes.setdefault(b, None)
        provenance = self._edges.setdefault((a, b, family), [])
        if scene is not None and scene not in provenance:
            provenance.append(scene)

    # -- inspection ------------------------------------------------------

    @property
    def nodes(self) -> list[NodeRef]:
        return list(self._nodes)

    def edges(self) -> Iterator[tuple[NodeRef, NodeRef, EdgeFamily, tuple[int, ...]]]:
        for (a, b, fam), scenes in self._edges.items():
            yield a, b, fam, tuple(scenes)

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def has_node(self, ref: NodeRef) -> bool:
        return ref in self._nodes

    def has_edge(self, a: NodeRef, b: NodeRef) -> bool:
        if node_key(a) > node_key(b):
            a, b = b, a
        return (a, b, family_for(a.layer, b.layer)) in self._edges

    def degree(self) -> dict[NodeRef, int]:
        deg = {n: 0 for n in self._nodes}
        for a, b, _ in self._edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def layer_nodes(self, layer: LayerKind) -> list[NodeRef]:
        return [n for n in self._nodes if n.layer is layer]

    def family_edge_count(self, family: EdgeFamily) -> int:
        return sum(1 for _, _, fam in self._edges if fam is family)

    # -- views -------------------------------------------------------------

    def layer_subgraph(self, family: EdgeFamily) -> "MultilayerGraph":
        """Nodes of the family's layer(s) plus only that family's edges.

        Isolated nodes of those layers are retained.
        """
        view = MultilayerGraph()
        wanted = family.layers
        for n in self._nodes:
            if n.layer in wanted:
                view._nodes[n] = None
        for (a, b, fam), scenes in self._edges.items():
            if fam is family:
                view._edges[(a, b, fam)] = list(scenes)
        return view

    def drop_layer(self, layer: LayerKind) -> "MultilayerGraph":
        """Remove a layer's nodes and every edge incident to them."""
        out = MultilayerGraph()
        for n in self._nodes:
            if n.layer is not layer:
                out._nodes[n] = None
        for (a, b, fam), scenes in self._edges.items():
            if a.layer is not layer and b.layer is not layer:
                out._edges[(a, b, fam)] = list(scenes)
        return out

    def copy(self) -> "MultilayerGraph":
        out = MultilayerGraph()
        out._nodes = dict(self._nodes)
        out._edges = {k: list(v) for k, v in self._edges.items()}
        return out

    def validate(self) -> None:
        """Full-scan consistency check of family/endpoint agreement."""
        for a, b, fam, _ in self.edges():
            if family_for(a.layer, b.layer) is not fam:
                raise BuildError(f"edge ({a.id}, {b.id}) family {fam.name} mismatches layers")
            if a == b:
                raise BuildError(f"self-loop on {a.id}")
            if a not in self._nodes or b not in self._nodes:
                raise BuildError(f"edge ({a.id}, {b.id}) references missing node")


# ---------------------------------------------------------------------------
# Construction from scene bundles
# ---------------------------------------------------------------------------


def build(
    bundles: Sequence[SceneBundle],
    conversations: Sequence[Conversation] = (),
    include_mentions: bool = False,
) -> MultilayerGraph:
    """Induce all 15 edge families from per-scene bundles and conversations.

    Characters present in a scene are its utterance speakers; emphasized
    description mentions join only when include_mentions is set (they inflate
    character-location and character-face edges otherwise).
    """
    g = MultilayerGraph()
    by_index = {b.scene_index: b for b in bundles}
    if len(by_index) != len(bundles):
        raise BuildError("duplicate scene indices in bundles")
    for conv in conversations:
        if conv.scene_index not in by_index:
            raise BuildError(f"conversation references unknown scene {conv.scene_index}")

    conv_by_scene: dict[int, list[Conversation]] = {}
    for conv in conversations:
        conv_by_scene.setdefault(conv.scene_index, []).append(conv)

    def characters_of(bundle: SceneBundle) -> list[str]:
        chars = set(bundle.speakers)
        if include_mentions:
            chars |= bundle.mentioned_characters
        return sorted(chars)

    # Nodes first so isolated entities are kept.
    for bundle in bundles:
        for c in characters_of(bundle):
            g.add_node(LayerKind.CHARACTER, c)
        if bundle.location:
            g.add_node(LayerKind.LOCATION, bundle.location)
        for k in sorted(bundle.keywords):
            g.add_node(LayerKind.KEYWORD, k)
        for f in sorted(bundle.faces):
            g.add_node(LayerKind.FACE, f)
        for ca in bundle.kept_captions:
            g.add_node(LayerKind.CAPTION, ca)

    # Location transitions: consecutive emitted scenes; scenes without a
    # location (meta scenes) are transparent; self-transitions skipped.
    last_location: str | None = None
    for bundle in bundles:
        loc = bundle.location
        if not loc:
            continue
        if last_location is not None and loc != last_location:
            g.add_edge(
                NodeRef(LayerKind.LOCATION, last_location),
                NodeRef(LayerKind.LOCATION, loc),
                scene=bundle.scene_index,
            )
        last_location = loc

    for bundle in bundles:
        si = bundle.scene_index
        chars = [NodeRef(LayerKind.CHARACTER, c) for c in characters_of(bundle)]
        faces = [NodeRef(LayerKind.FACE, f) for f in sorted(bundle.faces)]
        caps = [NodeRef(LayerKind.CAPTION, ca) for ca in bundle.kept_captions]
        kws = [NodeRef(LayerKind.KEYWORD, k) for k in sorted(bundle.keywords)]
        loc = NodeRef(LayerKind.LOCATION, bundle.location) if bundle.location else None

        for conv in conv_by_scene.get(si, ()):
            participants = sorted(conv.participants)
            for i in range(len(participants)):
                for j in range(i + 1, len(participants)):
                    g.add_edge(
                        NodeRef(LayerKind.CHARACTER, participants[i]),
                        NodeRef(LayerKind.CHARACTER, participants[j]),
                        scene=si,
                    )
            ckws = sorted(set(conv.keywords))
            for i in range(len(ckws)):
                for j in range(i + 1, len(ckws)):
                    g.add_edge(
                        NodeRef(LayerKind.KEYWORD, ckws[i]),
                        NodeRef(LayerKind.KEYWORD, ckws[j]),
                        scene=si,
                    )
            for speaker in sorted(conv.speaker_terms):
                for term in sorted(conv.speaker_terms[speaker]):
                    g.add_edge(
                        NodeRef(LayerKind.CHARACTER, speaker),
                        NodeRef(LayerKind.KEYWORD, term),
                        scene=si,
                    )
            if loc is not None:
                for k in ckws:
                    g.add_edge(NodeRef(LayerKind.KEYWORD, k), loc, scene=si)

        for i in range(len(faces)):
            for j in range(i + 1, len(faces)):
                g.add_edge(faces[i], faces[j], scene=si)
        for i in range(len(caps)):
            for j in range(i + 1, len(caps)):
                g.add_edge(caps[i], caps[j], scene=si)

        for c in chars:
            if loc is not None:
                g.add_edge(c, loc, scene=si)
            for f in faces:
                g.add_edge(c, f, scene=si)
            for ca in caps:
                g.add_edge(c, ca, scene=si)
        for k in kws:
            for f in faces:
                g.add_edge(k, f, scene=si)
            for ca in caps:
                g.add_edge(k, ca, scene=si)
        if loc is not None:
            for f in faces:
                g.add_edge(loc, f, scene=si)
            for ca in caps:
                g.add_edge(loc, ca, scene=si)
        for f in faces:
            for ca in caps:
                g.add_edge(f, ca, scene=si)

    return g
