"""Multilayer narrative networks from movie scripts, subtitles, and annotations.

The pipeline: parse a screenplay into scenes and conversations, parse the
subtitle file, align the two to put scenes on the movie clock, bucket face
and caption annotations into scenes, build the five-layer graph, then analyze
it (topology, influence ranking, communities) and export reports.
"""

__version__ = "0.1.0"

from .aligner import Timeline, UtteranceMatch, align
from .annotations import EntityDictionary, SceneBundle, bundle_by_scene, load_annotations
from .graph import EdgeFamily, LayerKind, MultilayerGraph, NodeRef, build
from .metrics import influence_from_metrics, influence_scores, topology
from .communities import Partition, louvain, modularity
from .script_parser import Scene, chunk_scenes, detect_conversations
from .subtitle_parser import SubtitleBlock, parse_srt
from .textkit import Stoplist, TokenStream, cosine, normalize, tfidf_vectors

__all__ = [
    "Timeline",
    "UtteranceMatch",
    "align",
    "EntityDictionary",
    "SceneBundle",
    "bundle_by_scene",
    "load_annotations",
    "EdgeFamily",
    "LayerKind",
    "MultilayerGraph",
    "NodeRef",
    "build",
    "influence_from_metrics",
    "influence_scores",
    "topology",
    "Partition",
    "louvain",
    "modularity",
    "Scene",
    "chunk_scenes",
    "detect_conversations",
    "SubtitleBlock",
    "parse_srt",
    "Stoplist",
    "TokenStream",
    "cosine",
    "normalize",
    "tfidf_vectors",
    "__version__",
]
