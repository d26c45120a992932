"""Ingest externally produced visual annotations and bucket them into scenes.

Face and caption observations arrive as JSON produced by upstream detectors;
entity dictionaries stand in for the manual curation of names, locations, and
keyword noise.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import textkit
from .aligner import Timeline
from .errors import ValidationError
from .script_parser import Conversation, Scene

DEFAULT_KEYWORD_TOP_K = 10


@dataclass(frozen=True)
class FaceObservation:
    time_ms: int
    bbox: tuple[float, float, float, float]
    identity: str


@dataclass(frozen=True)
class CaptionObservation:
    time_ms: int
    bbox: tuple[float, float, float, float]
    sentence: str
    confidence: float


@dataclass(frozen=True)
class EntityDictionary:
    characters: dict[str, str] = field(default_factory=dict)
    locations: dict[str, str] = field(default_factory=dict)
    keyword_blocklist: frozenset[str] = frozenset()
    keyword_allowlist: frozenset[str] | None = None

    def __post_init__(self):
        for name, alias_map in (("characters", self.characters), ("locations", self.locations)):
            for alias, canonical in alias_map.items():
                target = alias_map.get(canonical, canonical)
                if target != canonical:
                    raise ValidationError(
                        f"{name} alias map is not idempotent: {alias!r} -> {canonical!r} -> {target!r}"
                    )

    @classmethod
    def from_json_file(cls, path: str | Path) -> "EntityDictionary":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        allow = data.get("keyword_allowlist")
        return cls(
            characters={k.upper(): v.upper() for k, v in data.get("characters", {}).items()},
            locations={k.upper(): v.upper() for k, v in data.get("locations", {}).items()},
            keyword_blocklist=frozenset(t.lower() for t in data.get("keyword_blocklist", [])),
            keyword_allowlist=frozenset(t.lower() for t in allow) if allow is not None else None,
        )


def canonicalize(name: str, entities: EntityDictionary, kind: str = "characters") -> str:
    """Alias-map lookup on the uppercased name; unknown names pass through."""
    key = name.strip().upper()
    alias_map = entities.characters if kind == "characters" else entities.locations
    return alias_map.get(key, key)


def _load_observations(path: str | Path, kind: str):
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise ValidationError(f"{kind} file must contain a JSON array: {path}")
    out = []
    for i, rec in enumerate(data):
        try:
            time_ms = int(rec["time_ms"])
            bbox = tuple(float(v) for v in rec.get("bbox", (0, 0, 1, 1)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{kind} record {i} is malformed: {exc}") from exc
        if len(bbox) != 4:
            raise ValidationError(f"{kind} record {i}: bbox must have 4 entries")
        if kind == "faces":
            identity = str(rec.get("identity", "")).strip()
            if not identity:
                raise ValidationError(f"faces record {i}: identity must be non-empty")
            if bbox[2] <= 0 or bbox[3] <= 0:
                raise ValidationError(f"faces record {i}: bbox width/height must be positive")
            out.append(FaceObservation(time_ms=time_ms, bbox=bbox, identity=identity.upper()))
        else:
            confidence = float(rec.get("confidence", 0.0))
            if not 0.0 <= confidence <= 1.0:
                raise ValidationError(
                    f"captions record {i}: confidence {confidence} outside [0, 1]"
                )
            out.append(
                CaptionObservation(
                    time_ms=time_ms,
                    bbox=bbox,
                    sentence=str(rec.get("sentence", "")),
                    confidence=confidence,
                )
            )
    out.sort(key=lambda o: o.time_ms)
    return out


def load_annotations(
    faces_path: str | Path, captions_path: str | Path
) -> tuple[list[FaceObservation], list[CaptionObservation]]:
    """Load and validate both observation files, time-sorted."""
    return _load_observations(faces_path, "faces"), _load_observations(captions_path, "captions")


# ---------------------------------------------------------------------------
# Keyword extraction
# ---------------------------------------------------------------------------


def _keyword_filters(entities: EntityDictionary) -> tuple[set[str], set[str] | None]:
    blocked = {textkit.stem(t) for t in entities.keyword_blocklist}
    allowed = (
        {textkit.stem(t) for t in entities.keyword_allowlist}
        if entities.keyword_allowlist is not None
        else None
    )
    return blocked, allowed


def _top_terms(vec: textkit.TermVector, blocked, allowed, top_k: int) -> list[str]:
    ranked = sorted(vec.items(), key=lambda kv: (-kv[1], kv[0]))
    out = []
    for term, _ in ranked:
        if term in blocked:
            continue
        if allowed is not None and term not in allowed:
            continue
        out.append(term)
        if len(out) >= top_k:
            break
    return out


def extract_keywords(
    text: str,
    corpus: Sequence[str],
    entities: EntityDictionary,
    stoplist: textkit.Stoplist | None = None,
    top_k: int = DEFAULT_KEYWORD_TOP_K,
) -> list[str]:
    """Rank a conversation's stemmed terms by tf-idf against the corpus.

    Stopwords and blocklisted terms are removed; an allowlist, when present,
    filters further. Returns at most top_k terms, best first.
    """
    if not corpus:
        raise ValueError("keyword extraction requires a non-empty corpus")
    stoplist = stoplist or textkit.Stoplist.default()
    docs = list(corpus)
    try:
        idx = docs.index(text)
    except ValueError:
        docs.append(text)
        idx = len(docs) - 1
    streams = [textkit.remove_stopwords(textkit.normalize(d), stoplist) for d in docs]
    vectors = textkit.tfidf_vectors(streams)
    blocked, allowed = _keyword_filters(entities)
    return _top_terms(vectors[idx], blocked, allowed, top_k)


def assign_keywords(
    scenes: Sequence[Scene],
    conversations: Sequence[Conversation],
    entities: EntityDictionary,
    stoplist: textkit.Stoplist | None = None,
    top_k: int = DEFAULT_KEYWORD_TOP_K,
) -> None:
    """Populate each conversation's keywords and per-speaker term map in place."""
    if not conversations:
        return
    stoplist = stoplist or textkit.Stoplist.default()
    scene_by_index = {s.index: s for s in scenes}
    texts = []
    for conv in conversations:
        scene = scene_by_index[conv.scene_index]
        utts = [scene.utterances[i] for i in conv.utterance_indices]
        texts.append(" ".join(u.text for u in utts))
    streams = [textkit.remove_stopwords(textkit.normalize(t), stoplist) for t in texts]
    vectors = textkit.tfidf_vectors(streams)
    blocked, allowed = _keyword_filters(entities)
    for conv, vec in zip(conversations, vectors):
        conv.keywords = _top_terms(vec, blocked, allowed, top_k)
        conv.speaker_terms = {}
        scene = scene_by_index[conv.scene_index]
        kw = set(conv.keywords)
        for i in conv.utterance_indices:
            utt = scene.utterances[i]
            present = kw & set(textkit.normalize(utt.text).tokens)
            if present:
                conv.speaker_terms.setdefault(utt.speaker, set()).update(present)


def canonicalize_conversations(
    conversations: Sequence[Conversation], entities: EntityDictionary
) -> list[Conversation]:
    """Rewrite participants and speaker-term keys to canonical character names.

    Conversations are detected from raw script speakers; the graph builder
    needs them under the same names as scene bundles or aliases split into
    duplicate nodes.
    """
    out = []
    for conv in conversations:
        speaker_terms: dict[str, set[str]] = {}
        for speaker, terms in conv.speaker_terms.items():
            canon = canonicalize(speaker, entities)
            speaker_terms.setdefault(canon, set()).update(terms)
        out.append(
            Conversation(
                scene_index=conv.scene_index,
                participants=frozenset(canonicalize(p, entities) for p in conv.participants),
                utterance_indices=conv.utterance_indices,
                keywords=list(conv.keywords),
                speaker_terms=speaker_terms,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Scene bundles
# ---------------------------------------------------------------------------


@dataclass
class SceneBundle:
    scene_index: int
    location: str | None
    speakers: frozenset[str]
    mentioned_characters: frozenset[str]
    faces: frozenset[str]
    captions: list[CaptionObservation]
    keywords: frozenset[str] = frozenset()
    kept_captions: tuple[str, ...] = ()

    @property
    def characters(self) -> frozenset[str]:
        return self.speakers | self.mentioned_characters


@dataclass
class BundleResult:
    bundles: list[SceneBundle]
    dropped: int


def bundle_by_scene(
    timeline: Timeline,
    faces: Sequence[FaceObservation],
    captions: Sequence[CaptionObservation],
    entities: EntityDictionary,
    conversations: Sequence[Conversation] = (),
) -> BundleResult:
    """Assign each observation to the scene whose interval contains its time.

    Scenes are scanned in timeline order and the first containing interval
    wins, so an observation on a shared boundary lands in the earlier scene.
    Observations outside every interval are dropped and counted.
    """
    scenes = timeline.scenes
    for s in scenes:
        if s.time_bounds is None:
            raise ValidationError(f"scene {s.index} has no time bounds; align first")

    starts = [s.time_bounds[0] for s in scenes]
    ends = [s.time_bounds[1] for s in scenes]
    if any(e1 > s2 for e1, s2 in zip(ends, starts[1:])):
        raise ValidationError("timeline intervals overlap; cannot bucket observations")

    def locate(t: int) -> int | None:
        # earliest interval whose end reaches t; ends are non-decreasing
        i = bisect.bisect_left(ends, t)
        if i < len(scenes) and starts[i] <= t:
            return i
        return None

    conv_by_scene: dict[int, list[Conversation]] = {}
    for conv in conversations:
        conv_by_scene.setdefault(conv.scene_index, []).append(conv)

    face_sets: list[set[str]] = [set() for _ in scenes]
    caption_lists: list[list[CaptionObservation]] = [[] for _ in scenes]
    dropped = 0
    for obs in faces:
        pos = locate(obs.time_ms)
        if pos is None:
            dropped += 1
        else:
            face_sets[pos].add(canonicalize(obs.identity, entities))
    for obs in captions:
        pos = locate(obs.time_ms)
        if pos is None:
            dropped += 1
        else:
            caption_lists[pos].append(obs)

    known = set(entities.characters) | set(entities.characters.values())
    bundles = []
    for i, scene in enumerate(scenes):
        speakers = frozenset(canonicalize(u.speaker, entities) for u in scene.utterances)
        mentioned = frozenset(
            canonicalize(term, entities)
            for term in scene.emphasized_terms
            if term.upper() in known
        )
        location = (
            canonicalize(scene.heading.location, entities, kind="locations")
            if scene.heading
            else None
        )
        keywords = frozenset(
            kw for conv in conv_by_scene.get(scene.index, []) for kw in conv.keywords
        )
        bundles.append(
            SceneBundle(
                scene_index=scene.index,
                location=location,
                speakers=speakers,
                mentioned_characters=mentioned,
                faces=frozenset(face_sets[i]),
                captions=caption_lists[i],
                keywords=keywords,
            )
        )
    return BundleResult(bundles=bundles, dropped=dropped)
