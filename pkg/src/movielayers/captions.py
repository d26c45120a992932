"""Caption scoring and reduction for cross-scene matching.

Generated captions repeat heavily across consecutive keyframes, so scenes
rank them with a confidence-weighted tf-idf and keep only the best. Each
sentence is further reduced to sorted 4-gram word bags so permutations of the
same phrase compare equal between scenes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import textkit
from .annotations import CaptionObservation, SceneBundle
from .errors import ValidationError

DEFAULT_TOP_K = 40
NGRAM_SIZE = 4
MAX_STOPWORDS_PER_GRAM = 1


@dataclass(frozen=True)
class CaptionTerm:
    """A sorted bag of <= 4 unique lowercase words with at most one stopword."""

    bag: tuple[str, ...]

    @property
    def display(self) -> str:
        return ",".join(self.bag)


@dataclass(frozen=True)
class SceneCaptionScore:
    scene_index: int
    caption: str
    tf: float
    idf: float

    @property
    def tfidf(self) -> float:
        return self.tf * self.idf


def caption_terms(sentence: str, stopwords: Iterable[str]) -> frozenset[CaptionTerm]:
    """Sliding 4-grams over lowercase tokens, reduced to sorted unique-word bags.

    Windows containing two or more stopwords are discarded; duplicate bags
    collapse. Sentences shorter than the window yield nothing.
    """
    stopset = stopwords.raw if isinstance(stopwords, textkit.Stoplist) else frozenset(stopwords)
    words = [w for w, _, _ in textkit.tokenize(sentence)]
    terms = set()
    for i in range(len(words) - NGRAM_SIZE + 1):
        window = words[i : i + NGRAM_SIZE]
        if sum(1 for w in window if w in stopset) > MAX_STOPWORDS_PER_GRAM:
            continue
        terms.add(CaptionTerm(bag=tuple(sorted(set(window)))))
    return frozenset(terms)


# ---------------------------------------------------------------------------
# Confidence-weighted tf / idf
# ---------------------------------------------------------------------------
# A "scene" here is a mapping frame-time -> [(caption identity, confidence)].
# Caption identity defaults to the sorted-bag display string so near-duplicate
# generated sentences aggregate; raw-sentence mode keeps the sentence itself.

SceneFrames = Mapping[int, Sequence[tuple[str, float]]]


def scene_frames(
    observations: Sequence[CaptionObservation],
    stopwords: Iterable[str],
    raw_sentences: bool = False,
) -> dict[int, list[tuple[str, float]]]:
    """Group observations by keyframe time under the chosen caption identity."""
    frames: dict[int, dict[str, float]] = {}
    for obs in observations:
        frame = frames.setdefault(obs.time_ms, {})
        if raw_sentences:
            idents: Iterable[str] = [obs.sentence.strip().lower()]
        else:
            idents = [t.display for t in caption_terms(obs.sentence, stopwords)]
        for ident in idents:
            if ident:
                frame[ident] = frame.get(ident, 0.0) + obs.confidence
    return {t: sorted(d.items()) for t, d in frames.items()}


def caption_tf(caption: str, frames: SceneFrames) -> float:
    """Weighted frequency of one caption within a scene's frames."""
    total = sum(w for pairs in frames.values() for _, w in pairs)
    if total <= 0.0:
        raise ValidationError("scene has zero total caption confidence; tf undefined")
    mine = sum(w for pairs in frames.values() for ident, w in pairs if ident == caption)
    return mine / total


def caption_idf(caption: str, all_scenes: Sequence[SceneFrames]) -> float:
    """Inverse scene frequency, natural log over scenes that carry captions."""
    containing = sum(
        1
        for frames in all_scenes
        if any(ident == caption for pairs in frames.values() for ident, _ in pairs)
    )
    if containing == 0:
        raise ValidationError(f"caption {caption!r} occurs in no scene")
    return math.log(len(all_scenes) / containing)


def score_scene(
    scene_index: int, frames: SceneFrames, all_scenes: Sequence[SceneFrames]
) -> list[SceneCaptionScore]:
    """tf-idf scores for every caption identity present in a scene."""
    total = sum(w for pairs in frames.values() for _, w in pairs)
    if total <= 0.0:
        return []
    weight: dict[str, float] = {}
    for pairs in frames.values():
        for ident, w in pairs:
            weight[ident] = weight.get(ident, 0.0) + w
    scene_counts: dict[str, int] = {}
    for other in all_scenes:
        idents = {ident for pairs in other.values() for ident, _ in pairs}
        for ident in idents:
            scene_counts[ident] = scene_counts.get(ident, 0) + 1
    n = len(all_scenes)
    return [
        SceneCaptionScore(
            scene_index=scene_index,
            caption=ident,
            tf=w / total,
            idf=math.log(n / scene_counts[ident]),
        )
        for ident, w in sorted(weight.items())
    ]


def top_captions(scores: Sequence[SceneCaptionScore], k: int = DEFAULT_TOP_K) -> list[SceneCaptionScore]:
    """Keep the k best captions by tf-idf; ties break by tf, then caption text."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ordered = sorted(scores, key=lambda s: (-s.tfidf, -s.tf, s.caption))
    return ordered[:k]


def select_scene_captions(
    bundles: Sequence[SceneBundle],
    stopwords: Iterable[str],
    k: int = DEFAULT_TOP_K,
    raw_sentences: bool = False,
) -> None:
    """Fill each bundle's kept_captions with its top-k caption identities."""
    frames_per_bundle = [
        scene_frames(b.captions, stopwords, raw_sentences=raw_sentences) for b in bundles
    ]
    scored_scenes = [f for f in frames_per_bundle if f]
    for bundle, frames in zip(bundles, frames_per_bundle):
        if not frames:
            bundle.kept_captions = ()
            continue
        scores = score_scene(bundle.scene_index, frames, scored_scenes)
        bundle.kept_captions = tuple(s.caption for s in top_captions(scores, k))
