"""Assign movie time to script scenes by matching utterances to subtitles.

Matching proceeds in three passes over stemmed token sequences: exact
equality, textual inclusion (within windows bounded by already-matched
neighbors), then tf-idf cosine similarity. Scene bounds come from matched
blocks, snapped outward to shot boundaries; unmatched scenes are retrieved
from their neighbors' boundaries or regrouped into meta scenes.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from . import textkit
from .errors import AlignmentError, ValidationError
from .script_parser import Scene, SceneKind
from .subtitle_parser import SubtitleBlock, subtitle_text

DEFAULT_COSINE_THRESHOLD = 0.3
MAX_BLOCK_SPAN = 5  # long speeches may span consecutive subtitle blocks


class MatchMethod(Enum):
    EXACT = "exact"
    INCLUSION = "inclusion"
    COSINE = "cosine"


@dataclass(frozen=True)
class UtteranceMatch:
    scene_index: int
    utterance_index: int
    subtitle_indices: tuple[int, ...]
    method: MatchMethod
    score: float


@dataclass(frozen=True)
class ShotList:
    boundaries_ms: tuple[int, ...]

    def __post_init__(self):
        b = self.boundaries_ms
        if b and (b[0] < 0 or any(x >= y for x, y in zip(b, b[1:]))):
            raise ValidationError("shot boundaries must be non-negative and strictly increasing")

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ShotList":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(tuple(int(x) for x in data["boundaries_ms"]))


@dataclass
class AlignmentStats:
    matched: int = 0
    boundary_retrieved: int = 0
    boundary_retrieved_empty: int = 0
    meta: int = 0
    meta_empty: int = 0

    @property
    def total(self) -> int:
        return self.matched + self.boundary_retrieved + self.meta

    @property
    def empty(self) -> int:
        return self.boundary_retrieved_empty + self.meta_empty


@dataclass
class Timeline:
    scenes: list[Scene]
    matches: list[UtteranceMatch]
    stats: AlignmentStats
    movie_end_ms: int


def _contiguous_in(small: tuple[str, ...], big: tuple[str, ...]) -> bool:
    ls = len(small)
    if ls == 0 or ls > len(big):
        return False
    return any(big[i : i + ls] == small for i in range(len(big) - ls + 1))


class Aligner:
    """Stateful three-pass matcher; each pass refines the shared match set."""

    def __init__(
        self,
        scenes: list[Scene],
        subtitles: list[SubtitleBlock],
        cosine_threshold: float = DEFAULT_COSINE_THRESHOLD,
        max_block_span: int = MAX_BLOCK_SPAN,
    ):
        self.scenes = scenes
        self.subtitles = subtitles
        self.cosine_threshold = cosine_threshold
        self.max_block_span = max_block_span
        # Script-order list of (scene_index, utterance_index, tokens).
        self.utterances: list[tuple[int, int, tuple[str, ...]]] = []
        for scene in scenes:
            for utt in scene.utterances:
                tokens = textkit.normalize(utt.text).tokens
                self.utterances.append((scene.index, utt.index_in_scene, tokens))
        self.block_tokens: list[tuple[str, ...]] = [
            textkit.normalize(subtitle_text(b)).tokens for b in subtitles
        ]
        self.matches: list[UtteranceMatch] = []
        self._used: set[int] = set()
        self._matched_upos: dict[int, tuple[int, int]] = {}  # utterance pos -> (min blk, max blk)

    # -- shared helpers ----------------------------------------------------

    def _record(self, upos: int, blocks: tuple[int, ...], method: MatchMethod, score: float) -> None:
        si, ui, _ = self.utterances[upos]
        self.matches.append(UtteranceMatch(si, ui, blocks, method, score))
        self._used.update(blocks)
        self._matched_upos[upos] = (min(blocks), max(blocks))

    def _window(self, upos: int) -> tuple[int, int]:
        """Half-open block range strictly between the nearest matched neighbors."""
        lo = 0
        hi = len(self.subtitles)
        for p, (_, bmax) in self._matched_upos.items():
            if p < upos:
                lo = max(lo, bmax + 1)
        for p, (bmin, _) in self._matched_upos.items():
            if p > upos:
                hi = min(hi, bmin)
        return lo, hi

    def _unmatched_positions(self) -> list[int]:
        return [p for p in range(len(self.utterances)) if p not in self._matched_upos]

    # -- pass 1: exact -----------------------------------------------------

    def match_exact(self) -> list[UtteranceMatch]:
        """Match utterances whose normalized tokens equal a block's exactly.

        Each block is used at most once and match positions advance
        monotonically through the subtitle file.
        """
        by_tokens: dict[tuple[str, ...], list[int]] = {}
        for j, toks in enumerate(self.block_tokens):
            if toks:
                by_tokens.setdefault(toks, []).append(j)
        new: list[UtteranceMatch] = []
        cursor = 0
        for upos in self._unmatched_positions():
            _, _, tokens = self.utterances[upos]
            if not tokens:
                continue
            for j in by_tokens.get(tokens, ()):
                if j >= cursor and j not in self._used:
                    self._record(upos, (j,), MatchMethod.EXACT, 1.0)
                    new.append(self.matches[-1])
                    cursor = j + 1
                    break
        return new

    # -- pass 2: inclusion -------------------------------------------------

    def match_inclusion(self) -> list[UtteranceMatch]:
        """Match when one side's tokens are a contiguous run of the other's.

        A block contained in a long utterance may extend over consecutive
        unused blocks (up to max_block_span) whose concatenation stays
        contained.
        """
        new: list[UtteranceMatch] = []
        for upos in self._unmatched_positions():
            _, _, tokens = self.utterances[upos]
            if not tokens:
                continue
            lo, hi = self._window(upos)
            for j in range(lo, hi):
                if j in self._used or not self.block_tokens[j]:
                    continue
                block = self.block_tokens[j]
                if _contiguous_in(tokens, block):
                    self._record(upos, (j,), MatchMethod.INCLUSION, len(tokens) / len(block))
                    new.append(self.matches[-1])
                    break
                if _contiguous_in(block, tokens):
                    picked = [j]
                    concat = list(block)
                    k = j + 1
                    while (
                        k < hi
                        and k not in self._used
                        and len(picked) < self.max_block_span
                        and self.block_tokens[k]
                        and _contiguous_in(tuple(concat + list(self.block_tokens[k])), tokens)
                    ):
                        concat.extend(self.block_tokens[k])
                        picked.append(k)
                        k += 1
                    self._record(
                        upos, tuple(picked), MatchMethod.INCLUSION, len(concat) / len(tokens)
                    )
                    new.append(self.matches[-1])
                    break
        return new

    # -- pass 3: cosine ----------------------------------------------------

    def match_cosine(self, threshold: float | None = None) -> list[UtteranceMatch]:
        """Match remaining utterances to the best block in window by tf-idf cosine."""
        threshold = self.cosine_threshold if threshold is None else threshold
        remaining = [p for p in self._unmatched_positions() if self.utterances[p][2]]
        if not remaining:
            return []
        windows = {p: self._window(p) for p in remaining}
        candidate_blocks = sorted(
            {
                j
                for p in remaining
                for j in range(*windows[p])
                if j not in self._used and self.block_tokens[j]
            }
        )
        if not candidate_blocks:
            return []
        docs = [self.utterances[p][2] for p in remaining] + [
            self.block_tokens[j] for j in candidate_blocks
        ]
        vectors = textkit.tfidf_vectors(docs)
        utt_vec = {p: vectors[i] for i, p in enumerate(remaining)}
        blk_vec = {j: vectors[len(remaining) + i] for i, j in enumerate(candidate_blocks)}

        new: list[UtteranceMatch] = []
        for upos in remaining:
            lo, hi = self._window(upos)
            best_j, best_score = None, -1.0
            for j in range(lo, hi):
                if j in self._used or j not in blk_vec:
                    continue
                score = textkit.cosine(utt_vec[upos], blk_vec[j])
                if score > best_score:  # strict: ties resolve to the earlier block
                    best_j, best_score = j, score
            if best_j is not None and best_score >= threshold:
                self._record(upos, (best_j,), MatchMethod.COSINE, best_score)
                new.append(self.matches[-1])
        return new

    def run(self) -> list[UtteranceMatch]:
        self.match_exact()
        self.match_inclusion()
        self.match_cosine()
        self.matches.sort(key=lambda m: (m.scene_index, m.utterance_index))
        return self.matches


def match_exact(scenes, subtitles) -> list[UtteranceMatch]:
    return Aligner(scenes, subtitles).match_exact()


def match_inclusion(scenes, subtitles, prior_matches=()) -> list[UtteranceMatch]:
    a = Aligner(scenes, subtitles)
    _replay(a, prior_matches)
    return a.match_inclusion()


def match_cosine(scenes, subtitles, prior_matches=(), threshold=DEFAULT_COSINE_THRESHOLD) -> list[UtteranceMatch]:
    a = Aligner(scenes, subtitles)
    _replay(a, prior_matches)
    return a.match_cosine(threshold)


def _replay(aligner: Aligner, matches) -> None:
    pos = {(si, ui): p for p, (si, ui, _) in enumerate(aligner.utterances)}
    for m in matches:
        aligner._record(pos[(m.scene_index, m.utterance_index)], m.subtitle_indices, m.method, m.score)


# ---------------------------------------------------------------------------
# Scene bounds and gap filling
# ---------------------------------------------------------------------------


def infer_scene_bounds(
    matches: list[UtteranceMatch],
    subtitles: list[SubtitleBlock],
    shots: ShotList | None = None,
) -> dict[int, tuple[int, int]]:
    """Per-scene raw bounds from matched blocks, snapped outward to shot cuts.

    Start snaps down to the latest boundary <= raw start; end snaps up to the
    earliest boundary >= raw end. Without shots (or a boundary on that side)
    the raw bound is kept.
    """
    raw: dict[int, tuple[int, int]] = {}
    for m in matches:
        starts = [subtitles[j].start_ms for j in m.subtitle_indices]
        ends = [subtitles[j].end_ms for j in m.subtitle_indices]
        lo, hi = min(starts), max(ends)
        if m.scene_index in raw:
            cur = raw[m.scene_index]
            raw[m.scene_index] = (min(cur[0], lo), max(cur[1], hi))
        else:
            raw[m.scene_index] = (lo, hi)

    if shots is None or not shots.boundaries_ms:
        return raw
    cuts = shots.boundaries_ms
    snapped = {}
    for si, (lo, hi) in raw.items():
        k = bisect.bisect_right(cuts, lo) - 1
        new_lo = cuts[k] if k >= 0 else lo
        k = bisect.bisect_left(cuts, hi)
        new_hi = cuts[k] if k < len(cuts) else hi
        snapped[si] = (new_lo, new_hi)
    return snapped


def fill_gaps(
    scenes: list[Scene],
    bounds: dict[int, tuple[int, int]],
    movie_end_ms: int | None = None,
) -> Timeline:
    """Assign kinds and bounds to every emitted scene.

    A single unmatched scene between matched neighbors is boundary-retrieved
    with exactly the gap interval; a run of two or more becomes one meta scene
    regrouping them. Unmatched runs before the first or after the last matched
    scene become one meta scene each, clamped to the movie's ends.
    """
    if not bounds:
        raise AlignmentError("no scene matched any subtitle block")
    if movie_end_ms is None:
        movie_end_ms = max(hi for _, hi in bounds.values())

    stats = AlignmentStats()
    emitted: list[Scene] = []
    prev_end = 0

    def emit(scene: Scene, kind: SceneKind, lo: int, hi: int) -> None:
        nonlocal prev_end
        lo = max(lo, prev_end)
        hi = max(hi, lo)
        scene.kind = kind
        scene.time_bounds = (lo, hi)
        emitted.append(scene)
        prev_end = hi

    def emit_meta(run: list[Scene], lo: int, hi: int) -> None:
        indices = tuple(s.index for s in run)
        meta = Scene(
            index=indices[0],
            heading=None,
            description="",
            utterances=[],
            kind=SceneKind.META,
            regrouped=indices,
        )
        stats.meta += 1
        stats.meta_empty += sum(1 for s in run if not s.utterances)
        emit(meta, SceneKind.META, lo, hi)

    pending: list[Scene] = []
    last_matched: Scene | None = None
    for scene in scenes:
        if scene.index not in bounds:
            pending.append(scene)
            continue
        lo, hi = bounds[scene.index]
        if pending:
            gap_lo = bounds[last_matched.index][1] if last_matched else 0
            gap_hi = lo
            if last_matched is not None and len(pending) == 1:
                stats.boundary_retrieved += 1
                if not pending[0].utterances:
                    stats.boundary_retrieved_empty += 1
                emit(pending[0], SceneKind.BOUNDARY_RETRIEVED, gap_lo, gap_hi)
            else:
                emit_meta(pending, gap_lo, gap_hi)
            pending = []
        stats.matched += 1
        emit(scene, SceneKind.SCRIPT_MATCHED, lo, hi)
        last_matched = scene
    if pending:
        gap_lo = bounds[last_matched.index][1]
        emit_meta(pending, gap_lo, max(movie_end_ms, gap_lo))

    return Timeline(scenes=emitted, matches=[], stats=stats, movie_end_ms=movie_end_ms)


def align(
    scenes: list[Scene],
    subtitles: list[SubtitleBlock],
    shots: ShotList | None = None,
    cosine_threshold: float = DEFAULT_COSINE_THRESHOLD,
    movie_end_ms: int | None = None,
) -> Timeline:
    """Full alignment: three matching passes, bounds, and gap filling."""
    aligner = Aligner(scenes, subtitles, cosine_threshold=cosine_threshold)
    matches = aligner.run()
    bounds = infer_scene_bounds(matches, subtitles, shots)
    if movie_end_ms is None and subtitles:
        movie_end_ms = max(b.end_ms for b in subtitles)
    timeline = fill_gaps(scenes, bounds, movie_end_ms)
    timeline.matches = matches
    return timeline


def alignment_report(timeline: Timeline) -> dict:
    """Counts shaped like the per-movie accounting table."""
    s = timeline.stats
    return {
        "matched": s.matched,
        "boundary_retrieved": s.boundary_retrieved,
        "boundary_retrieved_empty": s.boundary_retrieved_empty,
        "meta": s.meta,
        "meta_empty": s.meta_empty,
        "total": s.total,
        "total_empty": s.empty,
    }


def format_report_row(name: str, report: dict) -> str:
    return (
        f"{name}\t{report['matched']}\t"
        f"{report['boundary_retrieved']} ({report['boundary_retrieved_empty']})\t"
        f"{report['meta']} ({report['meta_empty']})\t"
        f"{report['total']} ({report['total_empty']})"
    )
