"""Screenplay chunking: scenes, headings, dialogue attribution, conversations.

Scripts are semi-regular text: a scene starts with an all-caps heading line
(INT/EXT marker, location, optional time of day), followed by description
blocks and indented speaker cues with dialogue underneath.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import ScriptParseError

DEFAULT_TIME_VOCAB = frozenset(
    {
        "DAY",
        "NIGHT",
        "DUSK",
        "DAWN",
        "MORNING",
        "AFTERNOON",
        "EVENING",
        "SUNSET",
        "SUNRISE",
        "TWILIGHT",
        "NOON",
        "MIDNIGHT",
        "LATER",
        "CONTINUOUS",
    }
)

_HEADING_RE = re.compile(r"^(INT\./EXT\.?|INT/EXT\.?|I/E\.?|INT|EXT)[.\s]+(.+)$")
_CUE_QUALIFIER_RE = re.compile(r"\s*\([^)]*\)")
_PARENTHETICAL_RE = re.compile(r"\([^)]*\)")
_SEGMENT_SPLIT_RE = re.compile(r"\s+-+\s+")


class Setting(Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"
    UNKNOWN = "unknown"


class SceneKind(Enum):
    SCRIPT_MATCHED = "matched"
    BOUNDARY_RETRIEVED = "boundary_retrieved"
    META = "meta"


@dataclass(frozen=True)
class SceneHeading:
    setting: Setting
    location: str
    time_of_day: str | None
    raw: str


@dataclass(frozen=True)
class Utterance:
    speaker: str
    text: str
    index_in_scene: int
    preceded_by_description: bool = False
    raw: str = ""


@dataclass
class Scene:
    index: int
    heading: SceneHeading | None
    description: str
    utterances: list[Utterance]
    emphasized_terms: frozenset[str] = frozenset()
    time_bounds: tuple[int, int] | None = None
    kind: SceneKind | None = None
    regrouped: tuple[int, ...] = ()

    @property
    def location(self) -> str | None:
        return self.heading.location if self.heading else None


@dataclass
class Conversation:
    scene_index: int
    participants: frozenset[str]
    utterance_indices: tuple[int, ...]
    keywords: list[str] = field(default_factory=list)
    speaker_terms: dict[str, set[str]] = field(default_factory=dict)


def _is_caps_line(line: str) -> bool:
    stripped = line.strip()
    return bool(stripped) and stripped == stripped.upper() and any(c.isalpha() for c in stripped)


def parse_heading(line: str, time_vocab: frozenset[str] = DEFAULT_TIME_VOCAB) -> SceneHeading | None:
    """Parse one heading line, or return None if it is not a heading.

    Grammar: MARKER LOCATION [- TIME] where the last hyphen-delimited segment
    counts as TIME only when it is in the time vocabulary.
    """
    stripped = line.strip()
    if not _is_caps_line(stripped):
        return None
    m = _HEADING_RE.match(stripped)
    if not m:
        return None
    marker, rest = m.group(1), m.group(2).strip()
    segments = [s.strip() for s in _SEGMENT_SPLIT_RE.split(rest) if s.strip()]
    if not segments:
        return None
    time_of_day = None
    last = segments[-1].rstrip(".").strip()
    if len(segments) > 1 and last in time_vocab:
        time_of_day = last
        segments = segments[:-1]
    location = re.sub(r"\s+", " ", " - ".join(segments)).strip()
    if not location:
        return None
    setting = Setting.INTERIOR if marker.startswith("INT") or marker.startswith("I/") else Setting.EXTERIOR
    return SceneHeading(setting=setting, location=location, time_of_day=time_of_day, raw=line.rstrip("\n"))


def _clean_speaker(cue: str) -> str:
    name = _CUE_QUALIFIER_RE.sub(" ", cue).strip().rstrip(":").strip()
    return re.sub(r"\s+", " ", name).upper()


def _indent(line: str) -> int:
    return len(line) - len(line.lstrip(" \t"))


def structure_scene(
    scene_body: str,
    margin: int | None = None,
    indented: bool | None = None,
) -> tuple[str, list[Utterance]]:
    """Split a scene body (heading excluded) into description and utterances.

    Lines are classified as speaker cue (all-caps, indented beyond the
    description margin), dialogue (under a cue), or description;
    unclassifiable lines default to description. Parentheticals inside
    dialogue are stripped. The margin defaults to the body's minimum indent;
    chunk_scenes passes the script-wide one so dialogue-only scenes keep
    working. For unindented scripts an all-caps line of <= 4 words
    immediately followed by a non-caps line is accepted as a cue.
    """
    lines = scene_body.split("\n")
    nonblank = [ln for ln in lines if ln.strip()]
    if not nonblank:
        return "", []

    if margin is None:
        margin = min(_indent(ln) for ln in nonblank)
    if indented is None:
        indented = any(_is_caps_line(ln) and _indent(ln) > margin for ln in nonblank)

    def is_cue(i: int) -> bool:
        ln = lines[i]
        if not _is_caps_line(ln):
            return False
        if indented:
            return _indent(ln) > margin
        # fallback for unindented scripts
        if len(ln.split()) > 4:
            return False
        for j in range(i + 1, len(lines)):
            if lines[j].strip():
                return not _is_caps_line(lines[j])
        return False

    description_lines: list[str] = []
    utterances: list[Utterance] = []
    desc_since_last_utt = False
    i = 0
    while i < len(lines):
        line = lines[i]
        if not line.strip():
            i += 1
            continue
        if is_cue(i):
            cue_line = line
            dialogue: list[str] = []
            j = i + 1
            while j < len(lines):
                nxt = lines[j]
                if not nxt.strip():
                    break
                if is_cue(j):
                    break
                if indented and _indent(nxt) <= margin:
                    break
                dialogue.append(nxt)
                j += 1
            speaker = _clean_speaker(cue_line)
            text = " ".join(_PARENTHETICAL_RE.sub(" ", d).strip() for d in dialogue)
            text = re.sub(r"\s+", " ", text).strip()
            if speaker and text:
                utterances.append(
                    Utterance(
                        speaker=speaker,
                        text=text,
                        index_in_scene=len(utterances),
                        preceded_by_description=desc_since_last_utt and bool(utterances),
                        raw="\n".join([cue_line] + dialogue),
                    )
                )
                desc_since_last_utt = False
            else:
                # cue without usable dialogue: keep the raw text as description
                description_lines.append(cue_line)
                description_lines.extend(dialogue)
                desc_since_last_utt = True
            i = j
        else:
            description_lines.append(line)
            desc_since_last_utt = True
            i += 1
    return "\n".join(description_lines), utterances


def harvest_emphasis(description: str, exclude: frozenset[str] = frozenset()) -> frozenset[str]:
    """Collect maximal runs of all-caps words (>= 2 letters each) as terms.

    Runs made entirely of excluded words (e.g. scene-heading tokens) are
    dropped.
    """

    def qualifies(tok: str) -> bool:
        if sum(c.isalpha() for c in tok) < 2:
            return False
        return tok == tok.upper() and bool(re.fullmatch(r"[A-Z0-9'\-]+", tok))

    terms: set[str] = set()
    run: list[str] = []
    for raw_tok in description.split():
        tok = raw_tok.strip(".,;:!?\"()[]")
        if tok and qualifies(tok):
            run.append(tok)
        else:
            if run and not all(w in exclude for w in run):
                terms.add(" ".join(run))
            run = []
    if run and not all(w in exclude for w in run):
        terms.add(" ".join(run))
    return frozenset(terms)


def chunk_scenes(
    script_text: str,
    time_vocab: frozenset[str] = DEFAULT_TIME_VOCAB,
) -> list[Scene]:
    """Chunk a screenplay into scenes, one per heading line.

    Raises ScriptParseError when no heading is found, reporting the first
    lines inspected.
    """
    lines = script_text.split("\n")
    heading_rows: list[tuple[int, SceneHeading]] = []
    for row, line in enumerate(lines):
        heading = parse_heading(line, time_vocab)
        if heading is not None:
            heading_rows.append((row, heading))
    if not heading_rows:
        first = [ln for ln in lines if ln.strip()][:3]
        raise ScriptParseError(
            "no scene headings found; first lines inspected: " + " | ".join(repr(l) for l in first)
        )

    heading_set = {row for row, _ in heading_rows}
    body_lines = [
        ln for i, ln in enumerate(lines) if ln.strip() and i not in heading_set
    ]
    margin = min((_indent(ln) for ln in body_lines), default=0)
    indented = any(_is_caps_line(ln) and _indent(ln) > margin for ln in body_lines)

    scenes: list[Scene] = []
    for k, (row, heading) in enumerate(heading_rows):
        end = heading_rows[k + 1][0] if k + 1 < len(heading_rows) else len(lines)
        body = "\n".join(lines[row + 1 : end])
        description, utterances = structure_scene(body, margin=margin, indented=indented)
        heading_tokens = frozenset(t.strip(".,-") for t in heading.raw.split())
        scenes.append(
            Scene(
                index=k,
                heading=heading,
                description=description,
                utterances=utterances,
                emphasized_terms=harvest_emphasis(description, exclude=heading_tokens),
            )
        )
    return scenes


def detect_conversations(scene: Scene, scene_level: bool = False) -> list[Conversation]:
    """Split a scene's utterances into conversations.

    A conversation is a maximal run of utterances over a stable speaker set.
    A new one starts when a description block intervenes, or when two
    consecutive speakers form a pair disjoint from the current participant
    set. With scene_level=True all speakers in the scene form one
    conversation (sensitivity-check mode).
    """
    utts = scene.utterances
    if not utts:
        return []
    if scene_level:
        return [
            Conversation(
                scene_index=scene.index,
                participants=frozenset(u.speaker for u in utts),
                utterance_indices=tuple(u.index_in_scene for u in utts),
            )
        ]

    conversations: list[Conversation] = []
    current: list[Utterance] = [utts[0]]
    speakers: set[str] = {utts[0].speaker}

    def flush() -> None:
        conversations.append(
            Conversation(
                scene_index=scene.index,
                participants=frozenset(speakers),
                utterance_indices=tuple(u.index_in_scene for u in current),
            )
        )

    for pos in range(1, len(utts)):
        u = utts[pos]
        if u.preceded_by_description:
            flush()
            current, speakers = [u], {u.speaker}
            continue
        if u.speaker in speakers or len(speakers) < 2:
            # repeats, alternation, or the second voice forming the pair
            current.append(u)
            speakers.add(u.speaker)
            continue
        # Additional speaker: if the dialogue keeps going without anyone from
        # the current set, the scene has moved on to a disjoint pair.
        nxt = utts[pos + 1] if pos + 1 < len(utts) else None
        moved_on = (
            nxt is not None
            and not nxt.preceded_by_description
            and nxt.speaker not in speakers
        )
        if moved_on:
            flush()
            current, speakers = [u], {u.speaker}
        else:
            current.append(u)
            speakers.add(u.speaker)
    flush()
    return conversations
