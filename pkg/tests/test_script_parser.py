import re

import pytest

from movielayers.errors import ScriptParseError
from movielayers.script_parser import (
    Conversation,
    Scene,
    Setting,
    Utterance,
    chunk_scenes,
    detect_conversations,
    harvest_emphasis,
    parse_heading,
    structure_scene,
)

THREE_SCENES = """\
EXT. TATOOINE - DESERT - DAY

The suns rise over the dunes.

INT. MILLENNIUM FALCON - COCKPIT

HAN checks the instruments.

                    HAN
          Punch it.

EXT. ENDOR - FOREST - NIGHT

Trees. Many trees.
"""


class TestHeadings:
    def test_exterior_with_time(self):
        h = parse_heading("EXT. TATOOINE - DESERT - DAY")
        assert h.setting is Setting.EXTERIOR
        assert h.location == "TATOOINE - DESERT"
        assert h.time_of_day == "DAY"

    def test_interior_without_time(self):
        h = parse_heading("INT. MILLENNIUM FALCON - COCKPIT")
        assert h.setting is Setting.INTERIOR
        assert h.location == "MILLENNIUM FALCON - COCKPIT"
        assert h.time_of_day is None

    def test_non_heading_lines(self):
        assert parse_heading("The suns rise over the dunes.") is None
        assert parse_heading("he walked INT. the room") is None
        assert parse_heading("") is None

    def test_setting_follows_marker(self):
        assert parse_heading("INT. CORRIDOR").setting is Setting.INTERIOR
        assert parse_heading("EXT. SWAMP - NIGHT").setting is Setting.EXTERIOR
        assert parse_heading("INT/EXT. SPEEDER").setting is Setting.INTERIOR

    def test_unknown_last_segment_stays_in_location(self):
        h = parse_heading("EXT. HOTH - ICE PLAIN - SNOW TRENCH")
        assert h.location == "HOTH - ICE PLAIN - SNOW TRENCH"
        assert h.time_of_day is None


class TestChunkScenes:
    def test_scene_count_equals_heading_count(self):
        scenes = chunk_scenes(THREE_SCENES)
        assert [s.index for s in scenes] == [0, 1, 2]

    def test_no_headings_is_parse_error(self):
        with pytest.raises(ScriptParseError) as err:
            chunk_scenes("just\nsome\nprose\nwithout headings\n")
        assert "just" in str(err.value)

    def test_deterministic(self):
        a = chunk_scenes(THREE_SCENES)
        b = chunk_scenes(THREE_SCENES)
        assert [(s.heading.raw, s.description, [u.text for u in s.utterances]) for s in a] == [
            (s.heading.raw, s.description, [u.text for u in s.utterances]) for s in b
        ]

    def test_reassembly_preserves_characters(self):
        scenes = chunk_scenes(THREE_SCENES)
        rebuilt = "".join(
            s.heading.raw + s.description + "".join(u.raw for u in s.utterances) for s in scenes
        )
        assert sorted(re.sub(r"\s", "", rebuilt)) == sorted(re.sub(r"\s", "", THREE_SCENES))

    def test_speakers_uppercase(self):
        scenes = chunk_scenes(THREE_SCENES)
        speakers = {u.speaker for s in scenes for u in s.utterances}
        assert speakers == {"HAN"}


class TestStructureScene:
    def test_no_cues_all_description(self):
        body = "The suns rise.\nA droid rolls past.\n"
        description, utterances = structure_scene(body)
        assert utterances == []
        assert "droid rolls" in description

    def test_multiline_dialogue_joined(self):
        body = (
            "LUKE watches.\n"
            "\n"
            "                    LUKE\n"
            "          I care about the harvest.\n"
            "          Truly I do.\n"
        )
        _, utterances = structure_scene(body)
        assert len(utterances) == 1
        assert utterances[0].speaker == "LUKE"
        assert utterances[0].text == "I care about the harvest. Truly I do."

    def test_cue_qualifiers_stripped(self):
        body = (
            "The comm crackles.\n"
            "\n"
            "                    HAN (V.O.)\n"
            "          I heard that.\n"
            "\n"
            "                    LEIA (CONT'D)\n"
            "          (softly) You were meant to.\n"
        )
        _, utterances = structure_scene(body)
        assert [u.speaker for u in utterances] == ["HAN", "LEIA"]
        assert utterances[1].text == "You were meant to."

    def test_parenthetical_only_cue_becomes_description(self):
        body = (
            "A long pause.\n"
            "\n"
            "                    VADER\n"
            "          (breathes)\n"
        )
        description, utterances = structure_scene(body)
        assert utterances == []
        assert "VADER" in description

    def test_unindented_fallback(self):
        body = "The hall.\n\nLUKE\nHello there.\n\nA door opens.\n"
        _, utterances = structure_scene(body)
        assert len(utterances) == 1
        assert utterances[0].speaker == "LUKE"
        assert utterances[0].text == "Hello there."


class TestHarvestEmphasis:
    def test_multiword_run(self):
        assert harvest_emphasis("the DEATH STAR looms") == {"DEATH STAR"}

    def test_no_caps(self):
        assert harvest_emphasis("no caps here") == frozenset()

    def test_two_separate_runs(self):
        assert harvest_emphasis("LUKE and LEIA run") == {"LUKE", "LEIA"}

    def test_single_letters_ignored(self):
        assert harvest_emphasis("A big plan, call it B") == frozenset()

    def test_excluded_heading_tokens(self):
        assert harvest_emphasis("back on TATOOINE again", exclude=frozenset({"TATOOINE"})) == frozenset()

    def test_mixed_alphanumeric_names(self):
        assert harvest_emphasis("C-3PO trails behind") == {"C-3PO"}


def _scene_with(utterances: list[tuple[str, bool]]) -> Scene:
    utts = [
        Utterance(speaker=s, text=f"line {i}", index_in_scene=i, preceded_by_description=gap)
        for i, (s, gap) in enumerate(utterances)
    ]
    return Scene(index=0, heading=None, description="", utterances=utts)


class TestConversations:
    def test_alternating_pair(self):
        scene = _scene_with([("A", False), ("B", False), ("A", False), ("B", False)])
        convs = detect_conversations(scene)
        assert len(convs) == 1
        assert convs[0].participants == {"A", "B"}
        assert convs[0].utterance_indices == (0, 1, 2, 3)

    def test_description_splits(self):
        scene = _scene_with([("A", False), ("B", False), ("C", True), ("D", False)])
        convs = detect_conversations(scene)
        assert [set(c.participants) for c in convs] == [{"A", "B"}, {"C", "D"}]

    def test_disjoint_pair_splits(self):
        scene = _scene_with([("A", False), ("B", False), ("C", False), ("D", False)])
        convs = detect_conversations(scene)
        assert [set(c.participants) for c in convs] == [{"A", "B"}, {"C", "D"}]

    def test_third_speaker_joins(self):
        scene = _scene_with([("A", False), ("B", False), ("C", False), ("A", False)])
        convs = detect_conversations(scene)
        assert len(convs) == 1
        assert convs[0].participants == {"A", "B", "C"}

    def test_empty_scene(self):
        assert detect_conversations(_scene_with([])) == []

    def test_single_speaker(self):
        convs = detect_conversations(_scene_with([("A", False), ("A", False)]))
        assert len(convs) == 1
        assert convs[0].participants == {"A"}

    def test_participants_equal_speaker_set(self):
        scene = _scene_with(
            [("A", False), ("B", False), ("A", False), ("C", True), ("C", False)]
        )
        for conv in detect_conversations(scene):
            speakers = {scene.utterances[i].speaker for i in conv.utterance_indices}
            assert conv.participants == speakers

    def test_scene_level_mode(self):
        scene = _scene_with([("A", False), ("B", True), ("C", False)])
        convs = detect_conversations(scene, scene_level=True)
        assert len(convs) == 1
        assert convs[0].participants == {"A", "B", "C"}
