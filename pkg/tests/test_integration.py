"""One realistic scenario exercising all three matching passes together."""

from movielayers import script_parser, subtitle_parser
from movielayers.aligner import MatchMethod, align, alignment_report

SCRIPT = """\
INT. TRANSPORT - COCKPIT

The pilot grips the yoke. Beside him, the NAVIGATOR scans a chart.

                    PILOT
          Hold your course steady and keep the
          deflectors angled double front until we
          clear the blockade at the third moon.

                    NAVIGATOR
          That will burn the cells.

EXT. SPACE - BLOCKADE

Cruisers hang in silence. Turbolasers track the tiny transport.

INT. TRANSPORT - HOLD

Refugees brace against crates.

                    ELDER
          We knew the risk when we boarded.

                    CHILD
          Are we going to make it?

                    ELDER
          The pilot is the best in the sector.

INT. CRUISER - BRIDGE

The CAPTAIN watches the transport crawl across the viewport.

                    CAPTAIN
          Let them pass. A transport of farmers
          is not worth the fuel.

EXT. SPACE - BEYOND THE BLOCKADE

The transport streaks into the black.
"""

# Block 1+2 split the long speech; blocks 3 and 7 paraphrase the script
# ("That'll", "gonna", "isn't"), forcing the cosine pass.
SRT = """\
1
00:00:05,000 --> 00:00:08,200
Hold your course steady and keep the
deflectors angled double front

2
00:00:08,400 --> 00:00:11,000
until we clear the blockade
at the third moon.

3
00:00:12,000 --> 00:00:13,500
That'll burn the cells.

4
00:01:30,000 --> 00:01:32,000
We knew the risk when we boarded.

5
00:01:33,000 --> 00:01:34,200
Are we gonna make it?

6
00:01:35,000 --> 00:01:37,000
The pilot is the best in the sector.

7
00:02:40,000 --> 00:02:44,000
Let them pass. A transport of farmers
isn't worth the fuel.
"""


def test_three_pass_alignment_scenario():
    scenes = script_parser.chunk_scenes(SCRIPT)
    blocks = subtitle_parser.parse_srt(SRT.encode())
    timeline = align(scenes, blocks)

    by_method = {}
    for m in timeline.matches:
        by_method.setdefault(m.method, []).append(m)

    # the long opening speech spans two subtitle blocks via inclusion
    spans = [m for m in by_method[MatchMethod.INCLUSION] if len(m.subtitle_indices) > 1]
    assert spans and spans[0].subtitle_indices == (0, 1)

    # paraphrased lines land via cosine, verbatim ones via exact
    assert {(m.scene_index, m.utterance_index) for m in by_method[MatchMethod.COSINE]} == {
        (0, 1),
        (2, 1),
        (3, 0),
    }
    assert len(by_method[MatchMethod.EXACT]) == 2

    report = alignment_report(timeline)
    assert report["matched"] == 3
    assert report["boundary_retrieved"] == 1  # the silent blockade scene
    assert report["meta"] == 1  # the trailing dialogue-free scene
    assert report["total"] == 5

    kinds = [s.kind.value for s in timeline.scenes]
    assert kinds == ["matched", "boundary_retrieved", "matched", "matched", "meta"]

    # every block consumed exactly once here
    used = sorted(j for m in timeline.matches for j in m.subtitle_indices)
    assert used == list(range(7))
