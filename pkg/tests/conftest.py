"""Shared fixtures: a small synthetic movie with every input artifact."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from movielayers.graph import LayerKind, MultilayerGraph, NodeRef

DATA_DIR = Path(__file__).parent / "data"

LOCATIONS = [
    "TATOOINE - DESERT",
    "LARS HOMESTEAD - GARAGE",
    "TATOOINE - DESERT",
    "MOS EISLEY - CANTINA",
    "MILLENNIUM FALCON - COCKPIT",
    "DEATH STAR - HANGAR",
    "DEATH STAR - CONTROL ROOM",
    "MILLENNIUM FALCON - COCKPIT",
    "YAVIN - REBEL BASE",
    "YAVIN - THRONE ROOM",
]

_DIALOGUE = {
    0: [("LUKE", "I want to go to the academy this year."),
        ("OWEN", "Harvest is when I need you the most.")],
    1: [("LUKE", "This little droid keeps saying he belongs to someone called Obi-Wan Kenobi."),
        ("THREEPIO", "I suggest you be very careful with that restraining bolt.")],
    3: [("HAN", "I have made the run in less than twelve parsecs."),
        ("BEN", "We need passage to the Alderaan system."),
        ("HAN", "Ten thousand, all in advance.")],
    4: [("HAN", "Punch it, Chewie!"),
        ("CHEWBACCA", "Rrrraargh!")],
    6: [("TARKIN", "You may fire when ready."),
        ("VADER", "The force is strong with this one.")],
    8: [("LEIA", "The battle station has a weakness in the exhaust port."),
        ("LUKE", "I grew up shooting womp rats back home.")],
}

_TIMES = ["DAY", None, "NIGHT", None, None, None, None, None, "DAY", "DAY"]

_DESCRIPTIONS = {
    0: "The twin suns blaze over the dunes. LUKE stares at the horizon.",
    1: "LUKE cleans the droids while the DEATH STAR plans hide inside ARTOO.",
    2: "Sand cools under the stars. A krayt dragon howls in the distance.",
    3: "Smoke curls through the cantina. HAN leans back in the booth.",
    4: "Stars streak past the canopy.",
    5: "The freighter is dragged into the hangar by the tractor beam.",
    6: "Officers watch the screens. VADER looms behind TARKIN.",
    7: "The cockpit rattles as the ship escapes.",
    8: "Pilots crowd around a holographic display of the battle station.",
    9: "A ceremony. LEIA hands out medals beneath the great stone columns.",
}


def synthetic_script() -> str:
    lines = []
    for i, loc in enumerate(LOCATIONS):
        marker = "INT" if ("COCKPIT" in loc or "ROOM" in loc or "GARAGE" in loc or "CANTINA" in loc or "HANGAR" in loc) else "EXT"
        time = f" - {_TIMES[i]}" if _TIMES[i] else ""
        lines.append(f"{marker}. {loc}{time}")
        lines.append("")
        lines.append(_DESCRIPTIONS[i])
        lines.append("")
        for speaker, text in _DIALOGUE.get(i, []):
            lines.append(f"                    {speaker}")
            lines.append(f"          {text}")
            lines.append("")
    return "\n".join(lines) + "\n"


def _fmt(ms: int) -> str:
    h, rem = divmod(ms, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, mil = divmod(rem, 1_000)
    return f"{h:02d}:{m:02d}:{s:02d},{mil:03d}"


# Subtitle text per matched scene, spoken on a fixed clock: scene i's first
# block starts at (i + 1) * 60s, blocks every 6 s.
def synthetic_srt() -> str:
    chunks = []
    n = 1
    for i in sorted(_DIALOGUE):
        t = (i + 1) * 60_000
        for _, text in _DIALOGUE[i]:
            chunks.append(f"{n}\n{_fmt(t)} --> {_fmt(t + 4000)}\n{text}")
            n += 1
            t += 6_000
    return "\n\n".join(chunks) + "\n"


def synthetic_shots() -> dict:
    # one cut every 15 s across the 11-minute span
    return {"boundaries_ms": list(range(0, 660_001, 15_000))}


def synthetic_faces() -> list[dict]:
    present = {
        0: ["LUKE", "OWEN"],
        1: ["LUKE", "THREEPIO", "ARTOO"],
        3: ["HAN", "BEN", "CHEWIE", "GREEDO"],
        4: ["HAN", "CHEWIE"],
        6: ["TARKIN", "VADER"],
        8: ["LEIA", "LUKE", "WEDGE"],
    }
    out = []
    for i, names in present.items():
        t = (i + 1) * 60_000 + 1_000
        for k, name in enumerate(names):
            out.append({"time_ms": t + 500 * k, "bbox": [10 * k, 0, 48, 64], "identity": name})
    return out


def synthetic_captions() -> list[dict]:
    sentences = {
        0: [("a man wearing a white shirt", 0.9), ("a man standing in the desert sand", 0.7)],
        1: [("a small blue robot on the floor", 0.8), ("a gold robot standing near a wall", 0.6)],
        3: [("a man wearing a black vest", 0.85), ("a green alien sitting at a table", 0.4)],
        4: [("a man wearing a black vest", 0.7), ("stars seen through a cockpit window", 0.5)],
        6: [("a man wearing a black helmet", 0.95), ("an officer wearing a gray uniform", 0.6)],
        8: [("a woman wearing a white dress", 0.8), ("a man wearing an orange suit", 0.75)],
    }
    out = []
    for i, pairs in sentences.items():
        t = (i + 1) * 60_000 + 1_200
        for k, (sentence, conf) in enumerate(pairs):
            out.append(
                {"time_ms": t + 400 * k, "bbox": [5 * k, 5, 32, 32], "sentence": sentence, "confidence": conf}
            )
    return out


def synthetic_entities() -> dict:
    return {
        "characters": {
            "CHEWIE": "CHEWBACCA",
            "THREEPIO": "C-3PO",
            "ARTOO": "R2-D2",
            "BEN": "OBI-WAN",
            "LUKE": "LUKE",
        },
        "locations": {},
        "keyword_blocklist": ["thing", "stuff"],
    }


@pytest.fixture(scope="session")
def movie_files(tmp_path_factory) -> dict[str, Path]:
    root = tmp_path_factory.mktemp("movie")
    files = {
        "script": root / "movie.txt",
        "srt": root / "movie.srt",
        "shots": root / "shots.json",
        "faces": root / "faces.json",
        "captions": root / "captions.json",
        "entities": root / "entities.json",
    }
    files["script"].write_text(synthetic_script(), encoding="utf-8")
    files["srt"].write_text(synthetic_srt(), encoding="utf-8")
    files["shots"].write_text(json.dumps(synthetic_shots()), encoding="utf-8")
    files["faces"].write_text(json.dumps(synthetic_faces()), encoding="utf-8")
    files["captions"].write_text(json.dumps(synthetic_captions()), encoding="utf-8")
    files["entities"].write_text(json.dumps(synthetic_entities()), encoding="utf-8")
    return files


def load_karate() -> MultilayerGraph:
    """The 34-node karate-club graph as a character layer."""
    data = json.loads((DATA_DIR / "karate.json").read_text(encoding="utf-8"))
    g = MultilayerGraph()
    for n in data["nodes"]:
        g.add_node(LayerKind.CHARACTER, str(n))
    for a, b in data["edges"]:
        g.add_edge(NodeRef(LayerKind.CHARACTER, str(a)), NodeRef(LayerKind.CHARACTER, str(b)))
    return g


def random_connected_graph(rng, n: int) -> list[tuple[int, int]]:
    """Random connected edge list on n nodes (random tree plus extras)."""
    edges = set()
    for v in range(1, n):
        edges.add((rng.randrange(v), v))
    extra = rng.randrange(0, n * (n - 1) // 2 + 1)
    for _ in range(extra):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return sorted(edges)


def graph_from_edges(edges, n: int | None = None) -> MultilayerGraph:
    g = MultilayerGraph()
    nodes = set()
    for a, b in edges:
        nodes.add(a)
        nodes.add(b)
    if n is not None:
        nodes.update(range(n))
    for v in sorted(nodes):
        g.add_node(LayerKind.CHARACTER, str(v))
    for a, b in edges:
        g.add_edge(NodeRef(LayerKind.CHARACTER, str(a)), NodeRef(LayerKind.CHARACTER, str(b)))
    return g
