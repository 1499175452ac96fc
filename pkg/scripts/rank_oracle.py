"""Freeze an independently computed discipline ranking table.

Run from the repository root:

    python3 scripts/rank_oracle.py

Recomputes, from the corpus file and the scoring definitions alone, the
expected discipline ordering for the linked papers of the bundled hub
paper under several engagement histories:

    U_d = queries issued + papers collected for discipline d
    E_d = 1 / (U_d + 1)
    V_d = mean cosine similarity of the group's papers to the topic
    C_d = beta * V_d + E_d          (beta = 1)

Groups order by descending C_d with discipline name as tiebreaker;
papers inside a group by descending similarity, then id. Everything
here is computed with plain arithmetic so the table stays an oracle
for the ranking module rather than a mirror of it. The deterministic
embedding helper is shared infrastructure, not part of the formula
under test. Output is frozen at tests/data/rank_table.json.
"""
from __future__ import annotations

import json
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fieldseek.gateway import scripted_embedding

TOPIC = "misinformation awareness among older adults"
HUB = "P006"
BETA = 1.0

SCENARIOS = [
    ("fresh", "citations", {"queried": {}, "collected": {}}),
    (
        "psychology_engaged",
        "citations",
        {"queried": {"Psychology": 3}, "collected": {"Psychology": 14}},
    ),
    (
        "balanced_session",
        "citations",
        {
            "queried": {"Psychology": 3, "Education": 3, "Sociology": 3},
            "collected": {"Psychology": 14, "Education": 8, "Sociology": 7},
        },
    ),
    (
        "medicine_touched",
        "citations",
        {"queried": {"Medicine": 1}, "collected": {"Medicine": 2, "Psychology": 5}},
    ),
    ("fresh_references", "references", {"queried": {}, "collected": {}}),
]


def cosine(a: list[float], b: list[float]) -> float:
    dot = math.fsum(x * y for x, y in zip(a, b))
    na = math.sqrt(math.fsum(x * x for x in a))
    nb = math.sqrt(math.fsum(y * y for y in b))
    return dot / (na * nb)


def main() -> None:
    corpus = json.loads((ROOT / "src" / "fieldseek" / "assets" / "corpus.json").read_text())
    papers = {p["paper_id"]: p for p in corpus["papers"]}
    topic_vec = scripted_embedding(TOPIC)

    scenarios_out = []
    for name, direction, history in SCENARIOS:
        linked_ids = corpus[direction][HUB]
        usage = {}
        for disc, n in history["queried"].items():
            usage[disc] = usage.get(disc, 0) + n
        for disc, n in history["collected"].items():
            usage[disc] = usage.get(disc, 0) + n

        similarity = {}
        by_discipline: dict[str, list[str]] = {}
        for pid in linked_ids:
            paper = papers[pid]
            text = f"{paper['title']}. {paper['abstract']}"
            similarity[pid] = cosine(scripted_embedding(text), topic_vec)
            for disc in paper["disciplines"] or ["Unknown"]:
                by_discipline.setdefault(disc, []).append(pid)

        groups = []
        for disc, members in by_discipline.items():
            value = math.fsum(similarity[pid] for pid in members) / len(members)
            exploration = 1.0 / (usage.get(disc, 0) + 1.0)
            ranked = sorted(members, key=lambda pid: (-similarity[pid], pid))
            groups.append(
                {
                    "discipline": disc,
                    "value_score": value,
                    "exploration": exploration,
                    "combined": BETA * value + exploration,
                    "papers": ranked,
                    "similarities": [similarity[pid] for pid in ranked],
                }
            )
        groups.sort(key=lambda g: (-g["combined"], g["discipline"]))
        scenarios_out.append(
            {"name": name, "direction": direction, "history": history, "groups": groups}
        )

    table = {
        "topic": TOPIC,
        "paper_id": HUB,
        "beta": BETA,
        "scenarios": scenarios_out,
    }
    out = ROOT / "tests" / "data" / "rank_table.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(table, indent=2) + "\n", encoding="utf-8")
    for scenario in scenarios_out:
        order = " > ".join(g["discipline"] for g in scenario["groups"])
        print(f"{scenario['name']:20s} {order}")
    print(f"wrote {out.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
