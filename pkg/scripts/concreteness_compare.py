"""Compare concreteness of the two bundled query expansion conditions.

Run from the repository root:

    python3 scripts/concreteness_compare.py

Scores the bundled query sets (generated with and without pseudo-answer
grounding) against the packaged concreteness lexicon and reports the
per-question and pooled means. The expansion that writes a pseudo answer
first should come out more concrete, since the answer text injects
domain terms into the queries.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fieldseek.concreteness import load_lexicon, score_query_set

CONDITIONS = ("with_pa", "without_pa")


def load_sets(condition: str) -> list[dict]:
    path = ROOT / "src" / "fieldseek" / "assets" / "concreteness" / f"{condition}.json"
    return json.loads(path.read_text(encoding="utf-8"))["query_sets"]


def main() -> None:
    lexicon = load_lexicon()
    pooled = {}
    per_question: dict[str, dict[str, float]] = {}

    for condition in CONDITIONS:
        sets = load_sets(condition)
        queries = [q for entry in sets for q in entry["queries"]]
        report = score_query_set(queries, lexicon)
        pooled[condition] = report
        for entry in sets:
            sub = score_query_set(entry["queries"], lexicon)
            per_question.setdefault(entry["question"], {})[condition] = sub.mean

    print("per-question means (with PA / without PA):")
    for question, means in per_question.items():
        print(f"  {means['with_pa']:7.2f} / {means['without_pa']:7.2f}  {question}")

    print("\npooled:")
    for condition in CONDITIONS:
        report = pooled[condition]
        print(
            f"  {condition:11s} mean={report.mean:7.2f}  sd={report.sd:6.2f}  "
            f"coverage={report.coverage:.3f}"
        )
    gap = pooled["with_pa"].mean - pooled["without_pa"].mean
    direction = "more" if gap > 0 else "less"
    print(f"\nqueries grounded in pseudo answers are {direction} concrete (gap {gap:+.2f})")


if __name__ == "__main__":
    main()
