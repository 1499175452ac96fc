"""Outline export: turn a session's collections into a shareable document.

The outline never embeds session ids or timestamps, so exporting the same
curated state twice yields byte-identical output. Keyphrases are computed
at export time: candidate phrases from member papers, gated by relevance
to the topic concepts, ranked by how many members mention them.
"""
from __future__ import annotations

import json
from typing import Sequence

from .model import ConceptPhrase, PaperRecord
from .relevance import DEFAULT_TAU, Embedder, relevant_phrases
from .session import SessionState
from .text import extract_concepts

EXPORT_FORMATS = ("json", "markdown")
KEYPHRASES_PER_COLLECTION = 8


def collection_keyphrases(
    papers: Sequence[PaperRecord],
    topic_concepts: Sequence[str],
    embedder: Embedder,
    tau: float = DEFAULT_TAU,
    top_n: int = KEYPHRASES_PER_COLLECTION,
) -> list[str]:
    """Most shared topic-relevant phrases across a collection's papers.

    Each paper votes once per distinct phrase; candidates must clear the
    relevance gate against the topic concepts. Ties break alphabetically.
    """
    counts: dict[str, int] = {}
    for paper in papers:
        for phrase in set(extract_concepts(paper.metadata_text)):
            counts[phrase] = counts.get(phrase, 0) + 1
    if not counts or not topic_concepts:
        return []
    candidates = sorted(counts)
    vectors = embedder(candidates + list(topic_concepts))
    phrase_objs = [
        ConceptPhrase(text, embedding=vec)
        for text, vec in zip(candidates, vectors[: len(candidates)])
    ]
    concept_objs = [
        ConceptPhrase(text, embedding=vec)
        for text, vec in zip(topic_concepts, vectors[len(candidates) :])
    ]
    kept = relevant_phrases(phrase_objs, concept_objs, tau=tau)
    ranked = sorted((p.text for p in kept), key=lambda t: (-counts[t], t))
    return ranked[:top_n]


def _paper_entry(paper: PaperRecord) -> dict:
    return {
        "paper_id": paper.paper_id,
        "title": paper.title,
        "year": paper.year,
        "venue": paper.venue,
        "disciplines": list(paper.effective_disciplines),
    }


def build_outline(state: SessionState, embedder: Embedder) -> dict:
    """Assemble the outline document from collections and questions."""
    collections = []
    for collection in state.collections:
        members = [state.papers[pid] for pid in collection.paper_ids]
        collections.append(
            {
                "name": collection.name,
                "keyphrases": collection_keyphrases(members, state.topic.concepts, embedder),
                "papers": [_paper_entry(p) for p in members],
            }
        )
    return {
        "topic": state.topic.text,
        "concepts": list(state.topic.concepts),
        "questions": [
            {
                "id": eq.id,
                "text": eq.text,
                "discipline": eq.discipline,
                "subfield": eq.subfield,
                "origin": eq.origin,
                "selected": eq.selected,
                "explored": eq.id in state.explorations,
            }
            for eq in state.eqs
        ],
        "collections": collections,
    }


def outline_json(state: SessionState, embedder: Embedder) -> str:
    return json.dumps(build_outline(state, embedder), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def outline_markdown(state: SessionState, embedder: Embedder) -> str:
    outline = build_outline(state, embedder)
    lines = [f"# {outline['topic']}", ""]
    lines.append("## Questions")
    lines.append("")
    for q in outline["questions"]:
        mark = "x" if q["explored"] else " "
        subfield = f" / {q['subfield']}" if q["subfield"] else ""
        lines.append(f"- [{mark}] {q['text']} ({q['discipline']}{subfield})")
    lines.append("")
    for block in outline["collections"]:
        lines.append(f"## {block['name']}")
        lines.append("")
        if block["keyphrases"]:
            lines.append("Keyphrases: " + ", ".join(block["keyphrases"]))
            lines.append("")
        for paper in block["papers"]:
            year = f" ({paper['year']})" if paper["year"] else ""
            fields = ", ".join(paper["disciplines"])
            lines.append(f"- {paper['title']}{year} [{fields}]")
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def export_outline(state: SessionState, embedder: Embedder, format: str = "json") -> str:
    if format not in EXPORT_FORMATS:
        raise ValueError(f"unknown export format: {format!r}")
    if format == "json":
        return outline_json(state, embedder)
    return outline_markdown(state, embedder)
