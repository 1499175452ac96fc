"""Discipline ranking for citation/reference browsing.

Linked papers are grouped by discipline and each discipline is scored by
C_d = beta * V_d + E_d, where V_d is the mean cosine similarity of the
group's papers to the session topic (exploitation: how promising the field
looks) and E_d = 1 / (U_d + 1) decays with the user's accumulated
engagement U_d in that field (exploration: favor fields not yet visited).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .model import PaperRecord, Vector
from .relevance import Embedder, cosine_similarity

DEFAULT_BETA = 1.0


class EngagementHistory:
    """Per-discipline interaction counters: queries issued and papers kept.

    Counters only ever grow; both feed U_d identically.
    """

    def __init__(self, queried: dict[str, int] | None = None, collected: dict[str, int] | None = None):
        self._queried: dict[str, int] = dict(queried or {})
        self._collected: dict[str, int] = dict(collected or {})

    def record_query(self, discipline: str) -> None:
        self._queried[discipline] = self._queried.get(discipline, 0) + 1

    def record_collection(self, discipline: str) -> None:
        self._collected[discipline] = self._collected.get(discipline, 0) + 1

    def queried(self, discipline: str) -> int:
        return self._queried.get(discipline, 0)

    def collected(self, discipline: str) -> int:
        return self._collected.get(discipline, 0)

    def usage(self, discipline: str) -> int:
        """U_d: total engagement with a discipline."""
        return self.queried(discipline) + self.collected(discipline)

    def to_dict(self) -> dict:
        return {
            "queried": dict(sorted(self._queried.items())),
            "collected": dict(sorted(self._collected.items())),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "EngagementHistory":
        return cls(queried=raw.get("queried", {}), collected=raw.get("collected", {}))


def exploration_score(usage: int) -> float:
    """E_d = 1 / (U_d + 1); strictly decreasing in usage."""
    if usage < 0:
        raise ValueError("usage cannot be negative")
    return 1.0 / (usage + 1.0)


@dataclass
class DisciplineGroup:
    """One discipline's slice of a linked-paper listing, scored and ranked."""

    discipline: str
    papers: list[PaperRecord]
    value_score: float  # V_d
    exploration: float  # E_d
    combined: float  # C_d
    paper_similarities: dict[str, float] = field(default_factory=dict)


def score_disciplines(
    linked_papers: Sequence[PaperRecord],
    history: EngagementHistory,
    topic_embedding: Vector,
    *,
    embedder: Embedder,
    beta: float = DEFAULT_BETA,
) -> list[DisciplineGroup]:
    """Group papers by discipline and order groups by combined score.

    A paper tagged with several disciplines appears in each of those
    groups. Groups sort by descending C_d, then name, and papers inside a
    group sort by descending similarity to the topic, then paper id.
    """
    by_discipline: dict[str, list[PaperRecord]] = {}
    for paper in linked_papers:
        for name in paper.effective_disciplines:
            by_discipline.setdefault(name, []).append(paper)
    if not by_discipline:
        return []

    unique: dict[str, PaperRecord] = {p.paper_id: p for p in linked_papers}
    ordered_ids = list(unique)
    vectors = embedder([unique[pid].metadata_text for pid in ordered_ids])
    similarity = {
        pid: cosine_similarity(vec, topic_embedding) for pid, vec in zip(ordered_ids, vectors)
    }

    groups = []
    for name, papers in by_discipline.items():
        sims = [similarity[p.paper_id] for p in papers]
        value = sum(sims) / len(sims)
        expl = exploration_score(history.usage(name))
        ranked = sorted(papers, key=lambda p: (-similarity[p.paper_id], p.paper_id))
        groups.append(
            DisciplineGroup(
                discipline=name,
                papers=ranked,
                value_score=value,
                exploration=expl,
                combined=beta * value + expl,
                paper_similarities={p.paper_id: similarity[p.paper_id] for p in ranked},
            )
        )
    groups.sort(key=lambda g: (-g.combined, g.discipline))
    return groups
