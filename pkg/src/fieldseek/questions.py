"""Exploratory question generation, validation, and deduplication.

Questions are drafted per field by a persona prompt (the model answers as
an expert of that field), so a multidisciplinary topic fans out into
field-specific angles. Paper-seeded generation works the same way but
anchors on one collected paper. Near-duplicates are folded by embedding
similarity.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .gateway import LlmGateway, PromptRequest
from .model import ExploratoryQuestion, PaperRecord, ResearchTopic
from .relevance import Embedder, cosine_similarity

DEFAULT_NUM_RQ = 3
DEFAULT_MAX_FIELDS = 6
# Questions whose pairwise cosine exceeds this are considered restatements.
NEAR_DUPLICATE_SIMILARITY = 0.92
# The drafting prompt asks for at most 15 words; longer outputs are kept
# but flagged for the user to trim.
MAX_QUESTION_WORDS = 15

_LIST_PREFIX = re.compile(r"^\s*(?:[-*•]|\(?\d{1,2}[.):])\s*")


@dataclass(frozen=True)
class FieldPath:
    """A discipline plus an optional narrower subfield, e.g.
    Psychology / social psychology."""

    field: str
    subfield: str | None = None

    @property
    def label(self) -> str:
        if self.subfield:
            return f"{self.field}: {self.subfield}"
        return self.field


@dataclass(frozen=True)
class EqDraft:
    """A generated question before the session assigns it an id."""

    text: str
    discipline: str
    subfield: str | None = None
    origin: str = "topic_seeded"
    flags: tuple[str, ...] = ()


def parse_list_output(text: str) -> list[str]:
    """Split an LLM listing into items, tolerating bullets and numbering."""
    items = []
    for line in text.splitlines():
        stripped = _LIST_PREFIX.sub("", line).strip()
        if stripped:
            items.append(stripped)
    return items


def identify_fields(
    topic: ResearchTopic, gateway: LlmGateway, max_fields: int = DEFAULT_MAX_FIELDS
) -> list[FieldPath]:
    """Ask which fields study the topic; returns at most max_fields paths."""
    if max_fields < 1:
        raise ValueError("max_fields must be at least 1")
    raw = gateway.complete(
        PromptRequest("identify_fields", {"research_idea": topic.text})
    )
    paths = []
    seen = set()
    for item in parse_list_output(raw):
        field, _, subfield = item.partition(":")
        field = field.strip()
        subfield = subfield.strip() or None
        if field and field.lower() not in seen:
            seen.add(field.lower())
            paths.append(FieldPath(field=field, subfield=subfield))
    return paths[:max_fields]


def validate_question(text: str) -> tuple[str, tuple[str, ...]]:
    """Normalize whitespace and flag constraint violations without dropping.

    Flags: not_a_question (missing trailing "?"), overlong (more than 15
    words). The text itself is never rewritten beyond whitespace.
    """
    cleaned = " ".join(text.split())
    flags = []
    if not cleaned.endswith("?"):
        flags.append("not_a_question")
    if len(cleaned.rstrip("?").split()) > MAX_QUESTION_WORDS:
        flags.append("overlong")
    return cleaned, tuple(flags)


def draft_for_field(
    topic: ResearchTopic,
    path: FieldPath,
    gateway: LlmGateway,
    num_rq: int = DEFAULT_NUM_RQ,
    template_id: str = "eq_generation",
) -> list[EqDraft]:
    """Generate field-specific questions for a topic via the persona prompt.

    template_id selects a prompt variant; the alternates exist for
    comparison runs and share the same variables.
    """
    raw = gateway.complete(
        PromptRequest(
            template_id,
            {"field": path.label, "research_idea": topic.text, "num_rq": str(num_rq)},
        )
    )
    drafts = []
    for item in parse_list_output(raw):
        cleaned, flags = validate_question(item)
        drafts.append(
            EqDraft(
                text=cleaned,
                discipline=path.field,
                subfield=path.subfield,
                origin="topic_seeded",
                flags=flags,
            )
        )
    return drafts


def draft_from_paper(
    topic: ResearchTopic,
    paper: PaperRecord,
    gateway: LlmGateway,
    focus_keywords: Sequence[str] = (),
) -> list[EqDraft]:
    """Generate questions anchored on one paper the user found interesting."""
    raw = gateway.complete(
        PromptRequest(
            "eq_from_paper",
            {
                "topic": topic.text,
                "title": paper.title,
                "abstract": paper.abstract,
                "disciplines": ", ".join(paper.effective_disciplines),
                "keywords": ", ".join(focus_keywords) if focus_keywords else "none",
            },
        )
    )
    discipline = paper.effective_disciplines[0]
    drafts = []
    for item in parse_list_output(raw):
        cleaned, flags = validate_question(item)
        drafts.append(
            EqDraft(text=cleaned, discipline=discipline, origin="paper_seeded", flags=flags)
        )
    return drafts


def draft_more_from_paper(
    topic: ResearchTopic,
    paper: PaperRecord,
    existing: Sequence[str],
    gateway: LlmGateway,
) -> list[EqDraft]:
    """One retry round when deduplication left fewer drafts than requested."""
    raw = gateway.complete(
        PromptRequest(
            "eq_from_paper_more",
            {
                "topic": topic.text,
                "title": paper.title,
                "existing": "\n".join(f"- {q}" for q in existing) or "- (none)",
            },
        )
    )
    discipline = paper.effective_disciplines[0]
    drafts = []
    for item in parse_list_output(raw):
        cleaned, flags = validate_question(item)
        drafts.append(
            EqDraft(text=cleaned, discipline=discipline, origin="paper_seeded", flags=flags)
        )
    return drafts


def dedupe_questions(
    items: Sequence,
    embedder: Embedder,
    threshold: float = NEAR_DUPLICATE_SIMILARITY,
) -> list:
    """Remove exact and near-duplicate questions, keeping first occurrences.

    Accepts any sequence of objects with a .text attribute (drafts or
    stored questions) and returns the surviving subset in input order.
    Running it twice changes nothing: survivors are pairwise dissimilar.
    """
    survivors = []
    texts_seen: set[str] = set()
    kept_vectors = []
    pending = [item for item in items]
    if not pending:
        return []
    vectors = embedder([item.text for item in pending])
    for item, vector in zip(pending, vectors):
        normalized = item.text.strip().lower()
        if normalized in texts_seen:
            continue
        if any(cosine_similarity(vector, kept) > threshold for kept in kept_vectors):
            continue
        texts_seen.add(normalized)
        kept_vectors.append(vector)
        survivors.append(item)
    return survivors


def questions_from_paper(
    topic: ResearchTopic,
    paper: PaperRecord,
    existing_questions: Sequence[ExploratoryQuestion],
    gateway: LlmGateway,
    embedder: Embedder,
    focus_keywords: Sequence[str] = (),
    want: int = DEFAULT_NUM_RQ,
) -> list[EqDraft]:
    """Paper-seeded drafts, deduplicated against the session's questions.

    If dedup leaves fewer than `want` drafts, one retry round asks for
    alternatives; whatever survives after that is returned, capped at
    `want`.
    """
    drafts = draft_from_paper(topic, paper, gateway, focus_keywords=focus_keywords)
    survivors = _against_existing(drafts, existing_questions, embedder)
    if len(survivors) < want:
        known = [q.text for q in existing_questions] + [d.text for d in survivors]
        retry = draft_more_from_paper(topic, paper, known, gateway)
        survivors = _against_existing(survivors + retry, existing_questions, embedder)
    return survivors[:want]


def _against_existing(
    drafts: Sequence[EqDraft],
    existing: Sequence[ExploratoryQuestion],
    embedder: Embedder,
) -> list[EqDraft]:
    """Dedupe drafts among themselves and against already-stored questions."""
    merged = list(existing) + list(drafts)
    survivors = dedupe_questions(merged, embedder)
    return [item for item in survivors if isinstance(item, EqDraft)]
