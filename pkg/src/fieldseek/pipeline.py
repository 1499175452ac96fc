"""End-to-end flows gluing the engines together.

Each function takes explicit SessionState plus a Services bundle and
mutates the state; persistence and HTTP concerns live elsewhere. The
explore flow is the core loop: expand one question into queries, retrieve,
embed in context, cluster into curated themes, and annotate each paper
with its key sentence and relevant phrases.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

from .gateway import LlmGateway, ProviderConfig
from .model import ExplorationContext, PaperRecord
from .questions import (
    DEFAULT_MAX_FIELDS,
    EqDraft,
    dedupe_questions,
    draft_for_field,
    identify_fields,
    questions_from_paper,
)
from .queries import expand_question
from .ranking import DisciplineGroup, score_disciplines
from .relevance import contextual_embedding, key_sentence
from .scholar import ScholarClient, ScholarConfig
from .session import Exploration, PaperAnnotation, SessionState
from .theming import curate_themes

logger = logging.getLogger(__name__)


@dataclass
class Services:
    """Shared clients handed to every flow."""

    gateway: LlmGateway
    scholar: ScholarClient

    @classmethod
    def from_env(cls) -> "Services":
        return cls(
            gateway=LlmGateway(ProviderConfig.from_env()),
            scholar=ScholarClient(ScholarConfig.from_env()),
        )

    @property
    def embedder(self):
        return self.gateway.embed


def generate_topic_questions(
    state: SessionState, services: Services, max_fields: int = DEFAULT_MAX_FIELDS
) -> list:
    """Fan the session topic out into per-field questions.

    Fields are identified once, each contributes a handful of drafts, and
    near-duplicates (within the batch and against questions already in the
    session) are folded before anything is stored.
    """
    paths = identify_fields(state.topic, services.gateway, max_fields=max_fields)
    drafts = []
    for path in paths:
        drafts.extend(draft_for_field(state.topic, path, services.gateway))
    survivors = dedupe_questions(list(state.eqs) + drafts, services.embedder)
    return [state.add_question(d) for d in survivors if isinstance(d, EqDraft)]


def generate_paper_questions(
    state: SessionState,
    services: Services,
    paper_id: str,
    focus_keywords: tuple[str, ...] = (),
) -> list:
    """Seed new questions from one collected paper."""
    paper = state.get_paper(paper_id)
    drafts = questions_from_paper(
        state.topic,
        paper,
        state.eqs,
        services.gateway,
        services.embedder,
        focus_keywords=focus_keywords,
    )
    return [state.add_question(d) for d in drafts]


def explore(
    state: SessionState,
    services: Services,
    eq_id: str,
    progress: Callable[[str], None] = lambda stage: None,
) -> Exploration:
    """Expand, retrieve, theme, and annotate for one question.

    progress is called with the stage name ("expanding", "searching",
    "theming") as each begins, for job status reporting. Engagement for the
    question's discipline is recorded only after the whole flow succeeds,
    so failed explorations don't count as usage.
    """
    eq = state.get_question(eq_id)
    context = ExplorationContext.build(state.topic, eq)

    progress("expanding")
    expansion = expand_question(context, services.gateway)

    progress("searching")
    papers: list[PaperRecord] = []
    seen: set[str] = set()
    for query in expansion.queries:
        for paper in services.scholar.search_papers(query):
            if paper.paper_id not in seen:
                seen.add(paper.paper_id)
                papers.append(paper)
    state.record_papers(papers)

    progress("theming")
    contextuals = [contextual_embedding(p, context, services.embedder) for p in papers]
    vectors = [c.vector for c in contextuals]
    theme_set = curate_themes(context, papers, vectors, services.gateway)

    annotations = {}
    for paper, ctx_emb in zip(papers, contextuals):
        pick = key_sentence(paper.abstract, context.concepts)
        annotations[paper.paper_id] = PaperAnnotation(
            paper_id=paper.paper_id,
            key_sentence_index=pick.index,
            key_sentence=pick.sentence,
            covered_concepts=pick.covered_concepts,
            spans=pick.spans,
            relevant_phrases=ctx_emb.relevant_phrases,
        )

    exploration = Exploration(
        eq_id=eq_id,
        expansion=expansion,
        paper_ids=[p.paper_id for p in papers],
        theme_set=theme_set,
        annotations=annotations,
    )
    state.set_exploration(exploration)
    state.engagement.record_query(eq.discipline)
    logger.info(
        "explored %s: %d papers, %d themes, %d possibly relevant",
        eq_id,
        len(papers),
        len(theme_set.themes),
        len(theme_set.possibly_relevant),
    )
    return exploration


def linked_papers(
    state: SessionState, services: Services, paper_id: str, direction: str
) -> list[DisciplineGroup]:
    """Citations or references of one paper, grouped and ranked by field."""
    linked = services.scholar.fetch_links(paper_id, direction)
    state.record_papers(linked)
    topic_vec = services.embedder([state.topic.text])[0]
    return score_disciplines(
        linked, state.engagement, topic_vec, embedder=services.embedder
    )
