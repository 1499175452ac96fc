"""Query expansion: question -> pseudo answers -> terms -> search queries.

Retrieval quality hinges on concrete search strings, so instead of
querying with the question text the engine first drafts short hypothetical
answers, mines them for domain terms, and only then asks for keyword
queries grounded in those terms. Each explored question always yields
exactly QUERY_COUNT queries: overshoot is truncated, shortfall triggers
one retry round and then deterministic padding from the mined terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .gateway import LlmGateway, PromptRequest
from .model import ExplorationContext
from .questions import parse_list_output
from .scholar import MAX_QUERY_LENGTH, check_query
from .text import tokenize

QUERY_COUNT = 9


@dataclass(frozen=True)
class QueryExpansion:
    """Audit record of one expansion: every intermediate stays inspectable."""

    eq_id: str
    pseudo_answers: tuple[str, ...]
    terms: tuple[str, ...]
    queries: tuple[str, ...]
    padded: int = 0

    def __post_init__(self) -> None:
        if len(self.queries) != QUERY_COUNT:
            raise ValueError(f"expected {QUERY_COUNT} queries, got {len(self.queries)}")


def _clean_queries(raw_items: list[str]) -> list[str]:
    """Validate and dedupe candidate queries, preserving order."""
    queries = []
    seen = set()
    for item in raw_items:
        candidate = item.strip().strip('"')
        if not candidate or len(candidate) > MAX_QUERY_LENGTH:
            continue
        key = candidate.lower()
        if key in seen:
            continue
        seen.add(key)
        queries.append(check_query(candidate))
    return queries


def _padding_candidates(context: ExplorationContext, terms: tuple[str, ...]) -> Iterator[str]:
    """Endless stream of deterministic fallback queries.

    Single terms first, then adjacent term pairs, then each term paired
    with a topic concept, then numbered keyword stubs from the question
    itself. The last family is unbounded, so padding always terminates.
    """
    for term in terms:
        yield term
    for left, right in zip(terms, terms[1:]):
        yield f"{left} {right}"
    for term in terms:
        for concept in context.topic.concepts:
            yield f"{term} {concept}"
    stub = " ".join(tokenize(context.eq.text)[:4]) or "general"
    counter = 1
    while True:
        yield f"{stub} aspect {counter}"
        counter += 1


def expand_question(context: ExplorationContext, gateway: LlmGateway) -> QueryExpansion:
    """Run the full chain for one question; always returns QUERY_COUNT queries."""
    question = context.eq.text
    topic = context.topic.text

    answers_raw = gateway.complete(
        PromptRequest("pseudo_answers", {"question": question, "topic": topic})
    )
    pseudo_answers = tuple(parse_list_output(answers_raw))

    terms_raw = gateway.complete(
        PromptRequest(
            "term_extraction",
            {"question": question, "answers": "\n".join(pseudo_answers) or "(none)"},
        )
    )
    terms = tuple(_clean_queries(parse_list_output(terms_raw)))

    terms_block = "\n".join(f"- {t}" for t in terms) or "- (none)"
    queries_raw = gateway.complete(
        PromptRequest("query_generation", {"question": question, "terms": terms_block})
    )
    queries = _clean_queries(parse_list_output(queries_raw))

    if len(queries) < QUERY_COUNT:
        retry_raw = gateway.complete(
            PromptRequest(
                "query_generation_more",
                {
                    "question": question,
                    "terms": terms_block,
                    "existing": "\n".join(f"- {q}" for q in queries) or "- (none)",
                },
            )
        )
        queries = _clean_queries(queries + parse_list_output(retry_raw))

    padded = 0
    if len(queries) < QUERY_COUNT:
        seen = {q.lower() for q in queries}
        for candidate in _padding_candidates(context, terms):
            if len(queries) >= QUERY_COUNT:
                break
            candidate = candidate[:MAX_QUERY_LENGTH]
            if candidate.lower() in seen:
                continue
            seen.add(candidate.lower())
            queries.append(candidate)
            padded += 1

    return QueryExpansion(
        eq_id=context.eq.id,
        pseudo_answers=pseudo_answers,
        terms=terms,
        queries=tuple(queries[:QUERY_COUNT]),
        padded=padded,
    )
