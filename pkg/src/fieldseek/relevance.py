"""Relevance primitives: similarity, keyphrase gating, contextual paper
embeddings, and key-sentence selection.

A paper's contextual embedding concatenates three unit segments so that
downstream cosine over the whole vector averages three signals: raw text
similarity, discipline agreement with the active question, and similarity
of the paper's relevant keyphrases to the question's concepts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, MissingEmbedding, ZeroVector
from .model import ConceptPhrase, ExplorationContext, PaperRecord, Vector
from .text import extract_concepts, split_sentences, tokenize

# Keyphrase relevance gate: a phrase counts only when its best concept
# similarity strictly exceeds tau.
DEFAULT_TAU = 0.6

Embedder = Callable[[list[str]], list[Vector]]


def cosine_similarity(a: Vector, b: Vector) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine undefined for zero-length vector")
    return float(np.dot(a, b) / (norm_a * norm_b))


def relevant_phrases(
    phrases: Sequence[ConceptPhrase],
    concepts: Sequence[ConceptPhrase],
    tau: float = DEFAULT_TAU,
) -> list[ConceptPhrase]:
    """Keep phrases whose best similarity to any concept is strictly above tau.

    Order is preserved. Both sides must carry embeddings.
    """
    for item in list(phrases) + list(concepts):
        if item.embedding is None:
            raise MissingEmbedding(f"phrase {item.text!r} has no embedding")
    kept = []
    for phrase in phrases:
        best = max(
            (cosine_similarity(phrase.embedding, concept.embedding) for concept in concepts),
            default=0.0,
        )
        if best > tau:
            kept.append(phrase)
    return kept


@dataclass
class ContextualConfig:
    tau: float = DEFAULT_TAU
    text_weight: float = 1.0
    discipline_weight: float = 1.0
    keyphrase_weight: float = 1.0


@dataclass
class ContextualEmbedding:
    """A paper embedded relative to one exploration context."""

    paper_id: str
    vector: Vector
    relevant_phrases: tuple[str, ...] = ()
    discipline_matched: bool = False


def _unit(vector: Vector) -> Vector:
    norm = float(np.linalg.norm(vector))
    if norm == 0.0:
        raise ZeroVector("cannot normalize zero vector")
    return vector / norm


def contextual_embedding(
    paper: PaperRecord,
    context: ExplorationContext,
    embedder: Embedder,
    config: ContextualConfig | None = None,
) -> ContextualEmbedding:
    """Embed a paper as three concatenated weighted unit segments.

    Segment 1: the paper's title+abstract text. Segment 2: the question's
    discipline name when the paper is tagged with it, else zeros. Segment 3:
    mean of the paper's keyphrase embeddings that pass the tau gate against
    the context concepts, else zeros. Zero segments keep concatenation
    dimensions stable while contributing nothing to cosine.
    """
    config = config or ContextualConfig()
    concept_texts = list(context.concepts)
    phrase_texts = extract_concepts(paper.metadata_text)

    to_embed = [paper.metadata_text, context.eq.discipline] + concept_texts + phrase_texts
    vectors = embedder(to_embed)
    text_vec = vectors[0]
    discipline_vec = vectors[1]
    concept_vecs = vectors[2 : 2 + len(concept_texts)]
    phrase_vecs = vectors[2 + len(concept_texts) :]

    dim = text_vec.shape[0]

    concepts = [
        ConceptPhrase(text, embedding=vec) for text, vec in zip(concept_texts, concept_vecs)
    ]
    phrases = [ConceptPhrase(text, embedding=vec) for text, vec in zip(phrase_texts, phrase_vecs)]
    kept = relevant_phrases(phrases, concepts, tau=config.tau) if concepts else []

    segments = [config.text_weight * _unit(text_vec)]

    matched = context.eq.discipline in paper.effective_disciplines
    if matched:
        segments.append(config.discipline_weight * _unit(discipline_vec))
    else:
        segments.append(np.zeros(dim))

    if kept:
        mean_phrase = np.mean([p.embedding for p in kept], axis=0)
        segments.append(config.keyphrase_weight * _unit(mean_phrase))
    else:
        segments.append(np.zeros(dim))

    return ContextualEmbedding(
        paper_id=paper.paper_id,
        vector=np.concatenate(segments),
        relevant_phrases=tuple(p.text for p in kept),
        discipline_matched=matched,
    )


@dataclass
class SentencePick:
    """Outcome of key-sentence selection over an abstract."""

    index: int
    sentence: str
    covered_concepts: tuple[str, ...] = ()
    spans: tuple[tuple[int, int], ...] = ()


def _covered(sentence: str, concept_tokens: dict[str, frozenset[str]]) -> list[str]:
    sentence_tokens = set(tokenize(sentence))
    return [
        concept
        for concept, tokens in concept_tokens.items()
        if tokens and tokens <= sentence_tokens
    ]


def key_sentence(abstract: str, concepts: Sequence[str]) -> SentencePick:
    """Pick the sentence covering the most concepts; ties go to the earliest.

    A concept is covered when every one of its tokens appears in the
    sentence. An abstract with no coverage anywhere yields index 0 with an
    empty concept tuple.
    """
    sentences = split_sentences(abstract)
    if not sentences:
        return SentencePick(index=0, sentence="", covered_concepts=())
    concept_tokens = {c: frozenset(tokenize(c)) for c in concepts}
    best_index = 0
    best_covered: list[str] = []
    for i, sentence in enumerate(sentences):
        covered = _covered(sentence, concept_tokens)
        if len(covered) > len(best_covered):
            best_index, best_covered = i, covered
    if not best_covered:
        return SentencePick(index=0, sentence=sentences[0], covered_concepts=())
    picked = sentences[best_index]
    return SentencePick(
        index=best_index,
        sentence=picked,
        covered_concepts=tuple(best_covered),
        spans=concept_spans(picked, best_covered),
    )


def concept_spans(sentence: str, concepts: Sequence[str]) -> tuple[tuple[int, int], ...]:
    """Character spans of each covered concept's first occurrence, for
    highlighting. Concepts whose exact text does not occur contiguously
    produce per-token spans instead."""
    lowered = sentence.lower()
    spans: list[tuple[int, int]] = []
    for concept in concepts:
        needle = concept.lower()
        at = lowered.find(needle)
        if at >= 0:
            spans.append((at, at + len(needle)))
            continue
        for token in tokenize(concept):
            at = lowered.find(token)
            if at >= 0:
                spans.append((at, at + len(token)))
    spans.sort()
    merged: list[tuple[int, int]] = []
    for start, end in spans:
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return tuple(merged)
