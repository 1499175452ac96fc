"""Deterministic English text utilities: tokenizing, concept chunking, sentence splitting.

Everything here is pure and dependency-free so the same inputs always
produce the same outputs, which the scripted pipelines rely on.
"""
from __future__ import annotations

import re

# Function words that terminate a concept chunk. Deliberately small and frozen:
# growing it changes concept extraction everywhere.
STOPWORDS = frozenset(
    """
    a about above after again against all am among an and any are aren't as at
    be because been before being below between both but by can cannot could
    couldn't did didn't do does doesn't doing don't down during each few for
    from further had hadn't has hasn't have haven't having he her here hers
    herself him himself his how i if in into is isn't it its itself just let's
    may me might more most mustn't my myself no nor not of off on once only or
    other ought our ours ourselves out over own per same shan't she should
    shouldn't so some such than that the their theirs them themselves then
    there these they this those through to too towards under until up upon very
    via was wasn't we were weren't what when where which while who whom why
    will with within without won't would wouldn't you your yours yourself
    yourselves
    """.split()
)

_WORD_RE = re.compile(r"[a-z0-9]+(?:[-'][a-z0-9]+)*")
_SEGMENT_SPLIT_RE = re.compile(r"[.,;:!?()\[\]{}<>\"“”‘’/\\|—–…]+")

_ABBREVIATIONS = frozenset(
    {"e.g", "i.e", "etc", "al", "fig", "eq", "vs", "cf", "dr", "mr", "ms", "prof", "no", "vol", "pp"}
)

MAX_CONCEPT_SPAN = 4


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; hyphenated and apostrophized words stay single tokens."""
    return _WORD_RE.findall(text.lower())


def extract_concepts(text: str, max_span: int = MAX_CONCEPT_SPAN) -> list[str]:
    """Extract concept phrases by chunking on punctuation and stopwords.

    Each maximal run of non-stopword tokens between boundaries becomes a
    phrase; runs longer than ``max_span`` tokens are cut into consecutive
    spans of at most ``max_span``. Output is lowercased, order-preserving,
    and deduplicated. Stopword-only input yields nothing.
    """
    phrases: list[str] = []
    seen: set[str] = set()
    for segment in _SEGMENT_SPLIT_RE.split(text):
        run: list[str] = []
        for token in tokenize(segment):
            if token in STOPWORDS:
                _flush_run(run, phrases, seen, max_span)
                run = []
            else:
                run.append(token)
        _flush_run(run, phrases, seen, max_span)
    return phrases


def _flush_run(run: list[str], phrases: list[str], seen: set[str], max_span: int) -> None:
    for start in range(0, len(run), max_span):
        phrase = " ".join(run[start : start + max_span])
        if phrase and phrase not in seen:
            seen.add(phrase)
            phrases.append(phrase)


def split_sentences(text: str) -> list[str]:
    """Split on ./?/! followed by whitespace and an uppercase or digit start.

    A short abbreviation guard keeps "e.g." and friends from breaking a
    sentence. Returns stripped non-empty sentences; a text without
    terminators comes back as one sentence.
    """
    text = text.strip()
    if not text:
        return []
    sentences: list[str] = []
    start = 0
    for match in re.finditer(r"[.!?]+(?=\s+[A-Z0-9\"'])", text):
        end = match.end()
        prefix = text[start : match.start()]
        last_word = prefix.rsplit(None, 1)[-1].lower().lstrip("(\"'") if prefix.split() else ""
        if last_word.rstrip(".") in _ABBREVIATIONS or last_word in _ABBREVIATIONS:
            continue
        sentence = text[start:end].strip()
        if sentence:
            sentences.append(sentence)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences
