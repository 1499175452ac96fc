"""Concreteness scoring for search queries.

Scores come from a word-norm lexicon rating words on a 100-700 scale,
higher meaning more concrete. A query's score is the mean rating of its
covered words; a query set reports the mean and population standard
deviation over per-query scores plus how much of the vocabulary the
lexicon covered. Used to compare query generation strategies: grounding
queries in pseudo answers should push scores up.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .errors import NoCoveredWords
from .text import tokenize

RATING_MIN = 100.0
RATING_MAX = 700.0


def bundled_lexicon_path() -> Path:
    return Path(str(resources.files("fieldseek") / "assets" / "lexicon.tsv"))


def load_lexicon(path: Path | str | None = None) -> dict[str, float]:
    """Load a word<TAB>rating lexicon.

    Resolution order: explicit path, MRC_LEXICON_PATH, bundled default.
    Ratings outside [100, 700] or unparseable lines are rejected loudly;
    a silent skip would bias every downstream mean.
    """
    if path is None:
        path = os.environ.get("MRC_LEXICON_PATH") or bundled_lexicon_path()
    path = Path(path)
    lexicon: dict[str, float] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            word, rating_text = line.split("\t")
            rating = float(rating_text)
        except ValueError as exc:
            raise ValueError(f"{path}:{line_no}: bad lexicon line {line!r}") from exc
        if not RATING_MIN <= rating <= RATING_MAX:
            raise ValueError(f"{path}:{line_no}: rating {rating} outside [100, 700]")
        lexicon[word.lower()] = rating
    return lexicon


def query_concreteness(query: str, lexicon: Mapping[str, float]) -> float:
    """Mean rating of the query's lexicon-covered words."""
    ratings = [lexicon[token] for token in tokenize(query) if token in lexicon]
    if not ratings:
        raise NoCoveredWords(f"no lexicon words in query {query!r}")
    return sum(ratings) / len(ratings)


@dataclass(frozen=True)
class ConcretenessReport:
    mean: float
    sd: float
    coverage: float
    per_query: tuple[float, ...]
    skipped: int = 0


def score_query_set(queries: Sequence[str], lexicon: Mapping[str, float]) -> ConcretenessReport:
    """Score a set of queries; queries with zero covered words are skipped
    from the mean but counted against coverage."""
    if not queries:
        raise ValueError("empty query set")
    scores = []
    skipped = 0
    covered_tokens = 0
    total_tokens = 0
    for query in queries:
        tokens = tokenize(query)
        total_tokens += len(tokens)
        covered_tokens += sum(1 for t in tokens if t in lexicon)
        try:
            scores.append(query_concreteness(query, lexicon))
        except NoCoveredWords:
            skipped += 1
    if not scores:
        raise NoCoveredWords("no query had any lexicon-covered word")
    mean = sum(scores) / len(scores)
    variance = sum((s - mean) ** 2 for s in scores) / len(scores)
    coverage = covered_tokens / total_tokens if total_tokens else 0.0
    return ConcretenessReport(
        mean=mean,
        sd=math.sqrt(variance),
        coverage=coverage,
        per_query=tuple(scores),
        skipped=skipped,
    )
