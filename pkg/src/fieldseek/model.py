"""Shared domain types. Immutable value objects, no I/O."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from .errors import EmptyTopic
from .text import extract_concepts

Vector = np.ndarray

EQ_ORIGINS = ("topic_seeded", "paper_seeded", "user_created", "user_edited")


@dataclass(frozen=True)
class ResearchTopic:
    """A user's research topic plus the concept phrases extracted from it."""

    text: str
    concepts: tuple[str, ...]


def normalize_topic(text: str) -> ResearchTopic:
    """Collapse whitespace and concept-extract a raw topic string.

    Raises EmptyTopic when nothing but whitespace was given. The topic text
    feeds prompt variables, so equal-up-to-spacing inputs must normalize to
    the same topic.
    """
    cleaned = " ".join(text.split())
    if not cleaned:
        raise EmptyTopic("research topic is empty")
    return ResearchTopic(text=cleaned, concepts=tuple(extract_concepts(cleaned)))


@dataclass(frozen=True)
class ExploratoryQuestion:
    """A discipline-tagged question co-edited by the user and the system."""

    id: str
    text: str
    discipline: str
    subfield: Optional[str] = None
    origin: str = "topic_seeded"
    selected: bool = False
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.origin not in EQ_ORIGINS:
            raise ValueError(f"unknown EQ origin: {self.origin!r}")

    def edited(self, new_text: str) -> "ExploratoryQuestion":
        """An edit keeps the id and marks the question user_edited."""
        return replace(self, text=new_text, origin="user_edited", flags=())

    def with_selected(self, selected: bool) -> "ExploratoryQuestion":
        return replace(self, selected=selected)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "text": self.text,
            "discipline": self.discipline,
            "subfield": self.subfield,
            "origin": self.origin,
            "selected": self.selected,
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExploratoryQuestion":
        return cls(
            id=data["id"],
            text=data["text"],
            discipline=data["discipline"],
            subfield=data.get("subfield"),
            origin=data.get("origin", "topic_seeded"),
            selected=bool(data.get("selected", False)),
            flags=tuple(data.get("flags", ())),
        )


@dataclass(frozen=True)
class PaperRecord:
    """Metadata of one retrieved paper; paper_id is the dedup key."""

    paper_id: str
    title: str
    abstract: str = ""
    disciplines: tuple[str, ...] = ()
    year: Optional[int] = None
    venue: Optional[str] = None
    authors: tuple[str, ...] = ()
    citation_count: int = 0

    @property
    def effective_disciplines(self) -> tuple[str, ...]:
        """Disciplines with the 'Unknown' sentinel standing in for an empty list."""
        return self.disciplines if self.disciplines else ("Unknown",)

    @property
    def metadata_text(self) -> str:
        return f"{self.title}. {self.abstract}".strip()

    def to_dict(self) -> dict[str, Any]:
        return {
            "paper_id": self.paper_id,
            "title": self.title,
            "abstract": self.abstract,
            "disciplines": list(self.disciplines),
            "year": self.year,
            "venue": self.venue,
            "authors": list(self.authors),
            "citation_count": self.citation_count,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PaperRecord":
        return cls(
            paper_id=str(data["paper_id"]),
            title=data.get("title", ""),
            abstract=data.get("abstract") or "",
            disciplines=tuple(data.get("disciplines", ())),
            year=data.get("year"),
            venue=data.get("venue"),
            authors=tuple(data.get("authors", ())),
            citation_count=int(data.get("citation_count", 0) or 0),
        )


@dataclass(frozen=True)
class ConceptPhrase:
    """A short lowercase phrase, optionally carrying its embedding."""

    text: str
    embedding: Optional[Vector] = field(default=None, compare=False)

    def with_embedding(self, vector: Vector) -> "ConceptPhrase":
        return replace(self, embedding=vector)


@dataclass(frozen=True)
class ExplorationContext:
    """The (topic, selected EQ) pair plus the concept set every relevance check uses."""

    topic: ResearchTopic
    eq: ExploratoryQuestion
    concepts: tuple[str, ...]

    @classmethod
    def build(cls, topic: ResearchTopic, eq: ExploratoryQuestion) -> "ExplorationContext":
        """Concept set = topic concepts followed by new EQ concepts, order-preserving."""
        merged = list(topic.concepts)
        seen = set(merged)
        for phrase in extract_concepts(eq.text):
            if phrase not in seen:
                seen.add(phrase)
                merged.append(phrase)
        return cls(topic=topic, eq=eq, concepts=tuple(merged))
