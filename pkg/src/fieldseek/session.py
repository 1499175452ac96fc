"""Session state: questions, retrieved papers, explorations, collections.

One session is a plain JSON document on disk. Writes are atomic
(temp file + rename) and carry a checksum over the canonical state body so
a torn or hand-edited file is detected on load instead of silently
corrupting later saves. All mutation goes through SessionState methods,
which maintain the structural invariants checked by check_invariants.
"""
from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import CorruptState, NotFound, PreconditionFailed, UnknownEntity
from .model import ExploratoryQuestion, PaperRecord, ResearchTopic, normalize_topic
from .queries import QueryExpansion
from .questions import EqDraft
from .ranking import EngagementHistory
from .theming import Theme, ThemeSet

SCHEMA_VERSION = 1
UNSORTED_COLLECTION = "Unsorted"

EDIT_OPS = (
    "drop_theme",
    "drop_paper",
    "move_paper",
    "remove_paper",
    "rename_collection",
    "delete_collection",
)


@dataclass
class PaperAnnotation:
    """Presentation hints for one paper within one exploration."""

    paper_id: str
    key_sentence_index: int = 0
    key_sentence: str = ""
    covered_concepts: tuple[str, ...] = ()
    spans: tuple[tuple[int, int], ...] = ()
    relevant_phrases: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "key_sentence_index": self.key_sentence_index,
            "key_sentence": self.key_sentence,
            "covered_concepts": list(self.covered_concepts),
            "spans": [list(span) for span in self.spans],
            "relevant_phrases": list(self.relevant_phrases),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "PaperAnnotation":
        return cls(
            paper_id=raw["paper_id"],
            key_sentence_index=raw["key_sentence_index"],
            key_sentence=raw.get("key_sentence", ""),
            covered_concepts=tuple(raw.get("covered_concepts", [])),
            spans=tuple(tuple(span) for span in raw.get("spans", [])),
            relevant_phrases=tuple(raw.get("relevant_phrases", [])),
        )


@dataclass
class Exploration:
    """Completed exploration of one question."""

    eq_id: str
    expansion: QueryExpansion
    paper_ids: list[str]
    theme_set: ThemeSet
    annotations: dict[str, PaperAnnotation] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "eq_id": self.eq_id,
            "expansion": {
                "eq_id": self.expansion.eq_id,
                "pseudo_answers": list(self.expansion.pseudo_answers),
                "terms": list(self.expansion.terms),
                "queries": list(self.expansion.queries),
                "padded": self.expansion.padded,
            },
            "paper_ids": list(self.paper_ids),
            "themes": [
                {
                    "theme_id": t.theme_id,
                    "title": t.title,
                    "paper_ids": list(t.paper_ids),
                    "parent_id": t.parent_id,
                }
                for t in self.theme_set.themes
            ],
            "possibly_relevant": list(self.theme_set.possibly_relevant),
            "annotations": {
                pid: ann.to_dict() for pid, ann in sorted(self.annotations.items())
            },
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Exploration":
        expansion = QueryExpansion(
            eq_id=raw["expansion"]["eq_id"],
            pseudo_answers=tuple(raw["expansion"]["pseudo_answers"]),
            terms=tuple(raw["expansion"]["terms"]),
            queries=tuple(raw["expansion"]["queries"]),
            padded=raw["expansion"].get("padded", 0),
        )
        theme_set = ThemeSet(
            eq_id=raw["eq_id"],
            themes=[
                Theme(
                    theme_id=t["theme_id"],
                    title=t["title"],
                    paper_ids=list(t["paper_ids"]),
                    parent_id=t.get("parent_id"),
                )
                for t in raw["themes"]
            ],
            possibly_relevant=list(raw["possibly_relevant"]),
        )
        return cls(
            eq_id=raw["eq_id"],
            expansion=expansion,
            paper_ids=list(raw["paper_ids"]),
            theme_set=theme_set,
            annotations={
                pid: PaperAnnotation.from_dict(ann)
                for pid, ann in raw.get("annotations", {}).items()
            },
        )


@dataclass
class Collection:
    """A user-curated bucket of papers, usually seeded from a theme."""

    collection_id: str
    name: str
    paper_ids: list[str] = field(default_factory=list)
    source_theme_id: str | None = None

    def to_dict(self) -> dict:
        return {
            "collection_id": self.collection_id,
            "name": self.name,
            "paper_ids": list(self.paper_ids),
            "source_theme_id": self.source_theme_id,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Collection":
        return cls(
            collection_id=raw["collection_id"],
            name=raw["name"],
            paper_ids=list(raw["paper_ids"]),
            source_theme_id=raw.get("source_theme_id"),
        )


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class SessionState:
    """All durable facts about one seeking session."""

    def __init__(self, session_id: str, topic: ResearchTopic, created_at: str | None = None):
        self.session_id = session_id
        self.topic = topic
        self.created_at = created_at or _now()
        self.updated_at = self.created_at
        self.eqs: list[ExploratoryQuestion] = []
        self.papers: dict[str, PaperRecord] = {}
        self.explorations: dict[str, Exploration] = {}
        self.collections: list[Collection] = []
        self.engagement = EngagementHistory()
        # Papers that have ever been collected; engagement counts a paper's
        # first collection only, so repeat moves don't inflate usage.
        self.collected_ever: set[str] = set()
        self._eq_counter = 0
        self._collection_counter = 0

    @classmethod
    def create(cls, session_id: str, topic_text: str) -> "SessionState":
        return cls(session_id=session_id, topic=normalize_topic(topic_text))

    # -- id allocation ------------------------------------------------

    def _next_eq_id(self) -> str:
        self._eq_counter += 1
        return f"eq-{self._eq_counter}"

    def _next_collection_id(self) -> str:
        self._collection_counter += 1
        return f"col-{self._collection_counter}"

    def touch(self) -> None:
        self.updated_at = _now()

    # -- questions ------------------------------------------------------

    def add_question(self, draft: EqDraft) -> ExploratoryQuestion:
        eq = ExploratoryQuestion(
            id=self._next_eq_id(),
            text=draft.text,
            discipline=draft.discipline,
            subfield=draft.subfield,
            origin=draft.origin,
            flags=draft.flags,
        )
        self.eqs.append(eq)
        self.touch()
        return eq

    def get_question(self, eq_id: str) -> ExploratoryQuestion:
        for eq in self.eqs:
            if eq.id == eq_id:
                return eq
        raise UnknownEntity(f"no question {eq_id}")

    def update_question(
        self, eq_id: str, text: str | None = None, selected: bool | None = None
    ) -> ExploratoryQuestion:
        for i, eq in enumerate(self.eqs):
            if eq.id != eq_id:
                continue
            if text is not None:
                eq = eq.edited(text)
            if selected is not None:
                eq = eq.with_selected(selected)
            self.eqs[i] = eq
            self.touch()
            return eq
        raise UnknownEntity(f"no question {eq_id}")

    # -- papers and explorations -----------------------------------------

    def record_papers(self, papers: list[PaperRecord]) -> None:
        for paper in papers:
            self.papers.setdefault(paper.paper_id, paper)
        self.touch()

    def get_paper(self, paper_id: str) -> PaperRecord:
        paper = self.papers.get(paper_id)
        if paper is None:
            raise UnknownEntity(f"no paper {paper_id}")
        return paper

    def set_exploration(self, exploration: Exploration) -> None:
        self.get_question(exploration.eq_id)
        self.explorations[exploration.eq_id] = exploration
        self.touch()

    def get_exploration(self, eq_id: str) -> Exploration:
        exploration = self.explorations.get(eq_id)
        if exploration is None:
            raise NotFound(f"question {eq_id} has not been explored")
        return exploration

    # -- collections ------------------------------------------------------

    def get_collection(self, collection_id: str) -> Collection:
        for collection in self.collections:
            if collection.collection_id == collection_id:
                return collection
        raise UnknownEntity(f"no collection {collection_id}")

    def find_collection_by_name(self, name: str) -> Collection | None:
        for collection in self.collections:
            if collection.name == name:
                return collection
        return None

    def create_collection(self, name: str, source_theme_id: str | None = None) -> Collection:
        name = name.strip()
        if not name:
            raise PreconditionFailed("collection name cannot be empty")
        collection = Collection(
            collection_id=self._next_collection_id(),
            name=name,
            source_theme_id=source_theme_id,
        )
        self.collections.append(collection)
        self.touch()
        return collection

    def _collect_paper(self, collection: Collection, paper_id: str) -> bool:
        """Add a paper to a collection; returns False when already present.

        First-ever collection of a paper credits each of its disciplines in
        the engagement history.
        """
        self.get_paper(paper_id)
        if paper_id in collection.paper_ids:
            return False
        collection.paper_ids.append(paper_id)
        if paper_id not in self.collected_ever:
            self.collected_ever.add(paper_id)
            for name in self.papers[paper_id].effective_disciplines:
                self.engagement.record_collection(name)
        return True

    # -- edit operations ---------------------------------------------------

    def apply_edits(self, edits: list[dict]) -> dict:
        """Apply a batch of collection edits; returns a summary.

        The batch is not transactional: each edit applies in order and a bad
        edit raises, leaving earlier ones in place. Callers wanting
        all-or-nothing semantics should validate first.
        """
        applied = 0
        for edit in edits:
            op = edit.get("op")
            if op not in EDIT_OPS:
                raise PreconditionFailed(f"unknown edit op: {op!r}")
            getattr(self, f"_edit_{op}")(edit)
            applied += 1
        self.touch()
        return {
            "applied": applied,
            "collections": [
                {
                    "collection_id": c.collection_id,
                    "name": c.name,
                    "size": len(c.paper_ids),
                }
                for c in self.collections
            ],
        }

    def _find_theme(self, theme_id: str) -> Theme:
        for exploration in self.explorations.values():
            for theme in exploration.theme_set.themes:
                if theme.theme_id == theme_id:
                    return theme
        raise UnknownEntity(f"no theme {theme_id}")

    def _edit_drop_theme(self, edit: dict) -> None:
        """Save a whole theme: its collection keeps the theme's title."""
        theme = self._find_theme(edit["theme_id"])
        collection_id = edit.get("collection_id")
        if collection_id:
            collection = self.get_collection(collection_id)
        else:
            collection = self.find_collection_by_name(theme.title) or self.create_collection(
                theme.title, source_theme_id=theme.theme_id
            )
        for paper_id in theme.paper_ids:
            self._collect_paper(collection, paper_id)

    def _edit_drop_paper(self, edit: dict) -> None:
        collection_id = edit.get("collection_id")
        if collection_id:
            collection = self.get_collection(collection_id)
        else:
            collection = self.find_collection_by_name(UNSORTED_COLLECTION) or self.create_collection(
                UNSORTED_COLLECTION
            )
        self._collect_paper(collection, edit["paper_id"])

    def _edit_move_paper(self, edit: dict) -> None:
        source = self.get_collection(edit["from_collection"])
        target = self.get_collection(edit["to_collection"])
        paper_id = edit["paper_id"]
        if paper_id not in source.paper_ids:
            raise UnknownEntity(f"paper {paper_id} not in collection {source.collection_id}")
        source.paper_ids.remove(paper_id)
        self._collect_paper(target, paper_id)

    def _edit_remove_paper(self, edit: dict) -> None:
        collection = self.get_collection(edit["collection_id"])
        paper_id = edit["paper_id"]
        if paper_id not in collection.paper_ids:
            raise UnknownEntity(f"paper {paper_id} not in collection {collection.collection_id}")
        collection.paper_ids.remove(paper_id)

    def _edit_rename_collection(self, edit: dict) -> None:
        collection = self.get_collection(edit["collection_id"])
        name = str(edit.get("name", "")).strip()
        if not name:
            raise PreconditionFailed("collection name cannot be empty")
        collection.name = name

    def _edit_delete_collection(self, edit: dict) -> None:
        collection = self.get_collection(edit["collection_id"])
        self.collections.remove(collection)

    # -- invariants ------------------------------------------------------

    def check_invariants(self) -> None:
        """Raise AssertionError when structural invariants are broken."""
        eq_ids = [eq.id for eq in self.eqs]
        assert len(eq_ids) == len(set(eq_ids)), "duplicate question ids"
        col_ids = [c.collection_id for c in self.collections]
        assert len(col_ids) == len(set(col_ids)), "duplicate collection ids"
        for collection in self.collections:
            assert collection.name.strip(), "empty collection name"
            assert len(collection.paper_ids) == len(set(collection.paper_ids)), (
                f"duplicate papers in {collection.collection_id}"
            )
            for paper_id in collection.paper_ids:
                assert paper_id in self.papers, f"collection references unknown paper {paper_id}"
                assert paper_id in self.collected_ever, (
                    f"collected paper {paper_id} missing from collected_ever"
                )
        for eq_id, exploration in self.explorations.items():
            assert eq_id == exploration.eq_id, "exploration keyed under wrong question"
            for paper_id in exploration.theme_set.all_paper_ids():
                assert paper_id in self.papers, f"theme references unknown paper {paper_id}"

    # -- serialization ------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "topic": {"text": self.topic.text, "concepts": list(self.topic.concepts)},
            "eqs": [eq.to_dict() for eq in self.eqs],
            "papers": {pid: p.to_dict() for pid, p in sorted(self.papers.items())},
            "explorations": {
                eq_id: e.to_dict() for eq_id, e in sorted(self.explorations.items())
            },
            "collections": [c.to_dict() for c in self.collections],
            "engagement": self.engagement.to_dict(),
            "collected_ever": sorted(self.collected_ever),
            "counters": {"eq": self._eq_counter, "collection": self._collection_counter},
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "SessionState":
        topic = ResearchTopic(
            text=raw["topic"]["text"], concepts=tuple(raw["topic"]["concepts"])
        )
        state = cls(session_id=raw["session_id"], topic=topic, created_at=raw["created_at"])
        state.updated_at = raw["updated_at"]
        state.eqs = [ExploratoryQuestion.from_dict(e) for e in raw["eqs"]]
        state.papers = {pid: PaperRecord.from_dict(p) for pid, p in raw["papers"].items()}
        state.explorations = {
            eq_id: Exploration.from_dict(e) for eq_id, e in raw["explorations"].items()
        }
        state.collections = [Collection.from_dict(c) for c in raw["collections"]]
        state.engagement = EngagementHistory.from_dict(raw["engagement"])
        state.collected_ever = set(raw["collected_ever"])
        state._eq_counter = raw["counters"]["eq"]
        state._collection_counter = raw["counters"]["collection"]
        return state


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class SessionStore:
    """One JSON file per session under a data directory."""

    def __init__(self, data_dir: Path | str):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    def _path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.json"

    def save(self, state: SessionState) -> None:
        state.check_invariants()
        body = state.to_dict()
        document = {
            "schema_version": SCHEMA_VERSION,
            "checksum": hashlib.sha256(_canonical(body).encode("utf-8")).hexdigest(),
            "state": body,
        }
        path = self._path(state.session_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(document, sort_keys=True, indent=1), encoding="utf-8")
        tmp.replace(path)

    def load(self, session_id: str) -> SessionState:
        path = self._path(session_id)
        if not path.is_file():
            raise NotFound(f"no session {session_id}")
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptState(f"session file unreadable: {exc}") from exc
        if document.get("schema_version") != SCHEMA_VERSION:
            raise CorruptState(f"unsupported schema version {document.get('schema_version')!r}")
        body = document.get("state")
        checksum = document.get("checksum")
        if not isinstance(body, dict) or not isinstance(checksum, str):
            raise CorruptState("session file missing state or checksum")
        actual = hashlib.sha256(_canonical(body).encode("utf-8")).hexdigest()
        if actual != checksum:
            raise CorruptState("session checksum mismatch")
        return SessionState.from_dict(body)

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).is_file()

    def list_sessions(self) -> list[str]:
        return sorted(p.stem for p in self.data_dir.glob("*.json"))
