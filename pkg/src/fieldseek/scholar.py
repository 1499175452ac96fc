"""Client for a scholarly-search HTTP API with caching and an offline corpus mode.

The live wire shape follows the Semantic Scholar graph API (paper search,
citations, references). Corpus mode answers every call from a bundled JSON
file so tests and headless runs are pure functions of their inputs.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

import httpx

from .errors import MalformedResponse, NetworkError, NotFound, RateLimited
from .model import PaperRecord
from .text import tokenize

# Fields-of-study vocabulary of the target search provider, plus the
# "Unknown" sentinel for untagged papers.
DISCIPLINES = (
    "Agricultural and Food Sciences",
    "Art",
    "Biology",
    "Business",
    "Chemistry",
    "Computer Science",
    "Economics",
    "Education",
    "Engineering",
    "Environmental Science",
    "Geography",
    "Geology",
    "History",
    "Law",
    "Linguistics",
    "Materials Science",
    "Mathematics",
    "Medicine",
    "Philosophy",
    "Physics",
    "Political Science",
    "Psychology",
    "Sociology",
)
UNKNOWN_DISCIPLINE = "Unknown"

MAX_QUERY_LENGTH = 300

_SEARCH_FIELDS = "title,abstract,year,venue,authors,citationCount,s2FieldsOfStudy"


def is_valid_discipline(name: str) -> bool:
    return name in DISCIPLINES or name == UNKNOWN_DISCIPLINE


def check_query(text: str) -> str:
    """Validate a keyword query string: non-empty, at most 300 characters."""
    trimmed = text.strip()
    if not trimmed:
        raise ValueError("query must be non-empty")
    if len(trimmed) > MAX_QUERY_LENGTH:
        raise ValueError(f"query exceeds {MAX_QUERY_LENGTH} characters")
    return trimmed


def bundled_corpus_path() -> Path:
    return Path(str(resources.files("fieldseek") / "assets" / "corpus.json"))


@dataclass
class ScholarConfig:
    mode: str = "corpus"
    base_url: str = "https://api.semanticscholar.org/graph/v1"
    api_key: str = ""
    cache_dir: Optional[Path] = None
    corpus_path: Path = field(default_factory=bundled_corpus_path)
    per_query_limit: int = 20
    max_in_flight: int = 5
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.mode not in ("live", "corpus"):
            raise ValueError(f"unknown scholar mode: {self.mode!r}")
        if self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)
        self.corpus_path = Path(self.corpus_path)

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "ScholarConfig":
        env = os.environ if env is None else env
        kwargs: dict = {"mode": env.get("SCHOLAR_MODE", "corpus")}
        if env.get("SCHOLAR_BASE_URL"):
            kwargs["base_url"] = env["SCHOLAR_BASE_URL"]
        if env.get("SCHOLAR_API_KEY"):
            kwargs["api_key"] = env["SCHOLAR_API_KEY"]
        if env.get("CACHE_DIR"):
            kwargs["cache_dir"] = Path(env["CACHE_DIR"])
        if env.get("SCHOLAR_CORPUS_PATH"):
            kwargs["corpus_path"] = Path(env["SCHOLAR_CORPUS_PATH"])
        return cls(**kwargs)


class ScholarClient:
    """Keyword search plus citation/reference expansion, dedup by paper id.

    Caching is read-through: when cache_dir is set, each (endpoint, query,
    limit) request persists as one JSON file under it, written atomically,
    and a repeat request returns those exact bytes without touching the
    backend.
    """

    def __init__(self, config: ScholarConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._corpus: _Corpus | None = None
        self._memory_cache: dict[str, bytes] = {}
        self._io_lock = threading.Lock()
        self._request_budget = threading.BoundedSemaphore(config.max_in_flight)
        self._client: httpx.Client | None = None
        if config.mode == "live":
            headers = {"x-api-key": config.api_key} if config.api_key else {}
            self._client = httpx.Client(
                base_url=config.base_url, headers=headers, timeout=config.timeout, transport=transport
            )

    # -- public API ------------------------------------------------------

    def search_papers(self, query: str, limit: int | None = None) -> list[PaperRecord]:
        query = check_query(query)
        limit = self.config.per_query_limit if limit is None else limit
        if not 1 <= limit <= 100:
            raise ValueError(f"limit out of range: {limit}")
        payload = self._cached(
            f"search|{query}|{limit}",
            lambda: self._search_uncached(query, limit),
        )
        return _dedupe([PaperRecord.from_dict(row) for row in payload])

    def fetch_links(self, paper_id: str, direction: str) -> list[PaperRecord]:
        if direction not in ("citations", "references"):
            raise ValueError(f"unknown link direction: {direction!r}")
        payload = self._cached(
            f"links|{direction}|{paper_id}",
            lambda: self._links_uncached(paper_id, direction),
        )
        return _dedupe([PaperRecord.from_dict(row) for row in payload])

    def get_paper(self, paper_id: str) -> PaperRecord:
        if self.config.mode == "corpus":
            record = self._load_corpus().papers_by_id.get(paper_id)
            if record is None:
                raise NotFound(f"unknown paper: {paper_id}")
            return record
        data = self._http_get(f"/paper/{paper_id}", {"fields": _SEARCH_FIELDS})
        return _record_from_live(data)

    # -- caching ----------------------------------------------------------

    def _cached(self, request_id: str, fetch) -> list[dict]:
        key = hashlib.sha256(f"{self.config.mode}|{request_id}".encode("utf-8")).hexdigest()
        with self._io_lock:
            if key in self._memory_cache:
                return json.loads(self._memory_cache[key])
            if self.config.cache_dir is not None:
                path = self.config.cache_dir / f"{key}.json"
                if path.is_file():
                    blob = path.read_bytes()
                    self._memory_cache[key] = blob
                    return json.loads(blob)
        rows = fetch()
        blob = json.dumps(rows, sort_keys=True, separators=(",", ":")).encode("utf-8")
        with self._io_lock:
            self._memory_cache[key] = blob
            if self.config.cache_dir is not None:
                self.config.cache_dir.mkdir(parents=True, exist_ok=True)
                tmp = self.config.cache_dir / f".{key}.tmp"
                tmp.write_bytes(blob)
                tmp.replace(self.config.cache_dir / f"{key}.json")
        return json.loads(blob)

    # -- corpus backend ----------------------------------------------------

    def _load_corpus(self) -> "_Corpus":
        if self._corpus is None:
            try:
                raw = json.loads(self.config.corpus_path.read_text(encoding="utf-8"))
            except FileNotFoundError as exc:
                raise NetworkError(f"corpus file missing: {self.config.corpus_path}") from exc
            except json.JSONDecodeError as exc:
                raise MalformedResponse(f"corpus file unreadable: {exc}") from exc
            self._corpus = _Corpus.parse(raw)
        return self._corpus

    def _search_uncached(self, query: str, limit: int) -> list[dict]:
        if self.config.mode == "corpus":
            return [p.to_dict() for p in self._load_corpus().search(query, limit)]
        data = self._http_get(
            "/paper/search", {"query": query, "limit": limit, "fields": _SEARCH_FIELDS}
        )
        rows = data.get("data")
        if not isinstance(rows, list):
            raise MalformedResponse("paper search payload lacks a data list")
        return [_record_from_live(row).to_dict() for row in rows]

    def _links_uncached(self, paper_id: str, direction: str) -> list[dict]:
        if self.config.mode == "corpus":
            corpus = self._load_corpus()
            if paper_id not in corpus.papers_by_id:
                raise NotFound(f"unknown paper: {paper_id}")
            linked = corpus.links(paper_id, direction)
            return [p.to_dict() for p in linked]
        data = self._http_get(
            f"/paper/{paper_id}/{direction}",
            {"fields": _SEARCH_FIELDS, "limit": 100},
        )
        rows = data.get("data")
        if not isinstance(rows, list):
            raise MalformedResponse(f"{direction} payload lacks a data list")
        wrapper_key = "citingPaper" if direction == "citations" else "citedPaper"
        return [_record_from_live(row.get(wrapper_key, row)).to_dict() for row in rows]

    # -- live transport ------------------------------------------------

    def _http_get(self, path: str, params: dict) -> dict:
        assert self._client is not None, "live transport used in corpus mode"
        try:
            with self._request_budget:
                response = self._client.get(path, params=params)
        except httpx.HTTPError as exc:
            raise NetworkError(str(exc)) from exc
        if response.status_code == 404:
            raise NotFound(f"{path} not found")
        if response.status_code == 429:
            retry_after = response.headers.get("retry-after")
            raise RateLimited(retry_after=float(retry_after) if retry_after else None)
        if response.status_code >= 400:
            raise NetworkError(f"HTTP {response.status_code} for {path}")
        try:
            return response.json()
        except ValueError as exc:
            raise MalformedResponse(f"non-JSON response for {path}") from exc


def _dedupe(records: list[PaperRecord]) -> list[PaperRecord]:
    """Drop repeated paper ids, keeping the first occurrence."""
    seen: set[str] = set()
    output = []
    for record in records:
        if record.paper_id not in seen:
            seen.add(record.paper_id)
            output.append(record)
    return output


def _record_from_live(row: dict) -> PaperRecord:
    if not isinstance(row, dict) or "paperId" not in row:
        raise MalformedResponse("paper row lacks paperId")
    fields = row.get("s2FieldsOfStudy") or []
    disciplines = []
    for entry in fields:
        name = entry.get("category") if isinstance(entry, dict) else entry
        if name and is_valid_discipline(name) and name not in disciplines:
            disciplines.append(name)
    return PaperRecord(
        paper_id=str(row["paperId"]),
        title=row.get("title") or "",
        abstract=row.get("abstract") or "",
        disciplines=tuple(disciplines),
        year=row.get("year"),
        venue=row.get("venue") or None,
        authors=tuple(a.get("name", "") for a in row.get("authors") or []),
        citation_count=int(row.get("citationCount") or 0),
    )


@dataclass
class _Corpus:
    """Offline search backend: papers plus citation/reference adjacency."""

    papers: list[PaperRecord]
    papers_by_id: dict[str, PaperRecord]
    citations: dict[str, list[str]]
    references: dict[str, list[str]]

    @classmethod
    def parse(cls, raw: dict) -> "_Corpus":
        try:
            papers = [PaperRecord.from_dict(row) for row in raw["papers"]]
        except (KeyError, TypeError) as exc:
            raise MalformedResponse(f"corpus schema invalid: {exc}") from exc
        for paper in papers:
            for name in paper.disciplines:
                if not is_valid_discipline(name):
                    raise MalformedResponse(f"corpus paper {paper.paper_id} has unknown discipline {name!r}")
        return cls(
            papers=papers,
            papers_by_id={p.paper_id: p for p in papers},
            citations={k: list(v) for k, v in raw.get("citations", {}).items()},
            references={k: list(v) for k, v in raw.get("references", {}).items()},
        )

    def search(self, query: str, limit: int) -> list[PaperRecord]:
        """Token-overlap match in corpus (provider) order.

        A paper matches when at least two distinct query tokens occur in its
        title or abstract (one suffices for single-token queries).
        """
        query_tokens = set(tokenize(query))
        if not query_tokens:
            return []
        required = min(2, len(query_tokens))
        matches = []
        for paper in self.papers:
            paper_tokens = set(tokenize(paper.metadata_text))
            if len(query_tokens & paper_tokens) >= required:
                matches.append(paper)
            if len(matches) >= limit:
                break
        return matches

    def links(self, paper_id: str, direction: str) -> list[PaperRecord]:
        table = self.citations if direction == "citations" else self.references
        linked_ids = table.get(paper_id, [])
        return [self.papers_by_id[pid] for pid in linked_ids if pid in self.papers_by_id]
