"""Provider-agnostic LLM access: chat completion plus text embedding.

Two modes. ``live`` talks to any OpenAI-compatible HTTP endpoint with
bounded retries and a concurrency cap. ``scripted`` is a pure function of
its inputs: completions come from plain-text fixture files keyed by a hash
of (template_id, variables), and embeddings are derived from seeded token
hashes, so whole pipelines replay byte-identically offline.
"""
from __future__ import annotations

import hashlib
import os
import string
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional

import httpx
import numpy as np

from .errors import FixtureMissing, ProviderError
from .model import Vector
from .text import tokenize

SCRIPTED_EMBED_DIM = 64
SCRIPTED_EMBED_SEED = 13

_FORMATTER = string.Formatter()


def _prompts_root():
    return resources.files("fieldseek") / "assets" / "prompts"


def available_templates() -> frozenset[str]:
    """Template ids = basenames of the bundled prompt assets."""
    return frozenset(
        entry.name[: -len(".txt")]
        for entry in _prompts_root().iterdir()
        if entry.name.endswith(".txt")
    )


def load_template(template_id: str) -> str:
    path = _prompts_root() / f"{template_id}.txt"
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise KeyError(f"unknown prompt template: {template_id!r}") from None


def template_placeholders(template: str) -> set[str]:
    return {name for _, name, _, _ in _FORMATTER.parse(template) if name}


@dataclass(frozen=True)
class PromptRequest:
    """One completion request against a registered template.

    Every placeholder in the template must be bound, and no extra variables
    are allowed: the variables are the fixture key, so strays would silently
    fork scripted behavior.
    """

    template_id: str
    variables: Mapping[str, str]
    temperature: float = 0.7

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature out of range: {self.temperature}")
        placeholders = template_placeholders(load_template(self.template_id))
        bound = set(self.variables)
        missing = placeholders - bound
        extra = bound - placeholders
        if missing:
            raise ValueError(f"unbound placeholders for {self.template_id}: {sorted(missing)}")
        if extra:
            raise ValueError(f"unknown variables for {self.template_id}: {sorted(extra)}")

    def render(self) -> str:
        return load_template(self.template_id).format(**dict(self.variables))


def fixture_key(template_id: str, variables: Mapping[str, str]) -> str:
    """SHA-256 over template id and canonicalized (sorted) variables."""
    digest = hashlib.sha256()
    digest.update(template_id.encode("utf-8"))
    for name in sorted(variables):
        digest.update(b"\x00")
        digest.update(name.encode("utf-8"))
        digest.update(b"\x01")
        digest.update(str(variables[name]).encode("utf-8"))
    return digest.hexdigest()


def bundled_fixture_dir() -> Path:
    return Path(str(resources.files("fieldseek") / "assets" / "fixtures"))


def scripted_embedding(text: str, dim: int = SCRIPTED_EMBED_DIM, seed: int = SCRIPTED_EMBED_SEED) -> Vector:
    """Deterministic embedding from seeded hashes of the text's tokens.

    Each token hashes to a fixed pseudo-random direction; the text embeds as
    the L2-normalized sum over its token bag, so token overlap shows up as
    cosine similarity. Textless input falls back to hashing the raw string.
    """
    tokens = tokenize(text) or [f"\x00{text}"]
    acc = np.zeros(dim, dtype=np.float64)
    for token in tokens:
        acc += _token_direction(token, dim, seed)
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:  # cancellation is astronomically unlikely but handled
        acc[0] = 1.0
        norm = 1.0
    return acc / norm


def _token_direction(token: str, dim: int, seed: int) -> Vector:
    material = hashlib.blake2b(f"{seed}|{token}".encode("utf-8"), digest_size=16).digest()
    rng = np.random.default_rng(int.from_bytes(material, "big"))
    vec = rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


@dataclass
class ProviderConfig:
    """Gateway wiring; scripted mode needs an existing fixture directory."""

    mode: str = "scripted"
    model_name: str = "gpt-4"
    embed_model_name: str = "text-embedding-3-small"
    fixture_dir: Path = field(default_factory=bundled_fixture_dir)
    max_parallel: int = 4
    base_url: str = "https://api.openai.com/v1"
    api_key: str = ""
    embed_dim: int = SCRIPTED_EMBED_DIM
    seed: int = SCRIPTED_EMBED_SEED
    timeout: float = 30.0
    backoff_base: float = 0.5
    max_attempts: int = 3

    def __post_init__(self) -> None:
        if self.mode not in ("live", "scripted"):
            raise ValueError(f"unknown gateway mode: {self.mode!r}")
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be positive")
        self.fixture_dir = Path(self.fixture_dir)
        if self.mode == "scripted" and not self.fixture_dir.is_dir():
            raise ValueError(f"scripted mode requires an existing fixture_dir: {self.fixture_dir}")

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "ProviderConfig":
        env = os.environ if env is None else env
        kwargs: dict = {"mode": env.get("LLM_MODE", "scripted")}
        if env.get("FIXTURE_DIR"):
            kwargs["fixture_dir"] = Path(env["FIXTURE_DIR"])
        if env.get("LLM_MODEL"):
            kwargs["model_name"] = env["LLM_MODEL"]
        if env.get("EMBED_MODEL"):
            kwargs["embed_model_name"] = env["EMBED_MODEL"]
        if env.get("LLM_BASE_URL"):
            kwargs["base_url"] = env["LLM_BASE_URL"]
        if env.get("LLM_API_KEY"):
            kwargs["api_key"] = env["LLM_API_KEY"]
        if env.get("LLM_MAX_PARALLEL"):
            kwargs["max_parallel"] = int(env["LLM_MAX_PARALLEL"])
        return cls(**kwargs)


class LlmGateway:
    """Shareable chat-completion and embedding client.

    A semaphore caps in-flight live requests at max_parallel; scripted mode
    never touches the network. Embeddings are memoized per text.
    """

    def __init__(self, config: ProviderConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._semaphore = threading.BoundedSemaphore(config.max_parallel)
        self._embed_cache: dict[str, Vector] = {}
        self._cache_lock = threading.Lock()
        self._client: httpx.Client | None = None
        if config.mode == "live":
            headers = {"Authorization": f"Bearer {config.api_key}"} if config.api_key else {}
            self._client = httpx.Client(
                base_url=config.base_url,
                headers=headers,
                timeout=config.timeout,
                transport=transport,
            )

    # -- completions ---------------------------------------------------

    def complete(self, request: PromptRequest) -> str:
        if self.config.mode == "scripted":
            return self._scripted_complete(request)
        return self._live_complete(request)

    def _scripted_complete(self, request: PromptRequest) -> str:
        key = fixture_key(request.template_id, request.variables)
        path = self.config.fixture_dir / f"{key}.txt"
        if not path.is_file():
            raise FixtureMissing(key, request.template_id)
        return path.read_text(encoding="utf-8")

    def _live_complete(self, request: PromptRequest) -> str:
        payload = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": request.render()}],
            "temperature": request.temperature,
        }
        data = self._post_with_retries("/chat/completions", payload)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected completion payload: {exc}") from exc

    # -- embeddings ----------------------------------------------------

    def embed(self, texts: Iterable[str]) -> list[Vector]:
        """One vector per input text, order-preserving."""
        texts = list(texts)
        if not texts:
            raise ValueError("embed requires a non-empty list of texts")
        with self._cache_lock:
            missing = [t for t in texts if t not in self._embed_cache]
        if missing:
            if self.config.mode == "scripted":
                fresh = {
                    t: scripted_embedding(t, self.config.embed_dim, self.config.seed)
                    for t in dict.fromkeys(missing)
                }
            else:
                fresh = self._live_embed(list(dict.fromkeys(missing)))
            with self._cache_lock:
                self._embed_cache.update(fresh)
        with self._cache_lock:
            return [self._embed_cache[t] for t in texts]

    def _live_embed(self, texts: list[str]) -> dict[str, Vector]:
        payload = {"model": self.config.embed_model_name, "input": texts}
        data = self._post_with_retries("/embeddings", payload)
        try:
            rows = sorted(data["data"], key=lambda row: row["index"])
            vectors = [np.asarray(row["embedding"], dtype=np.float64) for row in rows]
        except (KeyError, TypeError) as exc:
            raise ProviderError(f"unexpected embedding payload: {exc}") from exc
        if len(vectors) != len(texts):
            raise ProviderError(f"expected {len(texts)} embeddings, got {len(vectors)}")
        return dict(zip(texts, vectors))

    # -- transport -----------------------------------------------------

    def _post_with_retries(self, path: str, payload: dict) -> dict:
        assert self._client is not None, "live transport used in scripted mode"
        last_error: Exception | None = None
        for attempt in range(1, self.config.max_attempts + 1):
            try:
                with self._semaphore:
                    response = self._client.post(path, json=payload)
                if response.status_code in (429, 500, 502, 503, 504):
                    last_error = ProviderError(
                        f"HTTP {response.status_code} from provider", attempts=attempt, retryable=True
                    )
                elif response.status_code >= 400:
                    raise ProviderError(
                        f"HTTP {response.status_code} from provider", attempts=attempt, retryable=False
                    )
                else:
                    try:
                        return response.json()
                    except ValueError as exc:
                        raise ProviderError(f"non-JSON provider response: {exc}") from exc
            except ProviderError:
                raise
            except httpx.HTTPError as exc:
                last_error = exc
            if attempt < self.config.max_attempts:
                time.sleep(self.config.backoff_base * (2 ** (attempt - 1)))
        raise ProviderError(
            f"provider call failed after {self.config.max_attempts} attempts: {last_error}",
            attempts=self.config.max_attempts,
            retryable=True,
        )
