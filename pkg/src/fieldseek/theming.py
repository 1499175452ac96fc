"""Theme construction: density clustering of contextual embeddings plus
LLM curation of the raw clusters into titled themes.

Clustering is DBSCAN over cosine distance with a deterministic scan order
so cluster numbering and border-point assignment are reproducible. Curation
asks two judgment questions per cluster (is it related; is it divisible)
and may split a cluster one level deep with a tightened radius.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gateway import LlmGateway, PromptRequest
from .model import ExplorationContext, PaperRecord, Vector

logger = logging.getLogger(__name__)

DEFAULT_EPS = 0.35
DEFAULT_MIN_PTS = 3
SUBCLUSTER_EPS_FACTOR = 0.7
NOISE = -1

# How many member papers a curation prompt lists, to bound prompt size.
CURATION_SAMPLE = 8


def cosine_distance_matrix(vectors: Sequence[Vector]) -> np.ndarray:
    """Pairwise 1 - cosine. Rows with zero norm sit at distance 2 from
    everything (and from themselves), so they can never be neighbors."""
    n = len(vectors)
    if n == 0:
        return np.zeros((0, 0))
    stacked = np.stack([np.asarray(v, dtype=np.float64) for v in vectors])
    norms = np.linalg.norm(stacked, axis=1)
    out = np.full((n, n), 2.0)
    nonzero = norms > 0.0
    if nonzero.any():
        unit = stacked[nonzero] / norms[nonzero, None]
        sims = np.clip(unit @ unit.T, -1.0, 1.0)
        sub = 1.0 - sims
        idx = np.flatnonzero(nonzero)
        out[np.ix_(idx, idx)] = sub
    return out


def dbscan(vectors: Sequence[Vector], eps: float = DEFAULT_EPS, min_pts: int = DEFAULT_MIN_PTS) -> list[int]:
    """Density clustering; returns one label per input, -1 for noise.

    Neighborhoods are closed balls (distance <= eps) and include the point
    itself. A point is core when its neighborhood has at least min_pts
    members. Expansion scans points in index order, so labels are stable:
    cluster k is the k-th cluster discovered, and a border point joins the
    first cluster whose expansion reaches it.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_pts < 1:
        raise ValueError("min_pts must be at least 1")
    n = len(vectors)
    labels = [NOISE] * n
    if n == 0:
        return labels
    distances = cosine_distance_matrix(vectors)
    neighborhoods = [list(np.flatnonzero(distances[i] <= eps)) for i in range(n)]
    is_core = [len(neighborhoods[i]) >= min_pts for i in range(n)]
    visited = [False] * n
    cluster = 0
    for start in range(n):
        if visited[start] or not is_core[start]:
            continue
        # Breadth-first expansion from this core point claims its whole
        # density-connected component (plus reachable border points).
        labels[start] = cluster
        visited[start] = True
        frontier = list(neighborhoods[start])
        seen = set(frontier) | {start}
        while frontier:
            point = frontier.pop(0)
            if labels[point] == NOISE:
                labels[point] = cluster
            if visited[point]:
                continue
            visited[point] = True
            if is_core[point]:
                for neighbor in neighborhoods[point]:
                    if neighbor not in seen:
                        seen.add(neighbor)
                        frontier.append(neighbor)
        cluster += 1
    return labels


def group_labels(labels: Sequence[int]) -> tuple[list[list[int]], list[int]]:
    """Split label vector into clusters (by label order) and noise indices."""
    clusters: dict[int, list[int]] = {}
    noise = []
    for index, label in enumerate(labels):
        if label == NOISE:
            noise.append(index)
        else:
            clusters.setdefault(label, []).append(index)
    ordered = [clusters[label] for label in sorted(clusters)]
    return ordered, noise


@dataclass
class Theme:
    """A titled group of papers produced by curation."""

    theme_id: str
    title: str
    paper_ids: list[str]
    parent_id: str | None = None


@dataclass
class ThemeSet:
    """Curated output for one explored question."""

    eq_id: str
    themes: list[Theme] = field(default_factory=list)
    possibly_relevant: list[str] = field(default_factory=list)

    def all_paper_ids(self) -> list[str]:
        out = []
        for theme in self.themes:
            out.extend(theme.paper_ids)
        out.extend(self.possibly_relevant)
        return out


def _paper_lines(papers: Sequence[PaperRecord]) -> str:
    lines = []
    for paper in papers[:CURATION_SAMPLE]:
        lines.append(f"- {paper.title}")
    return "\n".join(lines)


def _yes(gateway: LlmGateway, template_id: str, variables: dict[str, str], default: bool) -> bool:
    """Binary judgment call; unparseable output falls back to the default."""
    text = gateway.complete(PromptRequest(template_id, variables, temperature=0.0))
    head = text.strip().lower()
    if head.startswith("yes"):
        return True
    if head.startswith("no"):
        return False
    logger.warning("unparseable %s judgment %r, defaulting to %s", template_id, head[:40], default)
    return default


def _title(gateway: LlmGateway, context: ExplorationContext, papers: Sequence[PaperRecord]) -> str:
    text = gateway.complete(
        PromptRequest(
            "theme_title",
            {
                "question": context.eq.text,
                "topic": context.topic.text,
                "papers": _paper_lines(papers),
            },
            temperature=0.0,
        )
    )
    lines = text.strip().splitlines()
    title = lines[0].strip().strip('"') if lines else ""
    return title or "Untitled theme"


def curate_themes(
    context: ExplorationContext,
    papers: Sequence[PaperRecord],
    embeddings: Sequence[Vector],
    gateway: LlmGateway,
    eps: float = DEFAULT_EPS,
    min_pts: int = DEFAULT_MIN_PTS,
) -> ThemeSet:
    """Cluster papers, then curate each cluster with two LLM judgments.

    Unrelated clusters dissolve into the possibly-relevant pool. A cluster
    judged divisible is re-clustered once with eps scaled by 0.7; points its
    subclustering calls noise are attached to the nearest subcluster so no
    paper disappears. Every input paper lands in exactly one theme or in
    possibly_relevant.
    """
    if len(papers) != len(embeddings):
        raise ValueError("papers and embeddings differ in length")
    theme_set = ThemeSet(eq_id=context.eq.id)
    labels = dbscan(embeddings, eps=eps, min_pts=min_pts)
    clusters, noise = group_labels(labels)
    theme_set.possibly_relevant.extend(papers[i].paper_id for i in noise)

    counter = 0
    for member_indices in clusters:
        members = [papers[i] for i in member_indices]
        related = _yes(
            gateway,
            "cluster_relatedness",
            {
                "topic": context.topic.text,
                "question": context.eq.text,
                "papers": _paper_lines(members),
            },
            default=True,
        )
        if not related:
            theme_set.possibly_relevant.extend(p.paper_id for p in members)
            continue
        divisible = _yes(
            gateway,
            "cluster_divisibility",
            {
                "topic": context.topic.text,
                "question": context.eq.text,
                "papers": _paper_lines(members),
            },
            default=False,
        )
        subgroups = [member_indices]
        if divisible:
            split = _split_once(member_indices, embeddings, eps * SUBCLUSTER_EPS_FACTOR, min_pts)
            if split:
                subgroups = split
        for group in subgroups:
            counter += 1
            group_papers = [papers[i] for i in group]
            theme_set.themes.append(
                Theme(
                    theme_id=f"{context.eq.id}-t{counter}",
                    title=_title(gateway, context, group_papers),
                    paper_ids=[p.paper_id for p in group_papers],
                )
            )
    return theme_set


def _split_once(
    member_indices: list[int],
    embeddings: Sequence[Vector],
    eps: float,
    min_pts: int,
) -> list[list[int]] | None:
    """Re-cluster one cluster's members with a tighter radius.

    Returns None when the split yields fewer than two subclusters (keep the
    parent whole). Subclustering noise joins the nearest subcluster, by
    minimum cosine distance to any member, so membership is conserved.
    """
    sub_vectors = [embeddings[i] for i in member_indices]
    sub_labels = dbscan(sub_vectors, eps=eps, min_pts=min_pts)
    subclusters, sub_noise = group_labels(sub_labels)
    if len(subclusters) < 2:
        return None
    distances = cosine_distance_matrix(sub_vectors)
    for orphan in sub_noise:
        nearest = min(
            range(len(subclusters)),
            key=lambda k: min(distances[orphan][j] for j in subclusters[k]),
        )
        subclusters[nearest].append(orphan)
    for group in subclusters:
        group.sort()
    return [[member_indices[j] for j in group] for group in subclusters]
