"""Interdisciplinary literature seeking: question fan-out, query expansion,
contextual retrieval, theme curation, and outline export."""

__version__ = "0.1.0"

from .model import ExploratoryQuestion, PaperRecord, ResearchTopic, normalize_topic

__all__ = [
    "ExploratoryQuestion",
    "PaperRecord",
    "ResearchTopic",
    "normalize_topic",
    "__version__",
]
