"""Ranked suggestion containers shared by the row and column rankers."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field


@dataclass(frozen=True, slots=True)
class Suggestion:
    """A candidate with its total score and per-component breakdown."""

    key: str
    score: float
    components: Mapping[str, float] = field(default_factory=dict)
    sources: tuple[str, ...] = ()


def sort_suggestions(items: Sequence[Suggestion]) -> list[Suggestion]:
    """Non-increasing score; ties broken by ascending key."""
    return sorted(items, key=lambda s: (-s.score, s.key))


def suggestions_to_tsv(suggestions: Sequence[Suggestion], component_names: Sequence[str]) -> str:
    lines = ["\t".join(["rank", "key", "score", *component_names])]
    for rank, s in enumerate(suggestions, start=1):
        cells = [str(rank), s.key, repr(s.score)]
        for name in component_names:
            cells.append(repr(s.components[name]) if name in s.components else "")
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
