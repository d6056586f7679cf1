"""Human-in-the-loop match selection.

Candidates come grouped per ingredient and per source (top-3 each).
Users confirm or override; the batch CLI uses auto_select (rank-1 per
source above a similarity floor) instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .catalog import DatabaseSource, ProductStore
from .embeddings import ProductIndex, SearchHit, search

AUTO_SIMILARITY_FLOOR = 0.35


class SelectionMode(str, Enum):
    USER = "USER"
    AUTO_TOP1 = "AUTO_TOP1"


class SelectionError(Exception):
    pass


@dataclass
class MatchCandidate:
    ingredient: str
    product_id: str           # region-collapsed id
    source: DatabaseSource
    name: str
    similarity: float
    has_target_country_data: bool

    def to_dict(self) -> dict:
        return {"ingredient": self.ingredient, "product_id": self.product_id,
                "source": self.source.value, "name": self.name,
                "similarity": self.similarity,
                "has_target_country_data": self.has_target_country_data}


@dataclass
class SelectionSet:
    # ingredient -> confirmed collapsed product ids (possibly empty)
    choices: dict[str, list[str]]
    mode: SelectionMode = SelectionMode.USER


@dataclass
class ConfirmedMatches:
    # ingredient -> confirmed candidates; unmatched ingredients map to []
    matches: dict[str, list[MatchCandidate]]
    unmatched: list[str] = field(default_factory=list)


def propose(ingredients: list[str], indices: dict[DatabaseSource, ProductIndex],
            store: ProductStore, target_country: str,
            provider, k: int = 3) -> dict[str, list[MatchCandidate]]:
    """Top-k candidates per source per ingredient, annotated with country coverage."""
    out: dict[str, list[MatchCandidate]] = {}
    for ingredient in ingredients:
        group: list[MatchCandidate] = []
        for source in DatabaseSource:
            index = indices.get(source)
            if index is None:
                continue
            for hit in search(ingredient, index, provider, k=k):
                group.append(_to_candidate(ingredient, source, hit, store, target_country))
        out[ingredient] = group
    return out


def _to_candidate(ingredient: str, source: DatabaseSource, hit: SearchHit,
                  store: ProductStore, target_country: str) -> MatchCandidate:
    return MatchCandidate(
        ingredient=ingredient,
        product_id=hit.product_id,
        source=source,
        name=hit.name,
        similarity=hit.similarity,
        has_target_country_data=store.has_region(source, hit.name, target_country),
    )


def confirm(candidates: dict[str, list[MatchCandidate]],
            selection: SelectionSet) -> ConfirmedMatches:
    """Apply confirmations; ids outside the proposed candidate lists are rejected."""
    matches: dict[str, list[MatchCandidate]] = {}
    unmatched: list[str] = []
    for ingredient, group in candidates.items():
        chosen_ids = selection.choices.get(ingredient, [])
        by_id = {c.product_id: c for c in group}
        picked = []
        for pid in chosen_ids:
            if pid not in by_id:
                raise SelectionError(
                    f"product {pid!r} was not proposed for ingredient {ingredient!r}")
            picked.append(by_id[pid])
        matches[ingredient] = picked
        if not picked:
            unmatched.append(ingredient)
    return ConfirmedMatches(matches=matches, unmatched=unmatched)


def auto_select(candidates: dict[str, list[MatchCandidate]],
                floor: float = AUTO_SIMILARITY_FLOOR) -> SelectionSet:
    """Rank-1 per source above the similarity floor; deterministic."""
    choices: dict[str, list[str]] = {}
    for ingredient, group in sorted(candidates.items()):
        picked: list[str] = []
        for source in DatabaseSource:
            eligible = [c for c in group
                        if c.source == source and c.similarity >= floor]
            if eligible:
                # highest similarity wins; id tie-break for determinism
                best = min(eligible, key=lambda c: (-c.similarity, c.product_id))
                picked.append(best.product_id)
        choices[ingredient] = picked
    return SelectionSet(choices=choices, mode=SelectionMode.AUTO_TOP1)
