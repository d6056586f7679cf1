"""End-to-end assessment shared by the CLI and the HTTP service.

Both front doors call the same functions so identical inputs produce
byte-identical assessment JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from . import aggregate, matching, report
from .catalog import DatabaseSource, ProductStore
from .embeddings import ProductIndex
from .matching import ConfirmedMatches, MatchCandidate, SelectionSet
from .query import (IngredientQueryResult, NoDataError, assemble_results_text,
                    query_product)
from .recipes import ParsedIngredient


@dataclass
class Engine:
    """Immutable runtime bundle: store, per-source indices, embedding provider."""
    store: ProductStore
    indices: dict[DatabaseSource, ProductIndex]
    provider: object

    def propose(self, ingredients: list[str], target_country: str,
                k: int = 3) -> dict[str, list[MatchCandidate]]:
        return matching.propose(ingredients, self.indices, self.store,
                                target_country, self.provider, k=k)


def run_queries(store: ProductStore, ingredients: list[ParsedIngredient],
                confirmed: ConfirmedMatches,
                target_country: str) -> list[IngredientQueryResult]:
    results = []
    grams_by_name = {i.name: i.grams for i in ingredients}
    for ingredient, cands in confirmed.matches.items():
        grams = grams_by_name.get(ingredient, 0.0)
        entries = []
        notes = []
        for cand in cands:
            try:
                entries.append(query_product(store, cand.product_id, grams,
                                             target_country))
            except NoDataError as exc:
                notes.append(str(exc))
        if ingredient in confirmed.unmatched:
            notes.append("no product confirmed for this ingredient")
        results.append(IngredientQueryResult(ingredient=ingredient, grams=grams,
                                             entries=entries, notes=notes))
    # Keep recipe order for readability.
    order = {i.name: n for n, i in enumerate(ingredients)}
    results.sort(key=lambda r: order.get(r.ingredient, len(order)))
    return results


def assess(store: ProductStore, ingredients: list[ParsedIngredient],
           confirmed: ConfirmedMatches, target_country: str,
           recipe_text: str, extra_notes: Optional[list[str]] = None
           ) -> aggregate.RecipeAssessment:
    """Query impacts, aggregate ranges and cooking, attach equivalences and charts data."""
    queries = run_queries(store, ingredients, confirmed, target_country)

    impacts = []
    for q in queries:
        impacts.append(aggregate.aggregate_ingredient(
            q.ingredient, q.grams,
            entries=[e.total_impact for e in q.entries],
            sources=sorted({e.source.value for e in q.entries}),
            notes=[f"data from {e.region_used}" for e in q.entries
                   if e.country_fallback],
        ))

    cooking_spec = aggregate.detect_cooking(recipe_text,
                                            [i.name for i in ingredients])
    cooking = aggregate.cooking_energy(cooking_spec, country=target_country) \
        if cooking_spec.required else aggregate.NO_COOKING

    if impacts:
        tmin, tmax, tavg = aggregate.total(impacts, cooking)
    else:
        tmin = tmax = tavg = 0.0

    notes = list(extra_notes or [])
    for unmatched in sorted(set(n for n in (q.ingredient for q in queries
                                            if not q.entries))):
        notes.append(f"'{unmatched}' had no confirmed match and is excluded "
                     f"from the totals")

    assessment = aggregate.RecipeAssessment(
        target_country=target_country,
        ingredient_impacts=impacts,
        cooking=cooking,
        total_min=tmin,
        total_max=tmax,
        total_avg=tavg,
        notes=notes,
        query_results=queries,
    )
    assessment.equivalences = report.equivalences(max(tavg, 0.0))
    assessment.visualization = report.visualization_data(assessment)
    return assessment


def assess_auto(engine: Engine, ingredients: list[ParsedIngredient],
                target_country: str, recipe_text: str,
                floor: float = matching.AUTO_SIMILARITY_FLOOR,
                extra_notes: Optional[list[str]] = None) -> aggregate.RecipeAssessment:
    """Batch path: propose, auto-select rank-1 per source, assess."""
    candidates = engine.propose([i.name for i in ingredients], target_country)
    selection = matching.auto_select(candidates, floor=floor)
    confirmed = matching.confirm(candidates, selection)
    return assess(engine.store, ingredients, confirmed, target_country,
                  recipe_text, extra_notes=extra_notes)


def assessment_json(assessment: aggregate.RecipeAssessment) -> str:
    """Canonical serialization; both front doors emit exactly this."""
    return json.dumps(assessment.to_dict(), sort_keys=True, indent=2) + "\n"


def results_text(assessment: aggregate.RecipeAssessment) -> str:
    return assemble_results_text(assessment.query_results)
