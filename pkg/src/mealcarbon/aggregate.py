"""Deterministic impact aggregation.

All arithmetic lives here: per-ingredient min/max/midpoint over the
confirmed source entries, cooking energy from a method/duration spec,
and recipe totals.  No language model touches these numbers.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Optional

from .query import IngredientQueryResult


class CookingMethod(str, Enum):
    BAKE = "BAKE"
    BOIL = "BOIL"
    FRY = "FRY"
    SIMMER = "SIMMER"
    NONE = "NONE"


# Appliance power draw per cooking method, kW.
METHOD_POWER_KW = {
    CookingMethod.BAKE: 2.0,
    CookingMethod.BOIL: 1.5,
    CookingMethod.FRY: 1.2,
    CookingMethod.SIMMER: 0.8,
}

# Default duration when a method keyword appears without one, minutes.
METHOD_DEFAULT_MINUTES = {
    CookingMethod.BAKE: 20,
    CookingMethod.BOIL: 10,
    CookingMethod.FRY: 10,
    CookingMethod.SIMMER: 20,
}

# Spread applied around the cooking point estimate.
COOKING_SPREAD = 0.2

GRID_FACTORS: dict[str, float] = json.loads(
    resources.files("mealcarbon.data").joinpath("grid_factors.json").read_text(encoding="utf-8"))

DISH_TABLE: dict[str, dict] = json.loads(
    resources.files("mealcarbon.data").joinpath("dish_table.json").read_text(encoding="utf-8"))


class AggregationError(Exception):
    pass


@dataclass
class IngredientImpact:
    ingredient: str
    grams: float
    min: float
    max: float
    midpoint: float
    sources: list[str]
    unmatched: bool = False
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"ingredient": self.ingredient, "grams": self.grams,
                "min": self.min, "max": self.max, "midpoint": self.midpoint,
                "sources": self.sources, "unmatched": self.unmatched,
                "notes": self.notes}


@dataclass
class CookingImpact:
    required: bool
    method: CookingMethod
    duration_min: float
    temperature_c: Optional[float]
    min: float = 0.0
    max: float = 0.0
    midpoint: float = 0.0

    def to_dict(self) -> dict:
        return {"required": self.required, "method": self.method.value,
                "duration_min": self.duration_min,
                "temperature_c": self.temperature_c,
                "min": self.min, "max": self.max, "midpoint": self.midpoint}


NO_COOKING = CookingImpact(required=False, method=CookingMethod.NONE,
                           duration_min=0.0, temperature_c=None)


@dataclass
class RecipeAssessment:
    target_country: str
    ingredient_impacts: list[IngredientImpact]
    cooking: CookingImpact
    total_min: float
    total_max: float
    total_avg: float
    equivalences: list[dict] = field(default_factory=list)
    visualization: Optional[dict] = None
    notes: list[str] = field(default_factory=list)
    query_results: list[IngredientQueryResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "target_country": self.target_country,
            "ingredient_impacts": [i.to_dict() for i in self.ingredient_impacts],
            "cooking": self.cooking.to_dict(),
            "total_min": self.total_min,
            "total_max": self.total_max,
            "total_avg": self.total_avg,
            "equivalences": self.equivalences,
            "visualization": self.visualization,
            "notes": self.notes,
            "query_results": [q.to_dict() for q in self.query_results],
        }


def aggregate_ingredient(ingredient: str, grams: float,
                         entries: list[float], sources: Optional[list[str]] = None,
                         notes: Optional[list[str]] = None) -> IngredientImpact:
    """Min/max over per-source scaled totals; midpoint is (min+max)/2 exactly.

    A single entry yields a degenerate range.  Zero entries mark the
    ingredient UNMATCHED with zero impact and a disclosure note.
    """
    sources = sources or []
    notes = list(notes or [])
    if not entries:
        notes.append("no confirmed product match; excluded from totals")
        return IngredientImpact(ingredient, grams, 0.0, 0.0, 0.0, sources,
                                unmatched=True, notes=notes)
    lo, hi = min(entries), max(entries)
    return IngredientImpact(ingredient, grams, lo, hi, (lo + hi) / 2.0,
                            sources, notes=notes)


_DURATION_RE = re.compile(r"(\d+(?:\.\d+)?)\s*(?:minutes|minute|mins|min)\b", re.I)
_METHOD_KEYWORDS = [
    (CookingMethod.BAKE, ("bake", "baked", "baking", "oven", "roast", "roasted")),
    (CookingMethod.BOIL, ("boil", "boiled", "boiling")),
    (CookingMethod.FRY, ("fry", "fried", "frying", "saute", "sauteed", "sauté")),
    (CookingMethod.SIMMER, ("simmer", "simmered", "simmering")),
]


def detect_cooking(recipe_text: str, ingredients: Optional[list[str]] = None) -> CookingImpact:
    """Keyword and dish-table detection; impacts are left unresolved.

    Explicit method verbs win; otherwise a dish-table hit supplies the
    method, duration, and temperature.  A dish-table hit can never come
    back as "no cooking".
    """
    text = recipe_text.lower()
    duration = None
    m = _DURATION_RE.search(text)
    if m:
        duration = float(m.group(1))

    for method, keywords in _METHOD_KEYWORDS:
        if any(re.search(rf"\b{kw}\b", text) for kw in keywords):
            minutes = duration if duration else METHOD_DEFAULT_MINUTES[method]
            temp = 200.0 if method == CookingMethod.BAKE else None
            return CookingImpact(required=True, method=method,
                                 duration_min=minutes, temperature_c=temp)

    haystack = text + " " + " ".join(ingredients or [])
    for dish, spec in DISH_TABLE.items():
        if dish in haystack:
            method = CookingMethod(spec["method"])
            minutes = duration if duration else float(spec["minutes"])
            return CookingImpact(required=True, method=method,
                                 duration_min=minutes,
                                 temperature_c=spec.get("temperature_c"))
    return CookingImpact(required=False, method=CookingMethod.NONE,
                         duration_min=0.0, temperature_c=None)


def grid_factor(country: str) -> float:
    return GRID_FACTORS.get(country, GRID_FACTORS["default"])


def cooking_energy(spec: CookingImpact, grid_kg_per_kwh: Optional[float] = None,
                   country: str = "") -> CookingImpact:
    """midpoint = power(method) kW x duration h x grid factor; range is +-20%."""
    if not spec.required or spec.method == CookingMethod.NONE:
        return NO_COOKING
    if spec.duration_min <= 0:
        raise AggregationError("cooking duration must be positive")
    factor = grid_kg_per_kwh if grid_kg_per_kwh is not None else grid_factor(country)
    midpoint = METHOD_POWER_KW[spec.method] * (spec.duration_min / 60.0) * factor
    return CookingImpact(required=True, method=spec.method,
                         duration_min=spec.duration_min,
                         temperature_c=spec.temperature_c,
                         min=midpoint * (1.0 - COOKING_SPREAD),
                         max=midpoint * (1.0 + COOKING_SPREAD),
                         midpoint=midpoint)


def total(ingredient_impacts: list[IngredientImpact],
          cooking: CookingImpact = NO_COOKING) -> tuple[float, float, float]:
    """(total_min, total_max, total_avg); fsum keeps sums order-independent."""
    if not ingredient_impacts:
        raise AggregationError("at least one ingredient is required")
    tmin = math.fsum([i.min for i in ingredient_impacts] + [cooking.min])
    tmax = math.fsum([i.max for i in ingredient_impacts] + [cooking.max])
    tavg = math.fsum([i.midpoint for i in ingredient_impacts] + [cooking.midpoint])
    return tmin, tmax, tavg
