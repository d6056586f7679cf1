"""Everyday-activity equivalences, report text, visualization data, follow-ups.

Every number in the report comes from the aggregation engine; the
optional LLM layer only rephrases prose.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

from .aggregate import CookingMethod, RecipeAssessment
from .query import country_name

# Count range considered relatable for an equivalence comparison.
RELATABLE_RANGE = (0.5, 500.0)


@dataclass
class ReferenceActivity:
    id: str
    label: str
    kg_co2e: float
    phrase: str


def load_reference_activities() -> list[ReferenceActivity]:
    raw = json.loads(resources.files("mealcarbon.data")
                     .joinpath("reference_activities.json").read_text(encoding="utf-8"))
    return [ReferenceActivity(**entry) for entry in raw]


def round_sig(x: float, figures: int = 3) -> float:
    if x == 0:
        return 0.0
    return round(x, -int(math.floor(math.log10(abs(x)))) + figures - 1)


def fmt_sig(x: float, figures: int = 3) -> str:
    return f"{round_sig(x, figures):g}"


def equivalences(total_avg: float, table: list[ReferenceActivity] | None = None,
                 n: int = 3) -> list[dict]:
    """Scaled activity counts, 3 significant figures.

    Prefers counts in the relatable range, keeping table order; pads from
    the rest of the table when too few are in range.
    """
    if total_avg < 0:
        raise ValueError("total_avg must be non-negative")
    table = table or load_reference_activities()
    scored = [{"id": a.id, "label": a.label,
               "count": round_sig(total_avg / a.kg_co2e),
               "phrase": a.phrase.format(n=fmt_sig(total_avg / a.kg_co2e))}
              for a in table]
    lo, hi = RELATABLE_RANGE
    relatable = [s for s in scored if lo <= s["count"] <= hi]
    rest = [s for s in scored if s not in relatable]
    return (relatable + rest)[:n]


def visualization_data(assessment: RecipeAssessment) -> dict:
    """Labels and midpoints for the charts; totals are never included."""
    labels = [i.ingredient for i in assessment.ingredient_impacts]
    impacts = [i.midpoint for i in assessment.ingredient_impacts]
    if assessment.cooking.required:
        labels.append("Cooking")
        impacts.append(assessment.cooking.midpoint)
    return {"ingredients": labels, "impacts": impacts}


def follow_up_questions(assessment: RecipeAssessment) -> list[str]:
    """3-4 questions keyed on what the assessment actually contains."""
    questions: list[str] = []
    has_shares = any(e.market_shares for q in assessment.query_results for e in q.entries)
    has_fallback = any(e.country_fallback for q in assessment.query_results
                       for e in q.entries)
    if has_shares:
        questions.append("What are the market shares of the ingredients used in this recipe?")
    if has_fallback:
        questions.append("How do the impacts of these ingredients vary between "
                         "different countries?")
    ranged = [i for i in assessment.ingredient_impacts if i.max > i.min]
    if ranged:
        widest = max(ranged, key=lambda i: (i.max - i.min, i.ingredient))
        questions.append(f"Why does the impact estimate for {widest.ingredient} "
                         f"span such a wide range?")
    questions.append("Are there any lifecycle patterns that stand out for the ingredients?")
    questions.append("What are some potential opportunities to reduce the carbon "
                     "footprint of this recipe?")
    if len(questions) < 3:
        questions.append("Which lifecycle stage contributes most to the total impact?")
    return questions[:4]


def _country_note(assessment: RecipeAssessment, ingredient: str) -> str:
    regions: list[str] = []
    for q in assessment.query_results:
        if q.ingredient != ingredient:
            continue
        for e in q.entries:
            for code in e.region_used.split(","):
                name = country_name(code)
                if name not in regions:
                    regions.append(name)
    if not regions:
        return ""
    if len(regions) == 1:
        return f" (note: data from {regions[0]})"
    return f" (note: data from {' and '.join([', '.join(regions[:-1]), regions[-1]])})"


def _impact_range(lo: float, hi: float) -> str:
    if lo == hi:
        return f"{fmt_sig(lo)} kg CO2-eq"
    return f"{fmt_sig(lo)}-{fmt_sig(hi)} kg CO2-eq"


def build_report(assessment: RecipeAssessment) -> str:
    """Deterministic template fill in a fixed section order."""
    lines = ["Main ingredients by impact:"]
    ranked = sorted(assessment.ingredient_impacts,
                    key=lambda i: (-i.midpoint, i.ingredient))
    for imp in ranked:
        if imp.unmatched:
            lines.append(f"- {imp.ingredient} ({imp.grams:g}g): no match confirmed; "
                         f"excluded from totals")
            continue
        note = _country_note(assessment, imp.ingredient)
        lines.append(f"- {imp.ingredient} ({imp.grams:g}g): "
                     f"{_impact_range(imp.min, imp.max)}{note}")

    lines.append("")
    lines.append("Cooking impact:")
    cooking = assessment.cooking
    if cooking.required:
        temp = f" at {cooking.temperature_c:g}°C" if cooking.temperature_c else ""
        lines.append(f"- {cooking.method.value.title()} "
                     f"({cooking.duration_min:g} mins{temp}): "
                     f"{_impact_range(cooking.min, cooking.max)}")
    else:
        lines.append("- No cooking required (0 kg CO2-eq)")

    lines.append("")
    lines.append(f"Total recipe impact: "
                 f"{_impact_range(assessment.total_min, assessment.total_max)}")
    lines.append(f"Average impact: {fmt_sig(assessment.total_avg)} kg CO2-eq")

    lines.append("")
    lines.append("Your meal's carbon footprint is equivalent to:")
    for eq in assessment.equivalences:
        lines.append(f"- {eq['phrase']}")

    lines.append("")
    friendly = {"BONSAI": "BONSAI", "AGRIBALYSE": "Agribalyse",
                "BIG_CLIMATE": "Big Climate Database"}
    sources = sorted({e.source.value for q in assessment.query_results
                      for e in q.entries})
    src_text = ", ".join(friendly.get(s, s) for s in sources) if sources \
        else "no databases"
    range_note = ("The range reflects differences between the source databases "
                  "for the same products. ")
    cook_note = ("The cooking estimate assumes typical appliance power and the "
                 "target country's electricity grid. "
                 if cooking.required else
                 "No cooking impact is included for this recipe. ")
    lines.append(f"Data sources: {src_text}. {range_note}{cook_note}".rstrip())
    for note in assessment.notes:
        lines.append(f"Note: {note}")

    lines.append("")
    lines.append("You might want to know more about:")
    for q in follow_up_questions(assessment):
        lines.append(f"- {q}")
    return "\n".join(lines)
