"""Recipe text to gram-quantified ingredients.

Two modes: an LLM extractor (through the chat gateway, structured
output) and a deterministic grammar that splits the message into
fragments and parses quantity / unit / name with a configurable
conversion table.  The deterministic path is a pure function of
(text, table) and is always available.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Optional

SUPPORTED_COUNTRIES = ("DK", "GB", "FR", "ES", "NL")


class Provenance(str, Enum):
    EXPLICIT = "EXPLICIT"     # grams given in the text
    CONVERTED = "CONVERTED"   # unit converted via the table
    ESTIMATED = "ESTIMATED"   # vague quantity resolved to a table default


class ParseError(Exception):
    pass


class EmptyRecipeError(ParseError):
    pass


class UnknownUnitError(ParseError):
    def __init__(self, unit: str):
        super().__init__(f"unknown unit: {unit!r}")
        self.unit = unit


@dataclass
class RawRecipe:
    text: str
    target_country: str = "NL"

    def __post_init__(self):
        if not self.text.strip():
            raise EmptyRecipeError("recipe text is empty")
        if self.target_country not in SUPPORTED_COUNTRIES:
            raise ParseError(f"unsupported country {self.target_country!r}")


@dataclass
class ParsedIngredient:
    name: str
    grams: float
    provenance: Provenance

    def to_dict(self) -> dict:
        return {"name": self.name, "grams": self.grams,
                "provenance": self.provenance.value}


class ConversionTable:
    """(unit token, optional ingredient class) -> grams per unit."""

    def __init__(self, entries: dict):
        self.entries = entries
        for unit, spec in entries.items():
            if spec["default"] <= 0:
                raise ValueError(f"non-positive grams for unit {unit!r}")
            for cls, g in spec.get("per_class", {}).items():
                if g <= 0:
                    raise ValueError(f"non-positive grams for {unit!r}/{cls!r}")

    @classmethod
    def default(cls) -> "ConversionTable":
        data = resources.files("mealcarbon.data").joinpath("conversion_table.json")
        return cls(json.loads(data.read_text(encoding="utf-8")))

    @classmethod
    def from_file(cls, path: str | Path) -> "ConversionTable":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def grams_per_unit(self, unit: str, ingredient: str = "") -> float:
        spec = self.entries.get(unit)
        if spec is None:
            raise UnknownUnitError(unit)
        best: Optional[float] = None
        best_len = -1
        for cls, g in spec.get("per_class", {}).items():
            if cls in ingredient and len(cls) > best_len:
                best, best_len = g, len(cls)
        return best if best is not None else spec["default"]

    def units(self) -> list[str]:
        return list(self.entries)


def convert_quantity(amount: float, unit: str, ingredient_class: str,
                     table: ConversionTable) -> float:
    """amount x table entry; ml goes 1:1 to grams via its table entry."""
    return amount * table.grams_per_unit(unit, ingredient_class)


# Singular/plural spellings accepted for each canonical unit token.
_UNIT_ALIASES = {
    "tablespoon": ["tablespoons", "tablespoon", "tbsp", "tbsps"],
    "teaspoon": ["teaspoons", "teaspoon", "tsp", "tsps"],
    "cup": ["cups", "cup"],
    "piece": ["pieces", "piece"],
    "clove": ["cloves", "clove"],
    "slice": ["slices", "slice"],
    "handful": ["handfuls", "handful"],
    "sprinkle": ["sprinkles", "sprinkle"],
    "pinch": ["pinches", "pinch"],
    "dash": ["dashes", "dash"],
    "ml": ["milliliters", "millilitres", "ml"],
    "l": ["liters", "litres", "l"],
    "g": ["grams", "gram", "gr", "g"],
    "kg": ["kilograms", "kilogram", "kg"],
}

_NUM = r"(\d+(?:[.,]\d+)?|\d+\s*/\s*\d+)"
_WORD_NUMBERS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
    "a": 1, "an": 1,
}


def _parse_amount(tok: str) -> float:
    tok = tok.strip().lower()
    if tok in _WORD_NUMBERS:
        return float(_WORD_NUMBERS[tok])
    if "/" in tok:
        num, den = tok.split("/")
        return float(num) / float(den)
    return float(tok.replace(",", "."))


def _clean_name(name: str) -> str:
    name = name.lower()
    name = re.sub(r"[^a-z0-9\s-]", " ", name)
    name = re.sub(r"\s+", " ", name).strip()
    name = re.sub(r"^(of|the|some|fresh)\s+", "", name)
    return name


def _alias_pattern(table: ConversionTable) -> str:
    # Longest alias first so e.g. "tablespoons" wins over "t".
    aliases = []
    for unit in table.units():
        aliases.extend(_UNIT_ALIASES.get(unit, [unit]))
    aliases.sort(key=len, reverse=True)
    return "|".join(re.escape(a) for a in aliases)


def _canonical_unit(alias: str) -> str:
    for unit, names in _UNIT_ALIASES.items():
        if alias in names:
            return unit
    return alias


def _parse_fragment(frag: str, table: ConversionTable) -> Optional[ParsedIngredient]:
    frag = frag.strip().strip(".!?")
    frag = re.sub(r"^(and|also|plus|then)\s+", "", frag, flags=re.I)
    if not frag:
        return None
    alias_re = _alias_pattern(table)

    # "200g of pizza dough" / "2 tablespoons of oil" / "250 ml of milk"
    m = re.match(rf"(?i)^{_NUM}\s*({alias_re})\b\s*(?:of\s+)?(.+)$", frag)
    if m:
        amount = _parse_amount(m.group(1))
        unit = _canonical_unit(m.group(2).lower())
        name = _clean_name(m.group(3))
        if not name or amount <= 0:
            return None
        grams = convert_quantity(amount, unit, name, table)
        prov = Provenance.EXPLICIT if unit in ("g", "kg") else Provenance.CONVERTED
        return ParsedIngredient(name, grams, prov)

    # "a handful of shredded mozzarella" / "one sprinkle of oregano"
    m = re.match(rf"(?i)^(a|an|one|two|three|four|five)\s+({alias_re})\b\s+(?:of\s+)?(.+)$",
                 frag)
    if m:
        amount = _parse_amount(m.group(1))
        unit = _canonical_unit(m.group(2).lower())
        name = _clean_name(m.group(3))
        if not name:
            return None
        grams = convert_quantity(amount, unit, name, table)
        return ParsedIngredient(name, grams, Provenance.ESTIMATED)

    # "half a red onion" / "half an apple"
    m = re.match(r"(?i)^half\s+(?:a|an|the)?\s*(.+)$", frag)
    if m:
        name = _clean_name(m.group(1))
        if name:
            grams = convert_quantity(1.0, "half", name, table)
            return ParsedIngredient(name, grams, Provenance.ESTIMATED)

    # "a few olives"
    m = re.match(r"(?i)^(?:a\s+)?few\s+(.+)$", frag)
    if m:
        name = _clean_name(m.group(1))
        if name:
            grams = convert_quantity(1.0, "few", name, table)
            return ParsedIngredient(name, grams, Provenance.ESTIMATED)

    # "2 onions" (count of pieces)
    m = re.match(rf"(?i)^{_NUM}\s+(.+)$", frag)
    if m:
        amount = _parse_amount(m.group(1))
        name = _clean_name(m.group(2))
        if name and amount > 0:
            grams = convert_quantity(amount, "piece", name, table)
            return ParsedIngredient(name, grams, Provenance.ESTIMATED)

    return None


def _fragments(text: str) -> list[str]:
    # Drop any lead-in before an explicit ingredient list marker.
    m = re.search(r"(?i)ingredients?\s*:", text)
    if m:
        text = text[m.end():]
    parts = re.split(r"[,;\n•]| and ", text)
    return [p for p in (p.strip() for p in parts) if p]


def parse_recipe_text(text: str, table: Optional[ConversionTable] = None) -> list[ParsedIngredient]:
    """Deterministic grammar parse. Raises EmptyRecipeError when nothing parses."""
    table = table or ConversionTable.default()
    out: list[ParsedIngredient] = []
    for frag in _fragments(text):
        parsed = _parse_fragment(frag, table)
        if parsed is not None:
            out.append(parsed)
    if not out:
        raise EmptyRecipeError("no ingredients found in recipe text")
    return out


@dataclass
class ExtractionResult:
    ingredients: list[ParsedIngredient]
    mode_used: str                  # "LLM" or "DETERMINISTIC"
    notes: list[str]


def extract_ingredients(recipe: RawRecipe, mode: str = "DETERMINISTIC",
                        table: Optional[ConversionTable] = None,
                        gateway=None) -> ExtractionResult:
    """Extract ingredients; LLM mode falls back to the grammar on gateway failure."""
    table = table or ConversionTable.default()
    if mode == "LLM":
        if gateway is None:
            raise ParseError("LLM mode requires a configured gateway")
        from . import gateway as gw
        try:
            items = gw.extract_via_llm(gateway, recipe.text)
            parsed = [ParsedIngredient(_clean_name(it["name"]), float(it["grams"]),
                                       Provenance.ESTIMATED)
                      for it in items]
            bad = [p for p in parsed if p.grams <= 0 or not p.name]
            if bad or not parsed:
                raise gw.GatewayError("gateway returned unusable ingredient list")
            return ExtractionResult(parsed, "LLM", [])
        except gw.GatewayError as exc:
            fallback = parse_recipe_text(recipe.text, table)
            return ExtractionResult(fallback, "DETERMINISTIC",
                                    [f"LLM extraction failed ({exc}); used deterministic parser"])
    return ExtractionResult(parse_recipe_text(recipe.text, table), "DETERMINISTIC", [])
