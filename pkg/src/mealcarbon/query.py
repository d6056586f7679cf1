"""Impact retrieval for confirmed products.

Resolves the target-country record (or averages over available regions
as a fallback), computes BONSAI market-share-weighted totals, and
assembles the standardized results text that both the report layer and
the chat gateway consume.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .catalog import (DatabaseSource, MarketShare, ProductRecord, ProductStore,
                      Stage, StageShare)

COUNTRY_NAMES: dict[str, str] = json.loads(
    resources.files("mealcarbon.data").joinpath("countries.json").read_text(encoding="utf-8"))


class NoDataError(Exception):
    pass


# Per-source display labels for lifecycle stages, following each
# database's own terminology.
_STAGE_LABELS = {
    DatabaseSource.AGRIBALYSE: {
        Stage.AGRICULTURE: "Agriculture",
        Stage.PROCESSING: "Processing",
        Stage.PACKAGING: "Packaging",
        Stage.TRANSPORT: "Transportation",
        Stage.RETAIL: "Retail",
        Stage.CONSUMPTION: "Consumption",
    },
    DatabaseSource.BIG_CLIMATE: {
        Stage.AGRICULTURE: "Agriculture",
        Stage.ILUC: "Indirect Land Use Change",
        Stage.PROCESSING: "Food processing",
        Stage.PACKAGING: "Packaging",
        Stage.TRANSPORT: "Transport",
        Stage.RETAIL: "Retail",
    },
}

_STAGE_ORDER = [Stage.AGRICULTURE, Stage.ILUC, Stage.PROCESSING,
                Stage.PACKAGING, Stage.TRANSPORT, Stage.RETAIL, Stage.CONSUMPTION]


def country_name(code: str) -> str:
    return COUNTRY_NAMES.get(code, code)


@dataclass
class SourceEntry:
    """Impact of one selected product from one source, scaled to the ingredient grams."""
    product_id: str
    source: DatabaseSource
    name: str
    grams: float
    total_impact: float                 # kg CO2-eq for `grams`
    region_used: str                    # country code, or comma-joined codes when averaged
    country_fallback: bool
    stage_breakdown: list[StageShare] = field(default_factory=list)  # scaled to grams
    market_shares: list[MarketShare] = field(default_factory=list)   # emissions scaled to grams
    production_impact: Optional[float] = None   # BONSAI direct production, scaled
    quality_rating: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "product_id": self.product_id,
            "source": self.source.value,
            "name": self.name,
            "grams": self.grams,
            "total_impact": self.total_impact,
            "region_used": self.region_used,
            "country_fallback": self.country_fallback,
            "stage_breakdown": [s.to_dict() for s in self.stage_breakdown],
            "market_shares": [m.to_dict() for m in self.market_shares],
            "production_impact": self.production_impact,
            "quality_rating": self.quality_rating,
        }


@dataclass
class IngredientQueryResult:
    ingredient: str
    grams: float
    entries: list[SourceEntry]
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"ingredient": self.ingredient, "grams": self.grams,
                "entries": [e.to_dict() for e in self.entries],
                "notes": self.notes}


def bonsai_market_total(shares: list[MarketShare], grams: float) -> float:
    """Share-weighted mean of regional per-100 g emissions, scaled to grams.

    Weights are renormalized over the shares that actually carry emissions.
    """
    carrying = [s for s in shares if s.emissions is not None]
    if not carrying:
        raise NoDataError("no market share carries emissions data")
    weight_sum = math.fsum(s.share_pct for s in carrying)
    if weight_sum <= 0:
        raise NoDataError("market shares sum to zero")
    per100 = math.fsum(s.share_pct * s.emissions for s in carrying) / weight_sum
    return per100 * grams / 100.0


def _scale_record(rec: ProductRecord, grams: float) -> tuple[Optional[float], list[StageShare], list[MarketShare]]:
    factor = grams / 100.0
    total = rec.total_impact * factor if rec.total_impact is not None else None
    stages = [StageShare(s.stage, s.impact * factor, s.percentage)
              for s in rec.stage_breakdown]
    shares = [MarketShare(m.region, m.share_pct,
                          m.emissions * factor if m.emissions is not None else None)
              for m in rec.market_shares]
    return total, stages, shares


def _average_records(records: list[ProductRecord], grams: float):
    """Stage-wise average across regions; stages averaged only over regions reporting them."""
    totals = [r.total_impact for r in records if r.total_impact is not None]
    total = math.fsum(totals) / len(totals) * grams / 100.0 if totals else None

    by_stage: dict[Stage, list[StageShare]] = {}
    for rec in records:
        for s in rec.stage_breakdown:
            by_stage.setdefault(s.stage, []).append(s)
    stages = []
    for stage in _STAGE_ORDER:
        group = by_stage.get(stage)
        if not group:
            continue
        impact = math.fsum(s.impact for s in group) / len(group) * grams / 100.0
        pct = math.fsum(s.percentage for s in group) / len(group)
        stages.append(StageShare(stage, impact, pct))
    return total, stages


def query_product(store: ProductStore, collapsed_id: str, grams: float,
                  target_country: str) -> SourceEntry:
    """Impact entry for one confirmed product at the given grams.

    Uses the target-country record when it exists (GLOBAL counts as covering
    every country); otherwise averages over all available regions and sets
    the fallback flag.
    """
    resolved = store.resolve_collapsed(collapsed_id)
    if resolved is None:
        raise NoDataError(f"unknown product {collapsed_id!r}")
    source, name = resolved
    variants = store.variants(source, name)
    with_data = [v for v in variants if v.total_impact is not None or v.market_shares]
    if not with_data:
        raise NoDataError(f"product {name!r} has no impact data in any region")

    exact = [v for v in with_data if v.region in (target_country, "GLOBAL")]
    if exact:
        rec = exact[0]
        total, stages, shares = _scale_record(rec, grams)
        raw_shares = rec.market_shares
        region_used = rec.region
        fallback = False
    else:
        total, stages = _average_records(with_data, grams)
        shares, raw_shares = [], []
        region_used = ",".join(sorted(v.region for v in with_data))
        fallback = True
        rec = with_data[0]

    production = None
    if source == DatabaseSource.BONSAI and raw_shares:
        # Market total is authoritative for BONSAI; any direct production
        # emissions are reported alongside.
        entry_total = bonsai_market_total(raw_shares, grams)
        production = total
    else:
        if total is None:
            raise NoDataError(f"product {name!r} has no total impact data")
        entry_total = total

    return SourceEntry(
        product_id=collapsed_id,
        source=source,
        name=name,
        grams=grams,
        total_impact=entry_total,
        region_used=region_used,
        country_fallback=fallback,
        stage_breakdown=stages,
        market_shares=shares,
        production_impact=production,
        quality_rating=rec.quality_rating,
    )


_SOURCE_TITLES = {
    DatabaseSource.BONSAI: "BONSAI database",
    DatabaseSource.AGRIBALYSE: "Agribalyse database",
    DatabaseSource.BIG_CLIMATE: "BigClimateDatabase",
}


def fmt_impact(value: float) -> str:
    """Impacts render at 4 significant digits."""
    return f"{value:.4g}"


def fmt_grams(grams: float) -> str:
    return f"{grams:g}"


def _entry_heading(entry: SourceEntry) -> str:
    title = _SOURCE_TITLES[entry.source]
    if entry.country_fallback:
        regions = [country_name(c).upper() for c in entry.region_used.split(",")]
        if len(regions) == 1:
            where = f"(DATA FROM {regions[0]})"
        else:
            where = f"(DATA AVERAGED FROM {', '.join(regions)})"
    elif entry.region_used == "GLOBAL":
        where = "(GLOBAL)"
    else:
        where = f"in {country_name(entry.region_used)}"
    return f"{title} results for '{entry.name}' {where}:"


def _render_entry(entry: SourceEntry) -> list[str]:
    g = fmt_grams(entry.grams)
    lines = [_entry_heading(entry)]
    if entry.source == DatabaseSource.BONSAI and entry.market_shares:
        if entry.production_impact is not None:
            lines.append(f"- Production impact for {g} grams: "
                         f"{fmt_impact(entry.production_impact)} kg CO2-eq")
        lines.append(f"- Market total impact for {g} grams: "
                     f"{fmt_impact(entry.total_impact)} kg CO2-eq")
        for m in entry.market_shares:
            em = (f", Emissions for {g} grams: {fmt_impact(m.emissions)} kg CO2-eq"
                  if m.emissions is not None else "")
            lines.append(f"- Market share for {country_name(m.region)}: "
                         f"{m.share_pct:.1f}%{em}")
    else:
        lines.append(f"- Impact for {g} grams: {fmt_impact(entry.total_impact)} kg CO2-eq")
        if entry.quality_rating is not None:
            lines.append(f"- Data quality rating: {entry.quality_rating!r}")
        labels = _STAGE_LABELS.get(entry.source, {})
        for s in entry.stage_breakdown:
            label = labels.get(s.stage, s.stage.value.title())
            lines.append(f"- {label} impact for {g} grams: {fmt_impact(s.impact)} kg CO2-eq, "
                         f"Percentage: {s.percentage:.1f}%")
    return lines


def assemble_results_text(results: list[IngredientQueryResult]) -> str:
    """Standardized per-ingredient serialization of all retrieved impact data."""
    blocks: list[str] = []
    for res in results:
        lines = [f"Results for selected most similar items to '{res.ingredient}':", ""]
        if not res.entries:
            lines.append("- No matching products were confirmed for this ingredient.")
        for entry in res.entries:
            lines.extend(_render_entry(entry))
            lines.append("")
        for note in res.notes:
            lines.append(f"Note: {note}")
        blocks.append("\n".join(lines).rstrip())
    return "\n\n".join(blocks)
