"""Catalog ingestion: normalize source-specific LCA exports into one product store.

Each source ships its catalog in its own layout (CSV for Agribalyse and
Big Climate, JSON for BONSAI).  A per-source column mapping tells the
loader which columns hold what; every accepted row becomes a
ProductRecord with impacts rescaled to a per-100 g basis.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, asdict
from enum import Enum
from pathlib import Path
from typing import Any, Optional


class DatabaseSource(str, Enum):
    BONSAI = "BONSAI"
    AGRIBALYSE = "AGRIBALYSE"
    BIG_CLIMATE = "BIG_CLIMATE"


class Stage(str, Enum):
    AGRICULTURE = "AGRICULTURE"
    ILUC = "ILUC"
    PROCESSING = "PROCESSING"
    PACKAGING = "PACKAGING"
    TRANSPORT = "TRANSPORT"
    RETAIL = "RETAIL"
    CONSUMPTION = "CONSUMPTION"


# Which stages a source may legally report.
STAGES_BY_SOURCE = {
    DatabaseSource.BONSAI: set(),
    DatabaseSource.AGRIBALYSE: {
        Stage.AGRICULTURE, Stage.PROCESSING, Stage.PACKAGING,
        Stage.TRANSPORT, Stage.RETAIL, Stage.CONSUMPTION,
    },
    DatabaseSource.BIG_CLIMATE: {
        Stage.AGRICULTURE, Stage.ILUC, Stage.PROCESSING,
        Stage.PACKAGING, Stage.TRANSPORT, Stage.RETAIL,
    },
}

REFERENCE_GRAMS = 100.0


@dataclass
class StageShare:
    stage: Stage
    impact: float          # kg CO2-eq per 100 g
    percentage: float      # as reported by the source; not forced to sum to 100

    def to_dict(self) -> dict:
        return {"stage": self.stage.value, "impact": self.impact,
                "percentage": self.percentage}


@dataclass
class MarketShare:
    region: str
    share_pct: float
    emissions: Optional[float] = None  # kg CO2-eq per 100 g, when reported

    def to_dict(self) -> dict:
        return {"region": self.region, "share_pct": self.share_pct,
                "emissions": self.emissions}


@dataclass
class ProductRecord:
    product_id: str
    source: DatabaseSource
    name: str
    region: str
    reference_quantity_g: float = REFERENCE_GRAMS
    total_impact: Optional[float] = None
    quality_rating: Optional[float] = None
    stage_breakdown: list[StageShare] = field(default_factory=list)
    market_shares: list[MarketShare] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "product_id": self.product_id,
            "source": self.source.value,
            "name": self.name,
            "region": self.region,
            "reference_quantity_g": self.reference_quantity_g,
            "total_impact": self.total_impact,
            "quality_rating": self.quality_rating,
            "stage_breakdown": [s.to_dict() for s in self.stage_breakdown],
            "market_shares": [m.to_dict() for m in self.market_shares],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProductRecord":
        return cls(
            product_id=d["product_id"],
            source=DatabaseSource(d["source"]),
            name=d["name"],
            region=d["region"],
            reference_quantity_g=d.get("reference_quantity_g", REFERENCE_GRAMS),
            total_impact=d.get("total_impact"),
            quality_rating=d.get("quality_rating"),
            stage_breakdown=[StageShare(Stage(s["stage"]), s["impact"], s["percentage"])
                             for s in d.get("stage_breakdown", [])],
            market_shares=[MarketShare(m["region"], m["share_pct"], m.get("emissions"))
                           for m in d.get("market_shares", [])],
        )


@dataclass
class Rejection:
    row: int
    reason: str
    raw: dict

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class IngestResult:
    records: list[ProductRecord]
    rejections: list[Rejection]


class CatalogError(Exception):
    pass


def _slug(name: str) -> str:
    return "-".join("".join(c if c.isalnum() else " " for c in name.lower()).split())


def make_product_id(source: DatabaseSource, name: str, region: str) -> str:
    return f"{source.value.lower()}:{_slug(name)}:{region.lower()}"


def make_collapsed_id(source: DatabaseSource, name: str) -> str:
    """Region-collapsed id: one per (source, product name)."""
    return f"{source.value.lower()}:{_slug(name)}"


def _num(value: Any) -> float:
    if value is None:
        raise ValueError("missing numeric value")
    if isinstance(value, (int, float)):
        return float(value)
    s = str(value).strip().replace(",", ".")
    if not s:
        raise ValueError("empty numeric cell")
    return float(s)


def _opt_num(value: Any) -> Optional[float]:
    if value is None or str(value).strip() == "":
        return None
    return _num(value)


def _row_to_record(source: DatabaseSource, row: dict, mapping: dict) -> ProductRecord:
    cols = mapping["columns"]

    def cell(key, required=False):
        col = cols.get(key)
        if col is None:
            if required:
                raise ValueError(f"mapping missing required column for '{key}'")
            return None
        if col not in row:
            raise ValueError(f"mapping references absent column '{col}'")
        return row[col]

    name = str(cell("name", required=True) or "").strip()
    if not name:
        raise ValueError("empty product name")
    region = str(cell("region") or mapping.get("default_region", "GLOBAL")).strip()
    if not region:
        raise ValueError("empty region")

    ref_qty = _opt_num(cell("reference_quantity_g"))
    if ref_qty is None:
        ref_qty = mapping.get("default_reference_quantity_g", REFERENCE_GRAMS)
    if ref_qty <= 0:
        raise ValueError(f"non-positive reference quantity {ref_qty}")
    scale = REFERENCE_GRAMS / ref_qty

    total = _opt_num(cell("total"))
    if total is not None:
        if total < 0:
            raise ValueError(f"negative total impact {total}")
        total *= scale

    quality = _opt_num(cell("quality"))

    stages: list[StageShare] = []
    for stage_name, stage_cols in mapping.get("stages", {}).items():
        stage = Stage(stage_name)
        if stage not in STAGES_BY_SOURCE[source]:
            raise ValueError(f"stage {stage_name} not valid for {source.value}")
        if stage_cols["impact"] not in row:
            raise ValueError(f"mapping references absent column '{stage_cols['impact']}'")
        impact = _opt_num(row.get(stage_cols["impact"]))
        if impact is None:
            continue
        if impact < 0:
            raise ValueError(f"negative stage impact for {stage_name}")
        pct = _opt_num(row.get(stage_cols.get("percentage", "")))
        if pct is None:
            pct = 100.0 * impact * scale / total if total else 0.0
        if not (0.0 <= pct <= 100.0):
            raise ValueError(f"stage percentage {pct} out of range")
        stages.append(StageShare(stage, impact * scale, pct))

    shares: list[MarketShare] = []
    raw_shares = row.get(mapping.get("market_shares_field", "market"), [])
    if raw_shares:
        for entry in raw_shares:
            pct = _num(entry["share_pct"])
            if not (0.0 <= pct <= 100.0):
                raise ValueError(f"market share {pct} out of range")
            emissions = _opt_num(entry.get("emissions"))
            if emissions is not None:
                emissions *= scale
            shares.append(MarketShare(str(entry["region"]), pct, emissions))
        if sum(s.share_pct for s in shares) > 100.5:
            raise ValueError("market shares sum above 100.5")

    return ProductRecord(
        product_id=make_product_id(source, name, region),
        source=source,
        name=name,
        region=region,
        reference_quantity_g=REFERENCE_GRAMS,
        total_impact=total,
        quality_rating=quality,
        stage_breakdown=stages,
        market_shares=shares,
    )


def load_catalog(source: DatabaseSource, path: str | Path, mapping: dict) -> IngestResult:
    """Load one catalog file. Malformed rows land in the rejection list."""
    path = Path(path)
    if not path.exists():
        raise CatalogError(f"catalog file not found: {path}")

    if mapping.get("format", "csv") == "json":
        rows = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(rows, list):
            raise CatalogError(f"expected a JSON array of rows in {path}")
    else:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))

    records: list[ProductRecord] = []
    rejections: list[Rejection] = []
    for i, row in enumerate(rows):
        try:
            records.append(_row_to_record(source, row, mapping))
        except (ValueError, KeyError) as exc:
            rejections.append(Rejection(row=i, reason=str(exc),
                                        raw={k: v for k, v in row.items()
                                             if isinstance(v, (str, int, float))}))
    return IngestResult(records=records, rejections=rejections)


@dataclass
class ValidationReport:
    duplicate_ids: list[str]
    negative_impacts: list[str]
    out_of_range_percentages: list[str]

    @property
    def hard_violations(self) -> int:
        return (len(self.duplicate_ids) + len(self.negative_impacts)
                + len(self.out_of_range_percentages))

    @property
    def ok(self) -> bool:
        return self.hard_violations == 0

    def to_dict(self) -> dict:
        return {"duplicate_ids": self.duplicate_ids,
                "negative_impacts": self.negative_impacts,
                "out_of_range_percentages": self.out_of_range_percentages,
                "hard_violations": self.hard_violations,
                "ok": self.ok}


def validate_store(records: list[ProductRecord]) -> ValidationReport:
    seen: set[str] = set()
    dupes, negatives, bad_pct = [], [], []
    for rec in records:
        if rec.product_id in seen:
            dupes.append(rec.product_id)
        seen.add(rec.product_id)
        if rec.total_impact is not None and rec.total_impact < 0:
            negatives.append(rec.product_id)
        for s in rec.stage_breakdown:
            if s.impact < 0:
                negatives.append(rec.product_id)
            if not (0.0 <= s.percentage <= 100.0):
                bad_pct.append(rec.product_id)
        for m in rec.market_shares:
            if not (0.0 <= m.share_pct <= 100.0):
                bad_pct.append(rec.product_id)
            if m.emissions is not None and m.emissions < 0:
                negatives.append(rec.product_id)
    return ValidationReport(dupes, negatives, bad_pct)


def list_regions(records: list[ProductRecord], source: DatabaseSource) -> set[str]:
    return {r.region for r in records if r.source == source}


def save_store(records: list[ProductRecord], path: str | Path) -> None:
    """Persist as newline-delimited JSON, one product per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")


def load_store(path: str | Path) -> list[ProductRecord]:
    path = Path(path)
    if not path.exists():
        raise CatalogError(f"store file not found: {path}")
    records = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(ProductRecord.from_dict(json.loads(line)))
    return records


class ProductStore:
    """Immutable lookup view over a list of ProductRecords."""

    def __init__(self, records: list[ProductRecord]):
        self._records = list(records)
        self._by_id: dict[str, ProductRecord] = {}
        self._by_name: dict[tuple[DatabaseSource, str], list[ProductRecord]] = {}
        self._collapsed: dict[str, tuple[DatabaseSource, str]] = {}
        for rec in records:
            self._by_id[rec.product_id] = rec
            self._by_name.setdefault((rec.source, rec.name.lower()), []).append(rec)
            self._collapsed.setdefault(make_collapsed_id(rec.source, rec.name),
                                       (rec.source, rec.name))

    @property
    def records(self) -> list[ProductRecord]:
        return list(self._records)

    def get(self, product_id: str) -> Optional[ProductRecord]:
        return self._by_id.get(product_id)

    def variants(self, source: DatabaseSource, name: str) -> list[ProductRecord]:
        """All regional records for one (source, name)."""
        return list(self._by_name.get((source, name.lower()), []))

    def names(self, source: DatabaseSource) -> list[tuple[str, str]]:
        """Distinct (collapsed id, name) pairs for one source, region-collapsed."""
        seen: dict[str, str] = {}
        for rec in self._records:
            if rec.source != source:
                continue
            cid = make_collapsed_id(source, rec.name)
            if cid not in seen:
                seen[cid] = rec.name
        return sorted(seen.items())

    def resolve_collapsed(self, collapsed_id: str) -> Optional[tuple[DatabaseSource, str]]:
        return self._collapsed.get(collapsed_id)

    def has_region(self, source: DatabaseSource, name: str, country: str) -> bool:
        """GLOBAL records cover every target country."""
        return any(r.region == country or r.region == "GLOBAL"
                   for r in self.variants(source, name))

    def regions(self, source: DatabaseSource) -> set[str]:
        return list_regions(self._records, source)
