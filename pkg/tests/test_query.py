import math
import random

import pytest

from mealcarbon.catalog import MarketShare, Stage
from mealcarbon.query import (IngredientQueryResult, NoDataError,
                              assemble_results_text, bonsai_market_total,
                              query_product)


def test_pizza_dough_big_climate_nl(store):
    entry = query_product(store, "big_climate:pizza-dough", 200.0, "NL")
    assert entry.total_impact == pytest.approx(0.241, abs=1e-9)
    assert entry.region_used == "NL"
    assert entry.country_fallback is False
    stages = {s.stage: s for s in entry.stage_breakdown}
    assert stages[Stage.AGRICULTURE].impact == pytest.approx(0.174, abs=1e-9)
    assert stages[Stage.AGRICULTURE].percentage == 72.2
    assert stages[Stage.ILUC].impact == pytest.approx(0.011, abs=1e-9)
    assert stages[Stage.ILUC].percentage == 4.6


def test_pizza_base_agribalyse_falls_back_to_france(store):
    entry = query_product(store, "agribalyse:pizza-base-raw", 200.0, "NL")
    assert entry.total_impact == pytest.approx(0.0391, abs=1e-9)
    assert entry.country_fallback is True
    assert entry.region_used == "FR"
    assert entry.quality_rating == 2.3277205962237506


def test_zero_grams_zero_impact(store):
    entry = query_product(store, "big_climate:pizza-dough", 0.0, "NL")
    assert entry.total_impact == 0.0


def test_unknown_product(store):
    with pytest.raises(NoDataError):
        query_product(store, "bonsai:unicorn-dust", 100.0, "NL")


def test_linearity(store):
    rng = random.Random(7)
    ids = ["big_climate:pizza-dough", "agribalyse:olives", "bonsai:olives"]
    for _ in range(200):
        pid = rng.choice(ids)
        a, b = rng.uniform(0, 500), rng.uniform(0, 500)
        ta = query_product(store, pid, a, "NL").total_impact
        tb = query_product(store, pid, b, "NL").total_impact
        tab = query_product(store, pid, a + b, "NL").total_impact
        assert abs(tab - (ta + tb)) < 1e-9


def test_fallback_average_equals_mean_oracle(store):
    # Olives, green, pickled, canned exists for ES and FR only
    entry = query_product(store, "big_climate:olives-green-pickled-canned",
                          100.0, "NL")
    assert entry.country_fallback is True
    assert entry.region_used == "ES,FR"
    assert entry.total_impact == pytest.approx((0.218 + 0.226) / 2, abs=1e-12)


def test_bonsai_market_total_single_region():
    shares = [MarketShare("IT", 100.0, 0.5)]
    assert bonsai_market_total(shares, 100.0) == pytest.approx(0.5)


def test_bonsai_market_total_symmetric():
    shares = [MarketShare("A", 50.0, 0.4), MarketShare("B", 50.0, 0.6)]
    assert bonsai_market_total(shares, 100.0) == pytest.approx(0.5)


def test_bonsai_olives_weighted_sum(store):
    # hand-computed from the fixture shares: 0.5*0.185 + 0.2*0.21 + 0.3*0.172
    expected_per_100 = 0.5 * 0.185 + 0.2 * 0.21 + 0.3 * 0.172
    entry = query_product(store, "bonsai:olives", 30.0, "NL")
    assert entry.total_impact == pytest.approx(expected_per_100 * 0.3, abs=1e-12)
    assert entry.region_used == "GLOBAL"
    assert len(entry.market_shares) == 3


def test_bonsai_market_total_renormalizes_over_missing():
    shares = [MarketShare("A", 50.0, 0.4), MarketShare("B", 50.0, None)]
    assert bonsai_market_total(shares, 100.0) == pytest.approx(0.4)


def test_bonsai_market_total_scale_invariant():
    shares = [MarketShare("A", 30.0, 0.4), MarketShare("B", 60.0, 0.7)]
    scaled = [MarketShare("A", 10.0, 0.4), MarketShare("B", 20.0, 0.7)]
    assert bonsai_market_total(shares, 123.0) == \
        pytest.approx(bonsai_market_total(scaled, 123.0), abs=1e-12)


def test_bonsai_market_total_no_data():
    with pytest.raises(NoDataError):
        bonsai_market_total([MarketShare("A", 100.0, None)], 100.0)


def test_results_text_heading(store):
    entry = query_product(store, "agribalyse:pizza-base-raw", 200.0, "NL")
    text = assemble_results_text([IngredientQueryResult(
        ingredient="pizza dough", grams=200.0, entries=[entry])])
    assert "Agribalyse database results for 'Pizza base, raw' (DATA FROM FRANCE):" in text
    assert "- Impact for 200 grams: 0.0391 kg CO2-eq" in text
    assert "- Data quality rating: 2.3277205962237506" in text
    assert "- Agriculture impact for 200 grams: 0.00267 kg CO2-eq, Percentage: 6.8%" in text


def test_results_text_empty():
    assert assemble_results_text([]) == ""


def test_results_text_golden(engine):
    from pathlib import Path

    from mealcarbon import pipeline
    from mealcarbon.recipes import parse_recipe_text
    from conftest import PIZZA_MESSAGE

    ingredients = parse_recipe_text(PIZZA_MESSAGE)
    assessment = pipeline.assess_auto(engine, ingredients, "NL", PIZZA_MESSAGE)
    golden = Path(__file__).parent / "golden" / "results_pizza.txt"
    assert pipeline.results_text(assessment) + "\n" == \
        golden.read_text(encoding="utf-8")
