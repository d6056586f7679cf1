import json
from pathlib import Path

import pytest

from mealcarbon import pipeline
from mealcarbon.catalog import DatabaseSource, ProductStore, load_catalog, save_store
from mealcarbon.embeddings import LexicalProvider, build_index

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

CATALOGS = [
    (DatabaseSource.AGRIBALYSE, "agribalyse.csv", "agribalyse_mapping.json"),
    (DatabaseSource.BIG_CLIMATE, "bigclimate.csv", "bigclimate_mapping.json"),
    (DatabaseSource.BONSAI, "bonsai.json", "bonsai_mapping.json"),
]

PIZZA_MESSAGE = (FIXTURES / "veggie_pizza.txt").read_text(encoding="utf-8")

# The demo recipe's expected extraction.
PIZZA_INGREDIENTS = [
    ("pizza dough", 200.0),
    ("tomato sauce", 100.0),
    ("shredded mozzarella", 75.0),
    ("red onion", 70.0),
    ("olives", 30.0),
    ("oregano", 5.0),
]


def load_fixture_records():
    records = []
    for source, catalog_file, mapping_file in CATALOGS:
        mapping = json.loads((FIXTURES / mapping_file).read_text(encoding="utf-8"))
        result = load_catalog(source, FIXTURES / catalog_file, mapping)
        assert not result.rejections, result.rejections
        records.extend(result.records)
    return records


@pytest.fixture(scope="session")
def records():
    return load_fixture_records()


@pytest.fixture(scope="session")
def store(records):
    return ProductStore(records)


@pytest.fixture(scope="session")
def provider():
    return LexicalProvider()


@pytest.fixture(scope="session")
def indices(store, provider):
    return {s: build_index(store, s, provider)
            for s in DatabaseSource if store.names(s)}


@pytest.fixture(scope="session")
def engine(store, indices, provider):
    return pipeline.Engine(store=store, indices=indices, provider=provider)


@pytest.fixture(scope="session")
def store_file(tmp_path_factory, records):
    path = tmp_path_factory.mktemp("store") / "store.jsonl"
    save_store(records, path)
    return path
