"""Batch front door: ingest catalogs, build indices, assess recipe files.

Exit codes: 0 success, 1 partial result (unmatched ingredients),
2 input error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import charts, pipeline, report
from .catalog import (CatalogError, DatabaseSource, ProductStore, load_catalog,
                      load_store, save_store, validate_store)
from .embeddings import build_index, get_provider, load_index, save_index
from .recipes import (ConversionTable, EmptyRecipeError, ParseError, RawRecipe,
                      extract_ingredients)
from .gateway import get_chat_provider


@click.group()
def main():
    """Carbon footprint estimation for composite meals."""


@main.command("ingest")
@click.option("--source", required=True,
              type=click.Choice([s.value for s in DatabaseSource]))
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--mapping", "mapping_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--rejections", "rejections_path", type=click.Path(),
              help="Where to write the rejection report (JSON).")
@click.option("--append/--no-append", default=False,
              help="Append to an existing store file instead of overwriting.")
def cmd_ingest(source, input_path, mapping_path, out_path, rejections_path, append):
    """Normalize one catalog file into the product store."""
    try:
        mapping = json.loads(Path(mapping_path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: cannot read mapping file: {exc}", err=True)
        sys.exit(2)
    try:
        result = load_catalog(DatabaseSource(source), input_path, mapping)
    except CatalogError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    records = result.records
    if append and Path(out_path).exists():
        records = load_store(out_path) + records
    validation = validate_store(records)
    if not validation.ok:
        click.echo(f"error: store validation failed: "
                   f"{json.dumps(validation.to_dict())}", err=True)
        sys.exit(2)
    save_store(records, out_path)
    if rejections_path:
        Path(rejections_path).write_text(
            json.dumps([r.to_dict() for r in result.rejections], indent=2) + "\n",
            encoding="utf-8")
    click.echo(f"ingested {len(result.records)} records "
               f"({len(result.rejections)} rejected) -> {out_path}")


@main.command("index")
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--provider", default="LEXICAL",
              type=click.Choice(["LEXICAL", "REMOTE"], case_sensitive=False))
@click.option("--out", "out_dir", required=True, type=click.Path())
def cmd_index(store_path, provider, out_dir):
    """Build one embedding index file per source present in the store."""
    try:
        store = ProductStore(load_store(store_path))
    except CatalogError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    prov = get_provider(provider)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    built = 0
    for source in DatabaseSource:
        if not store.names(source):
            continue
        index = build_index(store, source, prov)
        save_index(index, out / f"{source.value.lower()}.idx")
        built += 1
        click.echo(f"indexed {len(index)} names for {source.value}")
    if built == 0:
        click.echo("error: store contains no products", err=True)
        sys.exit(2)


@main.command("assess")
@click.option("--recipe-file", required=True, type=click.Path())
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--country", default="NL", show_default=True)
@click.option("--mode", default="auto", show_default=True,
              type=click.Choice(["auto", "stub-llm"]))
@click.option("--conversion-table", "table_path", type=click.Path(),
              help="Override the built-in unit conversion table.")
@click.option("--out-dir", required=True, type=click.Path())
def cmd_assess(recipe_file, store_path, country, mode, table_path, out_dir):
    """Assess a recipe file; writes report.txt, assessment.json, bar.png, pie.png."""
    recipe_path = Path(recipe_file)
    if not recipe_path.exists():
        click.echo(f"error: recipe file not found: {recipe_file}", err=True)
        sys.exit(2)
    text = recipe_path.read_text(encoding="utf-8")
    if not text.strip():
        click.echo("error: recipe file is empty", err=True)
        sys.exit(2)

    table = ConversionTable.from_file(table_path) if table_path else None
    try:
        recipe = RawRecipe(text=text, target_country=country)
        if mode == "stub-llm":
            extraction = extract_ingredients(recipe, mode="LLM", table=table,
                                             gateway=get_chat_provider("STUB"))
        else:
            extraction = extract_ingredients(recipe, mode="DETERMINISTIC",
                                             table=table)
    except (EmptyRecipeError, ParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    try:
        store = ProductStore(load_store(store_path))
    except CatalogError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    provider = get_provider("LEXICAL")
    indices = {s: build_index(store, s, provider)
               for s in DatabaseSource if store.names(s)}
    engine = pipeline.Engine(store=store, indices=indices, provider=provider)

    assessment = pipeline.assess_auto(engine, extraction.ingredients, country,
                                      text, extra_notes=extraction.notes)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "assessment.json").write_text(pipeline.assessment_json(assessment),
                                         encoding="utf-8")
    (out / "report.txt").write_text(report.build_report(assessment) + "\n",
                                    encoding="utf-8")
    (out / "results.txt").write_text(pipeline.results_text(assessment) + "\n",
                                     encoding="utf-8")
    charts.render_bar_chart(assessment.visualization, out / "bar.png")
    charts.render_pie_chart(assessment.visualization, out / "pie.png")
    unmatched = [i.ingredient for i in assessment.ingredient_impacts if i.unmatched]
    click.echo(f"assessed {len(assessment.ingredient_impacts)} ingredients -> {out}")
    if unmatched:
        click.echo(f"warning: unmatched ingredients: {', '.join(unmatched)}", err=True)
        sys.exit(1)


@main.command("serve")
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--chat-provider", default="STUB",
              type=click.Choice(["STUB", "REMOTE"], case_sensitive=False))
@click.option("--journal", "journal_path", type=click.Path(),
              help="JSON-lines session journal for restart persistence.")
@click.option("--static-dir", type=click.Path(),
              help="Directory of built web UI assets to serve at /.")
@click.option("--cors-origin", "cors_origins", multiple=True)
def cmd_serve(store_path, host, port, chat_provider, journal_path, static_dir,
              cors_origins):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app
    app = create_app(store_path, chat_provider=chat_provider.upper(),
                     journal_path=journal_path,
                     cors_origins=list(cors_origins) or None,
                     static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
