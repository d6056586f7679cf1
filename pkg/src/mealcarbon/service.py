"""HTTP front door: parse -> propose -> confirm -> assess -> chat.

Sessions run a forward-only stage machine; the payload of each stage is
frozen once the next stage is entered.  An optional JSON-lines journal
lets sessions survive restarts.
"""

from __future__ import annotations

import json
import logging
import secrets
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import gateway, matching, pipeline, report
from .catalog import DatabaseSource, ProductStore, load_store
from .embeddings import build_index, get_provider
from .matching import SelectionError, SelectionMode, SelectionSet
from .recipes import (EmptyRecipeError, ParseError, ParsedIngredient, Provenance,
                      RawRecipe, SUPPORTED_COUNTRIES, extract_ingredients)

logger = logging.getLogger(__name__)

STAGES = ("PARSED", "PROPOSED", "CONFIRMED", "ASSESSED")


@dataclass
class Session:
    id: str
    target_country: str
    stage: str
    recipe_text: str
    ingredients: list[dict] = field(default_factory=list)
    candidates: dict[str, list[dict]] = field(default_factory=dict)
    assessment: Optional[dict] = None
    report_text: Optional[str] = None
    results_text: Optional[str] = None
    chat_history: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    created: float = field(default_factory=time.time)
    updated: float = field(default_factory=time.time)

    def to_dict(self) -> dict:
        return {
            "id": self.id, "target_country": self.target_country,
            "stage": self.stage, "recipe_text": self.recipe_text,
            "ingredients": self.ingredients, "candidates": self.candidates,
            "assessment": self.assessment, "report_text": self.report_text,
            "results_text": self.results_text, "chat_history": self.chat_history,
            "notes": self.notes, "created": self.created, "updated": self.updated,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        return cls(**d)


class SessionStore:
    """In-memory map with an optional append-only journal."""

    def __init__(self, journal_path: Optional[str | Path] = None):
        self._sessions: dict[str, Session] = {}
        self._journal = Path(journal_path) if journal_path else None
        if self._journal and self._journal.exists():
            for line in self._journal.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    snap = Session.from_dict(json.loads(line))
                    self._sessions[snap.id] = snap

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def put(self, session: Session) -> None:
        session.updated = time.time()
        self._sessions[session.id] = session
        if self._journal:
            self._journal.parent.mkdir(parents=True, exist_ok=True)
            with self._journal.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(session.to_dict(), sort_keys=True) + "\n")


class CreateSessionBody(BaseModel):
    text: str
    target_country: str = "NL"


class SelectionBody(BaseModel):
    selections: dict[str, list[str]]


class ChatBody(BaseModel):
    message: str


def build_engine(store_path: str | Path, embed_provider: str = "LEXICAL",
                 **provider_kwargs) -> pipeline.Engine:
    store = ProductStore(load_store(store_path))
    provider = get_provider(embed_provider, **provider_kwargs)
    indices = {}
    for source in DatabaseSource:
        if store.names(source):
            indices[source] = build_index(store, source, provider)
    return pipeline.Engine(store=store, indices=indices, provider=provider)


def create_app(store_path: str | Path,
               embed_provider: str = "LEXICAL",
               chat_provider: str = "STUB",
               extraction_mode: str = "DETERMINISTIC",
               journal_path: Optional[str | Path] = None,
               cors_origins: Optional[list[str]] = None,
               static_dir: Optional[str | Path] = None) -> FastAPI:
    engine = build_engine(store_path, embed_provider)
    chat = gateway.ChatSessions(gateway.get_chat_provider(chat_provider))
    sessions = SessionStore(journal_path)
    # Re-open chat grounding for journaled sessions.
    for sid, sess in list(sessions._sessions.items()):
        if sess.results_text is not None:
            state = gateway.ChatSessionState(session_id=sid,
                                             results_text=sess.results_text,
                                             history=list(sess.chat_history))
            chat.restore(state)

    app = FastAPI(title="mealcarbon")
    if cors_origins:
        app.add_middleware(CORSMiddleware, allow_origins=cors_origins,
                           allow_methods=["*"], allow_headers=["*"])

    @app.get("/api/meta")
    def meta():
        return {
            "countries": list(SUPPORTED_COUNTRIES),
            "regions": {s.value: sorted(engine.store.regions(s))
                        for s in DatabaseSource},
            "sources": [s.value for s in DatabaseSource],
        }

    @app.post("/api/sessions")
    def create_session(body: CreateSessionBody):
        if not body.text.strip():
            raise HTTPException(status_code=422, detail="recipe text is empty")
        try:
            recipe = RawRecipe(text=body.text, target_country=body.target_country)
            extraction = extract_ingredients(
                recipe, mode="LLM" if extraction_mode == "LLM" else "DETERMINISTIC",
                gateway=chat.provider if extraction_mode == "LLM" else None)
        except EmptyRecipeError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except ParseError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session = Session(
            id=secrets.token_urlsafe(12),
            target_country=body.target_country,
            stage="PARSED",
            recipe_text=body.text,
            ingredients=[i.to_dict() for i in extraction.ingredients],
            notes=extraction.notes,
        )
        sessions.put(session)
        logger.info("session %s created with %d ingredients",
                    session.id, len(session.ingredients))
        return {"session_id": session.id, "ingredients": session.ingredients,
                "notes": session.notes}

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return sessions.get(session_id).to_dict()

    @app.get("/api/sessions/{session_id}/candidates")
    def get_candidates(session_id: str):
        session = sessions.get(session_id)
        if session.stage == "PARSED":
            names = [i["name"] for i in session.ingredients]
            grouped = engine.propose(names, session.target_country)
            session.candidates = {ing: [c.to_dict() for c in cands]
                                  for ing, cands in grouped.items()}
            session.stage = "PROPOSED"
            sessions.put(session)
        return {"session_id": session.id, "stage": session.stage,
                "candidates": session.candidates}

    @app.post("/api/sessions/{session_id}/selection")
    def post_selection(session_id: str, body: SelectionBody):
        session = sessions.get(session_id)
        if session.stage in ("CONFIRMED", "ASSESSED"):
            raise HTTPException(status_code=409, detail="selection stage already passed")
        if session.stage != "PROPOSED":
            raise HTTPException(status_code=409,
                                detail=f"session is at stage {session.stage}, "
                                       f"fetch candidates first")
        candidates = {
            ing: [matching.MatchCandidate(
                ingredient=c["ingredient"], product_id=c["product_id"],
                source=DatabaseSource(c["source"]), name=c["name"],
                similarity=c["similarity"],
                has_target_country_data=c["has_target_country_data"])
                for c in cands]
            for ing, cands in session.candidates.items()
        }
        selection = SelectionSet(choices=body.selections, mode=SelectionMode.USER)
        try:
            confirmed = matching.confirm(candidates, selection)
        except SelectionError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session.stage = "CONFIRMED"

        ingredients = [ParsedIngredient(i["name"], i["grams"],
                                        Provenance(i["provenance"]))
                       for i in session.ingredients]
        assessment = pipeline.assess(engine.store, ingredients, confirmed,
                                     session.target_country, session.recipe_text,
                                     extra_notes=session.notes)
        session.assessment = assessment.to_dict()
        session.report_text = report.build_report(assessment)
        session.results_text = pipeline.results_text(assessment)
        session.stage = "ASSESSED"
        sessions.put(session)
        chat.open(session.id, session.results_text)
        return {"session_id": session.id,
                "assessment": session.assessment,
                "report": session.report_text,
                "visualization": assessment.visualization}

    @app.post("/api/sessions/{session_id}/chat")
    def post_chat(session_id: str, body: ChatBody):
        session = sessions.get(session_id)
        if session.stage != "ASSESSED":
            raise HTTPException(status_code=409, detail="session is not assessed yet")
        if not body.message.strip():
            raise HTTPException(status_code=422, detail="empty chat message")
        try:
            chat.get(session.id)
        except gateway.UnknownSessionError:
            chat.open(session.id, session.results_text or "")
            state = chat.get(session.id)
            state.history = list(session.chat_history)
        try:
            answer = chat.chat_followup(session.id, body.message)
        except gateway.GatewayError as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        session.chat_history = list(chat.get(session.id).history)
        sessions.put(session)
        return {"answer": answer}

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")

    return app
