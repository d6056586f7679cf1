"""Chat-completion gateway with structured-output enforcement.

One remote HTTP provider (JSON chat-completion contract, key via env
var) and a deterministic stub for tests and offline runs.  Responses
carrying a schema id are validated; after two retries a schema
violation becomes a hard error.  Gateway output never feeds back into
impact arithmetic.
"""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Optional

import httpx
import jsonschema

logger = logging.getLogger(__name__)

TEMPERATURE = 0.0  # deterministic outputs, always
SCHEMA_RETRIES = 2

TEMPLATE_IDS = ("ingredient_extraction", "report_paraphrase", "followup_chat")

_TEMPLATE_FILES = {
    "ingredient_extraction": "ingredient_extraction.txt",
    "report_paraphrase": "report_paraphrase.txt",
    "followup_chat": "followup_chat.txt",
}

SCHEMAS: dict[str, dict] = {
    "ingredient_list": {
        "type": "object",
        "properties": {
            "ingredients": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "properties": {
                        "name": {"type": "string", "minLength": 1},
                        "grams": {"type": "number", "exclusiveMinimum": 0},
                    },
                    "required": ["name", "grams"],
                },
            },
        },
        "required": ["ingredients"],
    },
}


class GatewayError(Exception):
    pass


class SchemaViolationError(GatewayError):
    pass


class UnknownSessionError(GatewayError):
    pass


def load_template(template_id: str) -> str:
    if template_id not in _TEMPLATE_FILES:
        raise GatewayError(f"unknown template {template_id!r}")
    return resources.files("mealcarbon.prompts") \
        .joinpath(_TEMPLATE_FILES[template_id]).read_text(encoding="utf-8")


@dataclass
class ChatRequest:
    template_id: str
    variables: dict[str, str]
    schema_id: Optional[str] = None
    history: list[dict] = field(default_factory=list)

    def render(self) -> str:
        return load_template(self.template_id).format(**self.variables)


class StubProvider:
    """Canned, schema-valid fixtures keyed by template id. Pure."""

    # The canonical demo recipe, as the extraction function would return it.
    CANNED_EXTRACTION = [
        {"name": "pizza dough", "grams": 200},
        {"name": "tomato sauce", "grams": 100},
        {"name": "shredded mozzarella", "grams": 75},
        {"name": "red onion", "grams": 70},
        {"name": "olives", "grams": 30},
        {"name": "oregano", "grams": 5},
    ]

    def complete_raw(self, request: ChatRequest) -> str:
        if request.template_id == "ingredient_extraction":
            return json.dumps({"ingredients": self.CANNED_EXTRACTION})
        if request.template_id == "report_paraphrase":
            # Paraphrase layer never changes numbers; the stub passes through.
            return request.variables.get("report_text", "")
        if request.template_id == "followup_chat":
            return self._grounded_answer(request)
        raise GatewayError(f"unknown template {request.template_id!r}")

    def _grounded_answer(self, request: ChatRequest) -> str:
        results_text = request.variables.get("results_text", "")
        question = ""
        for msg in reversed(request.history):
            if msg.get("role") == "user":
                question = msg.get("content", "")
                break
        lines = [ln for ln in results_text.splitlines() if ln.strip()]
        q = question.lower()
        if "market" in q or "share" in q:
            picked = [ln for ln in lines if "Market share" in ln or "Market total" in ln]
        elif "stage" in q or "lifecycle" in q or "phase" in q:
            picked = [ln for ln in lines if "Percentage" in ln]
        elif "quality" in q:
            picked = [ln for ln in lines if "quality" in ln.lower()]
        else:
            picked = [ln for ln in lines if re.search(r"\d", ln)]
        picked = picked[:8]
        if not picked:
            return ("The retrieved data does not cover that aspect of the recipe. "
                    "Try asking about totals, lifecycle stages, or market shares.")
        return "Based on the retrieved impact data:\n" + "\n".join(picked)


class RemoteChatProvider:
    """HTTP JSON chat-completion contract; API key read from the environment."""

    def __init__(self, endpoint: Optional[str] = None, model: str = "default",
                 timeout: float = 30.0, client: Optional[httpx.Client] = None):
        self.endpoint = endpoint or os.environ.get("MEALCARBON_CHAT_ENDPOINT")
        if not self.endpoint:
            raise GatewayError("no chat endpoint configured "
                               "(set MEALCARBON_CHAT_ENDPOINT)")
        self.model = model
        self.api_key = os.environ.get("MEALCARBON_CHAT_API_KEY", "")
        self._client = client or httpx.Client(timeout=timeout)

    def complete_raw(self, request: ChatRequest) -> str:
        messages = [{"role": "system", "content": request.render()}]
        messages.extend(request.history)
        payload = {"model": self.model, "temperature": TEMPERATURE,
                   "messages": messages}
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        logger.info("chat request template=%s messages=%d",
                    request.template_id, len(messages))
        try:
            resp = self._client.post(self.endpoint, json=payload, headers=headers)
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise GatewayError(f"chat endpoint failed: {exc}") from exc
        data = resp.json()
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise GatewayError(f"malformed chat response: {data!r}") from exc


def get_chat_provider(name: str, **kwargs):
    if name.upper() == "STUB":
        return StubProvider()
    if name.upper() == "REMOTE":
        return RemoteChatProvider(**kwargs)
    raise GatewayError(f"unknown chat provider {name!r}")


def complete(provider, request: ChatRequest) -> Any:
    """Run a completion; with a schema id the reply must validate as JSON.

    Retries malformed replies twice before raising SchemaViolationError.
    """
    if request.schema_id is None:
        return provider.complete_raw(request)
    schema = SCHEMAS.get(request.schema_id)
    if schema is None:
        raise GatewayError(f"unknown schema {request.schema_id!r}")
    last_error: Optional[Exception] = None
    for _ in range(1 + SCHEMA_RETRIES):
        raw = provider.complete_raw(request)
        try:
            parsed = json.loads(raw)
            jsonschema.validate(parsed, schema)
            return parsed
        except (json.JSONDecodeError, jsonschema.ValidationError) as exc:
            last_error = exc
    raise SchemaViolationError(f"response failed schema {request.schema_id!r} "
                               f"after {SCHEMA_RETRIES} retries: {last_error}")


def extract_via_llm(provider, user_message: str) -> list[dict]:
    request = ChatRequest(template_id="ingredient_extraction",
                          variables={"user_message": user_message},
                          schema_id="ingredient_list")
    return complete(provider, request)["ingredients"]


@dataclass
class ChatSessionState:
    session_id: str
    results_text: str
    history: list[dict] = field(default_factory=list)


class ChatSessions:
    """Per-session follow-up chat grounded on the immutable results text."""

    def __init__(self, provider):
        self.provider = provider
        self._sessions: dict[str, ChatSessionState] = {}

    def open(self, session_id: str, results_text: str) -> ChatSessionState:
        state = ChatSessionState(session_id=session_id, results_text=results_text)
        self._sessions[session_id] = state
        return state

    def restore(self, state: ChatSessionState) -> None:
        self._sessions[state.session_id] = state

    def get(self, session_id: str) -> ChatSessionState:
        if session_id not in self._sessions:
            raise UnknownSessionError(f"unknown chat session {session_id!r}")
        return self._sessions[session_id]

    def chat_followup(self, session_id: str, message: str) -> str:
        if not message.strip():
            raise GatewayError("empty chat message")
        state = self.get(session_id)
        state.history.append({"role": "user", "content": message})
        request = ChatRequest(template_id="followup_chat",
                              variables={"results_text": state.results_text},
                              history=list(state.history))
        answer = complete(self.provider, request)
        state.history.append({"role": "assistant", "content": answer})
        return answer
