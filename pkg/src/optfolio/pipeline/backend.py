"""OpenAI-compatible chat-completions client with bounded retry/backoff
and per-token log-probability capture."""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

logger = logging.getLogger(__name__)

API_KEY_ENV = "PORTFOLIO_API_KEY"

_PROMPT_DIR = Path(__file__).resolve().parent.parent / "prompts"


class BackendError(RuntimeError):
    """Backend unreachable or returned an unusable response after retries."""


class MissingLogprobsError(BackendError):
    """The backend did not return per-token log-probabilities."""


@dataclass
class ChatResult:
    text: str
    token_logprobs: list[float] = field(default_factory=list)


@dataclass
class BackendConfig:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o-mini"
    temperature: float = 1.0
    timeout: float = 120.0
    max_retries: int = 5
    backoff: float = 0.5
    parallel: int = 4
    api_key_env: str = API_KEY_ENV

    @property
    def api_key(self) -> str:
        return os.environ.get(self.api_key_env, "")


class ChatBackend:
    """Interface: one chat completion per call, optionally with logprobs.

    `seed` identifies the sample within a stage so deterministic backends
    can vary per draw; HTTP backends forward it when supported.
    """

    def chat(self, messages: list[dict], *, logprobs: bool = False,
             seed: int | None = None) -> ChatResult:
        raise NotImplementedError


class HTTPBackend(ChatBackend):
    def __init__(self, config: BackendConfig):
        self.config = config
        self._session = requests.Session()

    def chat(self, messages: list[dict], *, logprobs: bool = False,
             seed: int | None = None) -> ChatResult:
        cfg = self.config
        payload: dict = {
            "model": cfg.model,
            "messages": messages,
            "temperature": cfg.temperature,
        }
        if logprobs:
            payload["logprobs"] = True
        if seed is not None:
            payload["seed"] = seed
        headers = {"Content-Type": "application/json"}
        if cfg.api_key:
            headers["Authorization"] = f"Bearer {cfg.api_key}"
        url = cfg.base_url.rstrip("/") + "/chat/completions"

        last_err: Exception | None = None
        for attempt in range(cfg.max_retries):
            try:
                resp = self._session.post(
                    url, json=payload, headers=headers, timeout=cfg.timeout
                )
                if resp.status_code >= 500 or resp.status_code == 429:
                    raise BackendError(f"HTTP {resp.status_code}: {resp.text[:200]}")
                resp.raise_for_status()
                return _parse_completion(resp.json(), want_logprobs=logprobs)
            except MissingLogprobsError:
                raise
            except (requests.RequestException, BackendError, KeyError, ValueError) as exc:
                last_err = exc
                delay = cfg.backoff * (2 ** attempt)
                logger.warning("backend call failed (attempt %d/%d): %s",
                               attempt + 1, cfg.max_retries, exc)
                time.sleep(delay)
        raise BackendError(
            f"backend unreachable after {cfg.max_retries} attempts: {last_err}"
        )


def _parse_completion(body: dict, *, want_logprobs: bool) -> ChatResult:
    choice = body["choices"][0]
    text = choice["message"]["content"] or ""
    token_logprobs: list[float] = []
    if want_logprobs:
        lp = choice.get("logprobs")
        content = (lp or {}).get("content")
        if not content:
            raise MissingLogprobsError(
                "backend response omitted per-token log-probabilities"
            )
        token_logprobs = [float(tok["logprob"]) for tok in content]
    return ChatResult(text=text, token_logprobs=token_logprobs)


def load_prompt_template(name: str) -> str:
    """Load one of the bundled editable prompt templates
    (generator, evaluator, judge)."""
    return (_PROMPT_DIR / f"{name}.txt").read_text(encoding="utf-8")
