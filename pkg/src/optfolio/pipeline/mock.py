"""Deterministic mock backend for tests and offline demos.

The mock behaves like a chat-completions backend over the bundled toy
problems: generation returns canned model texts with fixed token
log-probabilities (sequence score strictly decreasing in the variant
index), and evaluator/judge requests return canned scores that decrease
in the variant index.  Consequently the evaluator's top-ranked candidates
also hold the top judge scores, and every reply is a pure function of the
request plus its seed.
"""

from __future__ import annotations

import json
import re
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .backend import ChatBackend, ChatResult
from .dataset import ProblemInstance

VARIANT_RE = re.compile(r"Model variant (\d+) for problem (\S+)\.")

# Every 10th variant has no code block, exercising the invalid-candidate
# path (it still carries probability mass and scores 0).
_INVALID_PERIOD = 10


def _variant_logprobs(variant: int) -> list[float]:
    # Mean logprob -0.05 * (variant + 1): sequence score strictly
    # decreasing in the variant index.
    n = 12 + variant % 3
    return [-0.05 * (variant + 1)] * n


def evaluator_score(variant: int) -> int:
    return max(1, 95 - 5 * variant)


def judge_score(variant: int) -> int:
    return max(1, 98 - 5 * variant)


class MockBackend(ChatBackend):
    def __init__(self, problems: list[ProblemInstance]):
        self.problems = {p.id: p for p in problems}
        self.calls = 0

    def chat(self, messages: list[dict], *, logprobs: bool = False,
             seed: int | None = None) -> ChatResult:
        self.calls += 1
        user = next(m["content"] for m in reversed(messages) if m["role"] == "user")
        if "Ground truth solution:" in user:
            return self._score_reply(user, judge_score)
        if "Candidate optimization model" in user:
            return self._score_reply(user, evaluator_score)
        return self._generate_reply(user, seed or 0, logprobs)

    def _find_problem(self, user: str) -> ProblemInstance:
        for problem in self.problems.values():
            if problem.description in user:
                return problem
        raise ValueError("mock backend: request does not mention a known problem")

    def _generate_reply(self, user: str, variant: int, logprobs: bool) -> ChatResult:
        problem = self._find_problem(user)
        text = candidate_text(problem, variant)
        return ChatResult(
            text=text,
            token_logprobs=_variant_logprobs(variant) if logprobs else [],
        )

    def _score_reply(self, user: str, score_fn) -> ChatResult:
        match = VARIANT_RE.search(user)
        if match is None:
            return ChatResult(text="50")
        return ChatResult(text=str(score_fn(int(match.group(1)))))


def candidate_text(problem: ProblemInstance, variant: int) -> str:
    """Canned candidate model text for one (problem, variant) pair."""
    base = problem.ground_truth_objective or 100.0
    value = round(base * (1.0 + 0.05 * variant), 4)
    lines = [
        f"Model variant {variant} for problem {problem.id}.",
        "",
        "Decision variables: x1, x2 >= 0.",
        f"Objective: minimize total cost (variant {variant} weighting).",
        "Constraints: capacity and demand limits as stated in the problem.",
        "",
    ]
    if (variant + 1) % _INVALID_PERIOD == 0:
        lines.append("(The code for this formulation was omitted.)")
    else:
        lines += [
            "```python",
            f"print('Optimal objective: {value}')",
            "```",
        ]
    return "\n".join(lines)


class _MockHandler(BaseHTTPRequestHandler):
    backend: MockBackend = None  # set by serve_mock

    def do_POST(self):  # noqa: N802 (http.server API)
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length) or b"{}")
        want_logprobs = bool(payload.get("logprobs"))
        result = self.backend.chat(
            payload.get("messages", []),
            logprobs=want_logprobs,
            seed=payload.get("seed"),
        )
        choice = {"index": 0, "message": {"role": "assistant", "content": result.text}}
        if want_logprobs:
            choice["logprobs"] = {
                "content": [
                    {"token": f"t{i}", "logprob": lp}
                    for i, lp in enumerate(result.token_logprobs)
                ]
            }
        body = json.dumps(
            {"object": "chat.completion", "model": "mock", "choices": [choice]}
        ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, fmt, *args):
        pass


def serve_mock(problems: list[ProblemInstance], host: str = "127.0.0.1",
               port: int = 8099) -> ThreadingHTTPServer:
    """Start the mock backend as an OpenAI-compatible HTTP server.
    Returns the server; call serve_forever() or shutdown() on it."""
    handler = type("Handler", (_MockHandler,), {"backend": MockBackend(problems)})
    return ThreadingHTTPServer((host, port), handler)
