"""Candidate generation and the induced generator distribution.

Each sampled completion carries per-token log-probabilities; the sequence
score is exp(mean token logprob) (length-normalized likelihood), and the
generator distribution renormalizes those scores over the deduplicated
sample set.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from ..core import GeneratorDistribution
from .backend import ChatBackend, load_prompt_template
from .dataset import ProblemInstance
from .runner import ExecutionResult

CODE_BLOCK_RE = re.compile(r"```(?:python)?\s*\n(.*?)```", re.DOTALL)


@dataclass
class GeneratedCandidate:
    candidate_id: int
    raw_text: str
    token_logprobs: list[float] = field(default_factory=list)
    seq_score: float = 1.0
    is_valid: bool = False
    code: str = ""
    execution: ExecutionResult | None = None


def seq_score_from_logprobs(token_logprobs: list[float]) -> float:
    """Length-normalized sequence likelihood exp(mean logprob); 1.0 for an
    empty token list (degenerate completion)."""
    if not token_logprobs:
        return 1.0
    return math.exp(sum(token_logprobs) / len(token_logprobs))


def extract_code_block(text: str) -> str | None:
    match = CODE_BLOCK_RE.search(text)
    if match is None:
        return None
    code = match.group(1).strip()
    return code or None


def build_generator_messages(problem: ProblemInstance) -> list[dict]:
    template = load_prompt_template("generator")
    system, _, user = template.partition("\n---\n")
    return [
        {"role": "system", "content": system.strip()},
        {"role": "user", "content": user.format(description=problem.description)},
    ]


def generate_candidates(
    problem: ProblemInstance, n: int, backend: ChatBackend
) -> list[GeneratedCandidate]:
    """Sample n completions; completions without a runnable code block are
    kept as invalid candidates (they retain probability mass)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    messages = build_generator_messages(problem)
    candidates: list[GeneratedCandidate] = []
    for i in range(n):
        result = backend.chat(messages, logprobs=True, seed=i)
        code = extract_code_block(result.text)
        candidates.append(
            GeneratedCandidate(
                candidate_id=i,
                raw_text=result.text,
                token_logprobs=list(result.token_logprobs),
                seq_score=seq_score_from_logprobs(result.token_logprobs),
                is_valid=code is not None,
                code=code or "",
            )
        )
    return candidates


def _canonical_text(text: str) -> str:
    return " ".join(text.split())


def dedupe_candidates(candidates: list[GeneratedCandidate]) -> list[GeneratedCandidate]:
    """Merge exact-duplicate texts (after whitespace canonicalization),
    keeping the representative with the maximum sequence score.
    First-occurrence order is preserved."""
    best: dict[str, GeneratedCandidate] = {}
    order: list[str] = []
    for cand in candidates:
        key = _canonical_text(cand.raw_text)
        if key not in best:
            best[key] = cand
            order.append(key)
        elif cand.seq_score > best[key].seq_score:
            best[key] = cand
    return [best[key] for key in order]


def derive_distribution(candidates: list[GeneratedCandidate]) -> GeneratorDistribution:
    """Generator distribution over `dedupe_candidates(candidates)`, in that
    order: sequence scores renormalized to sum to one."""
    if not candidates:
        raise ValueError("cannot derive a distribution from zero candidates")
    unique = dedupe_candidates(candidates)
    total = sum(c.seq_score for c in unique)
    return GeneratorDistribution(tuple(c.seq_score / total for c in unique))
