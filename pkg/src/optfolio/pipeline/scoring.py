"""Evaluator and judge scoring.

The LLM evaluator scores each executed candidate on [1, 100] with
repeated sampling and ranks by descending mean; the generator-probability
evaluator ranks by descending p(o) with no backend calls.  The judge uses
the same scoring regime but sees the ground truth, and its final score is
the mean normalized to [0, 1].  Invalid candidates score 0 and rank last;
all ties are broken by a seeded RNG.
"""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..core import EvaluatorRanking, GeneratorDistribution, Ranking
from .backend import ChatBackend, load_prompt_template
from .candidates import GeneratedCandidate
from .dataset import ProblemInstance

logger = logging.getLogger(__name__)

SCORE_RE = re.compile(r"\b(100|[1-9][0-9]?)\b")
PARSE_RETRIES = 3
DEFAULT_SAMPLES = 4


class ScoringError(RuntimeError):
    pass


@dataclass
class ScoreSheet:
    candidate_id: int
    raw_scores: list[int] = field(default_factory=list)

    @property
    def mean_score(self) -> float:
        if not self.raw_scores:
            return 0.0
        return sum(self.raw_scores) / len(self.raw_scores)

    @property
    def normalized(self) -> float:
        return self.mean_score / 100.0


def parse_score(text: str, pattern: re.Pattern = SCORE_RE) -> int | None:
    """First standalone integer in [1, 100] in the reply, or None."""
    match = pattern.search(text)
    return int(match.group(1)) if match else None


def _execution_output(candidate: GeneratedCandidate) -> str:
    ex = candidate.execution
    if ex is None:
        return "(not executed)"
    parts = [ex.stdout.strip() or "(no output)"]
    if ex.timed_out:
        parts.append("(execution timed out)")
    elif ex.status != 0:
        parts.append(f"(exited with status {ex.status})")
    if ex.stderr.strip():
        parts.append(f"stderr:\n{ex.stderr.strip()}")
    return "\n".join(parts)


def _build_score_messages(template: str, problem: ProblemInstance,
                          candidate: GeneratedCandidate,
                          ground_truth: str | None = None) -> list[dict]:
    system, _, user = template.partition("\n---\n")
    fields = {
        "description": problem.description,
        "model_text": candidate.raw_text,
        "execution_output": _execution_output(candidate),
    }
    if ground_truth is not None:
        fields["ground_truth"] = ground_truth
    return [
        {"role": "system", "content": system.strip()},
        {"role": "user", "content": user.format(**fields)},
    ]


def _score_one_sample(backend: ChatBackend, messages: list[dict], seed: int) -> int | None:
    """One scoring draw; unparseable replies are retried a bounded number
    of times, then the sample is dropped."""
    for retry in range(PARSE_RETRIES):
        result = backend.chat(messages, seed=seed + 1000 * retry)
        score = parse_score(result.text)
        if score is not None:
            return score
        logger.warning("unparseable score reply (retry %d): %r", retry, result.text[:80])
    return None


def _collect_scores(problem: ProblemInstance, candidates: list[GeneratedCandidate],
                    template: str, samples: int, backend: ChatBackend,
                    parallel: int, ground_truth: str | None = None) -> list[ScoreSheet]:
    tasks = []  # (sheet index, sample seed, messages)
    sheets = [ScoreSheet(candidate_id=c.candidate_id) for c in candidates]
    for idx, cand in enumerate(candidates):
        if not cand.is_valid:
            continue  # invalid candidates keep an empty sheet -> score 0
        messages = _build_score_messages(template, problem, cand, ground_truth)
        for s in range(samples):
            tasks.append((idx, idx * samples + s, messages))
    with ThreadPoolExecutor(max_workers=max(1, parallel)) as pool:
        results = list(
            pool.map(lambda t: _score_one_sample(backend, t[2], t[1]), tasks)
        )
    for (idx, _, _), score in zip(tasks, results):
        if score is not None:
            sheets[idx].raw_scores.append(score)
    return sheets


def _rank_by_key(keys: list[float], seed: int) -> EvaluatorRanking:
    """Descending sort with random tie-breaking ('ties are broken
    randomly'): positions with equal key are ordered by a seeded shuffle."""
    rng = np.random.default_rng(seed)
    tie_key = rng.permutation(len(keys))
    order = sorted(range(len(keys)), key=lambda i: (-keys[i], tie_key[i]))
    return Ranking(tuple(order))


def score_candidates(
    problem: ProblemInstance,
    candidates: list[GeneratedCandidate],
    mode: str = "llm",
    samples: int = DEFAULT_SAMPLES,
    backend: ChatBackend | None = None,
    dist: GeneratorDistribution | None = None,
    seed: int = 0,
    parallel: int = 4,
) -> tuple[EvaluatorRanking, list[ScoreSheet]]:
    """Rank candidates by the chosen evaluator.

    `candidates` must be the deduplicated list (the ranking indexes
    positions in it).  llm mode requires executed candidates and a
    backend; genprob mode requires the generator distribution and makes no
    backend calls (its score sheets are empty).
    """
    if mode == "genprob":
        if dist is None or dist.size != len(candidates):
            raise ValueError("genprob mode needs a distribution over the candidates")
        ranking = _rank_by_key(list(dist.probs), seed)
        return ranking, [ScoreSheet(candidate_id=c.candidate_id) for c in candidates]
    if mode != "llm":
        raise ValueError(f"unknown evaluator mode {mode!r}")
    if backend is None:
        raise ValueError("llm mode needs a backend")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    template = load_prompt_template("evaluator")
    sheets = _collect_scores(problem, candidates, template, samples, backend, parallel)
    ranking = _rank_by_key([s.mean_score for s in sheets], seed)
    return ranking, sheets


def judge_candidates(
    problem: ProblemInstance,
    candidates: list[GeneratedCandidate],
    samples: int = DEFAULT_SAMPLES,
    backend: ChatBackend | None = None,
    parallel: int = 4,
) -> list[ScoreSheet]:
    """Score every candidate with the ground truth in the prompt; the final
    per-candidate score is `sheet.normalized` in [0, 1]."""
    if problem.ground_truth is None:
        raise ScoringError(f"problem {problem.id!r} has no ground truth to judge against")
    if backend is None:
        raise ValueError("judging needs a backend")
    template = load_prompt_template("judge")
    return _collect_scores(
        problem, candidates, template, samples, backend, parallel,
        ground_truth=problem.ground_truth,
    )
