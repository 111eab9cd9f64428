"""Cache-backed pipeline stages.

Each stage fingerprints its inputs; a cache hit skips all work (and all
backend traffic).  Rankings and score sheets index positions in the
deduplicated candidate list, which is reconstructed deterministically
from the cached generation stage.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import EvaluatorRanking, GeneratorDistribution, Ranking
from .backend import ChatBackend
from .cache import RunCache, content_hash
from .candidates import GeneratedCandidate, dedupe_candidates, derive_distribution, generate_candidates
from .dataset import ProblemInstance
from .runner import ExecutionResult, RunnerConfig, execute_candidate
from .scoring import ScoreSheet, judge_candidates, score_candidates

STAGE_GENERATE = "generate"
STAGE_EXECUTE = "execute"
STAGE_JUDGE = "judge"
RANKING_RECORD_ID = -1  # pseudo candidate id holding the ranking order


def evaluate_stage_name(mode: str) -> str:
    return f"evaluate_{mode}"


@dataclass
class ProblemState:
    """Deduplicated view of one problem's cached pipeline results."""
    problem: ProblemInstance
    candidates: list[GeneratedCandidate]  # deduplicated, position-indexed
    dist: GeneratorDistribution


def run_generate(cache: RunCache, problem: ProblemInstance, n: int,
                 backend: ChatBackend, fingerprint: str) -> bool:
    """Returns True if work was done, False on cache hit."""
    stage_hash = content_hash(STAGE_GENERATE, problem.id, n, fingerprint)
    if cache.has_stage(problem.id, STAGE_GENERATE, stage_hash):
        return False
    candidates = generate_candidates(problem, n, backend)
    payloads = {
        c.candidate_id: {
            "raw_text": c.raw_text,
            "token_logprobs": c.token_logprobs,
            "seq_score": c.seq_score,
            "is_valid": c.is_valid,
            "code": c.code,
        }
        for c in candidates
    }
    cache.put_stage(problem.id, STAGE_GENERATE, stage_hash, payloads)
    return True


def load_state(cache: RunCache, problem: ProblemInstance) -> ProblemState:
    recs = cache.stage_records(problem.id, STAGE_GENERATE)
    if not recs:
        raise KeyError(f"no generated candidates cached for problem {problem.id!r}")
    raw = [
        GeneratedCandidate(
            candidate_id=cid,
            raw_text=p["raw_text"],
            token_logprobs=list(p["token_logprobs"]),
            seq_score=p["seq_score"],
            is_valid=p["is_valid"],
            code=p.get("code", ""),
        )
        for cid, p in recs.items()
    ]
    unique = dedupe_candidates(raw)
    dist = derive_distribution(raw)
    exec_recs = cache.stage_records(problem.id, STAGE_EXECUTE)
    for cand in unique:
        if cand.candidate_id in exec_recs:
            p = exec_recs[cand.candidate_id]
            cand.execution = ExecutionResult(
                status=p["status"], stdout=p["stdout"], stderr=p["stderr"],
                wall_time=0.0, timed_out=p["timed_out"],
            )
    return ProblemState(problem=problem, candidates=unique, dist=dist)


def run_execute(cache: RunCache, state: ProblemState,
                config: RunnerConfig | None = None) -> bool:
    config = config or RunnerConfig()
    gen_hash = content_hash(
        [(c.candidate_id, c.code) for c in state.candidates if c.is_valid]
    )
    stage_hash = content_hash(STAGE_EXECUTE, state.problem.id, gen_hash,
                              config.interpreter, config.timeout)
    if cache.has_stage(state.problem.id, STAGE_EXECUTE, stage_hash):
        return False
    payloads = {}
    for cand in state.candidates:
        if not cand.is_valid:
            continue
        result = execute_candidate(cand, config)
        cand.execution = result
        # wall_time deliberately left out so cache bytes are reproducible
        payloads[cand.candidate_id] = {
            "status": result.status,
            "stdout": result.stdout,
            "stderr": result.stderr,
            "timed_out": result.timed_out,
        }
    cache.put_stage(state.problem.id, STAGE_EXECUTE, stage_hash, payloads)
    return True


def run_evaluate(cache: RunCache, state: ProblemState, mode: str, samples: int,
                 backend: ChatBackend | None, fingerprint: str, seed: int,
                 parallel: int = 4) -> bool:
    stage = evaluate_stage_name(mode)
    stage_hash = content_hash(stage, state.problem.id, mode, samples, fingerprint, seed)
    if cache.has_stage(state.problem.id, stage, stage_hash):
        return False
    ranking, sheets = score_candidates(
        state.problem, state.candidates, mode=mode, samples=samples,
        backend=backend, dist=state.dist, seed=seed, parallel=parallel,
    )
    payloads: dict[int, dict] = {
        RANKING_RECORD_ID: {"order": list(ranking.order)},
    }
    for pos, sheet in enumerate(sheets):
        payloads[pos] = {
            "candidate_id": sheet.candidate_id,
            "raw_scores": sheet.raw_scores,
            "mean_score": sheet.mean_score,
        }
    cache.put_stage(state.problem.id, stage, stage_hash, payloads)
    return True


def run_judge(cache: RunCache, state: ProblemState, samples: int,
              backend: ChatBackend, fingerprint: str, parallel: int = 4) -> bool:
    stage_hash = content_hash(STAGE_JUDGE, state.problem.id, samples, fingerprint)
    if cache.has_stage(state.problem.id, STAGE_JUDGE, stage_hash):
        return False
    sheets = judge_candidates(state.problem, state.candidates, samples=samples,
                              backend=backend, parallel=parallel)
    payloads = {
        pos: {
            "candidate_id": sheet.candidate_id,
            "raw_scores": sheet.raw_scores,
            "mean_score": sheet.mean_score,
            "normalized": sheet.normalized,
        }
        for pos, sheet in enumerate(sheets)
    }
    cache.put_stage(state.problem.id, STAGE_JUDGE, stage_hash, payloads)
    return True


def load_ranking(cache: RunCache, problem_id: str, mode: str) -> EvaluatorRanking:
    recs = cache.stage_records(problem_id, evaluate_stage_name(mode))
    if RANKING_RECORD_ID not in recs:
        raise KeyError(
            f"no {mode} evaluation cached for problem {problem_id!r}"
        )
    return Ranking(tuple(recs[RANKING_RECORD_ID]["order"]))


def load_score_sheets(cache: RunCache, problem_id: str, mode: str) -> dict[int, ScoreSheet]:
    recs = cache.stage_records(problem_id, evaluate_stage_name(mode))
    return {
        pos: ScoreSheet(candidate_id=p["candidate_id"], raw_scores=list(p["raw_scores"]))
        for pos, p in recs.items() if pos != RANKING_RECORD_ID
    }


def load_judge_scores(cache: RunCache, problem_id: str) -> dict[int, float]:
    """Normalized judge score in [0, 1] per deduplicated position."""
    recs = cache.stage_records(problem_id, STAGE_JUDGE)
    if not recs:
        raise KeyError(f"no judge scores cached for problem {problem_id!r}")
    return {pos: p["normalized"] for pos, p in recs.items()}
