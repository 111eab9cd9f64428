"""Real-data pipeline: sample candidate optimization models from an LLM
backend, derive the generator distribution from token log-probabilities,
score with an LLM evaluator (or the generator probabilities), execute
candidate code, and judge against ground truth."""

from .backend import BackendConfig, BackendError, ChatBackend, HTTPBackend, MissingLogprobsError
from .candidates import (
    GeneratedCandidate,
    dedupe_candidates,
    derive_distribution,
    generate_candidates,
    seq_score_from_logprobs,
)
from .dataset import DatasetError, ProblemInstance, load_dataset
from .mock import MockBackend
from .runner import ExecutionResult, RunnerConfig, execute_candidate
from .scoring import ScoreSheet, judge_candidates, score_candidates
from .cache import RunCache

__all__ = [
    "BackendConfig", "BackendError", "ChatBackend", "HTTPBackend",
    "MissingLogprobsError", "GeneratedCandidate", "dedupe_candidates",
    "derive_distribution", "generate_candidates", "seq_score_from_logprobs",
    "DatasetError", "ProblemInstance", "load_dataset", "MockBackend",
    "ExecutionResult", "RunnerConfig", "execute_candidate",
    "ScoreSheet", "judge_candidates", "score_candidates", "RunCache",
]
