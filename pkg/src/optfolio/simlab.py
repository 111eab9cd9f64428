"""Simulated generators and evaluators at controlled alignment levels,
plus the alpha/seed/K sweep runner and aggregate statistics.

Candidates are indexed 0..K-1 in ground-truth rank order, i.e. the
reference ranking is always the identity permutation.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import (
    EvaluatorRanking,
    GeneratorDistribution,
    HumanRanking,
    Ranking,
    build_portfolio,
    coverage,
)

Z_95 = 1.96

SWEEP_CSV_HEADER = ["generator", "epsilon", "K", "alpha", "seed", "k_star", "coverage"]
AGGREGATE_CSV_HEADER = [
    "generator", "epsilon", "K", "alpha", "metric", "mean", "ci_low", "ci_high", "n",
]


class SimConfigError(ValueError):
    """Invalid generator/evaluator/sweep configuration."""


class GeneratorKind(str, Enum):
    ALIGNED = "aligned"
    WEAKLY_ALIGNED = "weakly_aligned"
    UNIFORM = "uniform"
    MISALIGNED = "misaligned"


def make_generator(kind: GeneratorKind, K: int, seed: int = 0) -> GeneratorDistribution:
    """Build one of the four synthetic generator distributions.

    Candidate i (0-based) sits at ground-truth rank i+1:
      - aligned:  p proportional to K - i, strictly decreasing in rank.
      - weakly_aligned:  the top half gets a total mass M drawn uniformly
        from [0.5, 0.99); within each half mass is split by normalized
        uniform draws (requires even K).
      - uniform:  p = 1/K.
      - misaligned:  p proportional to i + 1, strictly increasing in rank.
    """
    kind = GeneratorKind(kind)
    if K < 2:
        raise SimConfigError(f"K must be >= 2, got {K}")
    if kind is GeneratorKind.ALIGNED:
        w = np.arange(K, 0, -1, dtype=np.float64)
        p = w / w.sum()
    elif kind is GeneratorKind.MISALIGNED:
        w = np.arange(1, K + 1, dtype=np.float64)
        p = w / w.sum()
    elif kind is GeneratorKind.UNIFORM:
        p = np.full(K, 1.0 / K)
    else:
        if K % 2 != 0:
            raise SimConfigError(f"weakly_aligned requires even K, got {K}")
        rng = np.random.default_rng(seed)
        top_mass = rng.uniform(0.5, 0.99)
        half = K // 2
        top = rng.random(half)
        bottom = rng.random(half)
        p = np.concatenate(
            [top / top.sum() * top_mass, bottom / bottom.sum() * (1.0 - top_mass)]
        )
    return GeneratorDistribution(tuple(p))


def _mismatch_count(epsilon: float, K: int) -> int:
    # Guard against float noise like 0.3 * 100 = 30.000000000000004.
    return max(0, math.ceil(epsilon * K - 1e-9))


def make_evaluator(epsilon: float, K: int, seed: int = 0) -> EvaluatorRanking:
    """Build a ranking that disagrees with the identity reference ranking
    on exactly ceil(epsilon * K) positions.

    epsilon = 0 is the identity; epsilon = 1 is the full reversal
    (position i holds candidate K-1-i).  Intermediate epsilon picks the
    misranked positions uniformly at random and applies a uniformly random
    derangement to them, so every chosen position is displaced.
    """
    if K < 2:
        raise SimConfigError(f"K must be >= 2, got {K}")
    if not 0.0 <= epsilon <= 1.0:
        raise SimConfigError(f"epsilon must be in [0, 1], got {epsilon}")
    if epsilon == 0.0:
        return Ranking.identity(K)
    if epsilon == 1.0:
        return Ranking(tuple(range(K - 1, -1, -1)))
    m = _mismatch_count(epsilon, K)
    if m == 0:
        return Ranking.identity(K)
    if m == 1:
        raise SimConfigError(
            f"epsilon={epsilon} with K={K} requires exactly one misranked "
            "position, which no permutation realizes"
        )
    rng = np.random.default_rng(seed)
    positions = np.sort(rng.choice(K, size=m, replace=False))
    while True:
        perm = rng.permutation(m)
        if not np.any(perm == np.arange(m)):
            break
    order = np.arange(K)
    order[positions] = positions[perm]
    return Ranking(tuple(order))


def default_alpha_grid(step: float = 0.02) -> tuple[float, ...]:
    """Open-interval grid {step, 2*step, ...} strictly inside (0, 1)."""
    if step <= 0:
        raise SimConfigError(f"step must be positive, got {step}")
    n = int(round(1.0 / step))
    grid = [round(i * step, 10) for i in range(1, n)]
    return tuple(a for a in grid if 0.0 < a < 1.0)


@dataclass(frozen=True)
class SweepConfig:
    K_values: tuple[int, ...]
    kinds: tuple[GeneratorKind, ...]
    epsilons: tuple[float, ...]
    alphas: tuple[float, ...] = field(default_factory=default_alpha_grid)
    n_seeds: int = 40

    def __post_init__(self):
        if any(k < 2 for k in self.K_values):
            raise SimConfigError("all K values must be >= 2")
        if self.n_seeds < 1:
            raise SimConfigError("need at least one seed")
        if any(not 0.0 < a < 1.0 for a in self.alphas):
            raise SimConfigError("alphas must lie in (0, 1)")


@dataclass(frozen=True)
class SweepRecord:
    kind: GeneratorKind
    epsilon: float
    K: int
    alpha: float
    seed: int
    k_star: int
    coverage: float


@dataclass(frozen=True)
class AggregateStat:
    kind: GeneratorKind
    epsilon: float
    K: int
    alpha: float
    metric: str  # "coverage" or "size"
    mean: float
    ci_low: float
    ci_high: float
    n: int


def _tuple_seed(kind: GeneratorKind, epsilon: float, K: int, seed: int, stage: str) -> int:
    """Stable per-tuple seed so extending the grid never perturbs existing
    tuples; independent of the process hash seed."""
    key = f"{kind.value}|{float(epsilon)!r}|{K}|{seed}|{stage}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Run every (kind, epsilon, K, seed) tuple over the alpha grid and
    record portfolio size and coverage against the identity ranking.

    Deterministic given the config; tuples are independent, so the loop
    order is just the canonical output order.
    """
    records: list[SweepRecord] = []
    for kind in config.kinds:
        for epsilon in config.epsilons:
            for K in config.K_values:
                human = Ranking.identity(K)
                for seed in range(config.n_seeds):
                    try:
                        gen = make_generator(
                            kind, K, _tuple_seed(kind, epsilon, K, seed, "gen")
                        )
                        ev = make_evaluator(
                            epsilon, K, _tuple_seed(kind, epsilon, K, seed, "eval")
                        )
                    except SimConfigError as exc:
                        raise SimConfigError(
                            f"infeasible sweep tuple (kind={kind.value}, "
                            f"epsilon={epsilon}, K={K}, seed={seed}): {exc}"
                        ) from exc
                    for alpha in config.alphas:
                        pf = build_portfolio(ev, gen, alpha)
                        records.append(
                            SweepRecord(
                                kind=kind,
                                epsilon=float(epsilon),
                                K=K,
                                alpha=float(alpha),
                                seed=seed,
                                k_star=pf.k_star,
                                coverage=coverage(pf, human),
                            )
                        )
    return records


def aggregate(records: list[SweepRecord]) -> list[AggregateStat]:
    """Group by (kind, epsilon, K, alpha) and emit mean and 95% normal
    approximation CI for coverage and portfolio size."""
    if not records:
        raise ValueError("no records to aggregate")
    groups: dict[tuple, list[SweepRecord]] = {}
    for rec in records:
        groups.setdefault((rec.kind, rec.epsilon, rec.K, rec.alpha), []).append(rec)
    stats: list[AggregateStat] = []
    for (kind, epsilon, K, alpha), recs in groups.items():
        for metric, values in (
            ("coverage", [r.coverage for r in recs]),
            ("size", [float(r.k_star) for r in recs]),
        ):
            arr = np.asarray(values)
            n = len(arr)
            mean = float(arr.mean())
            sd = float(arr.std(ddof=1)) if n > 1 else 0.0
            half = Z_95 * sd / math.sqrt(n)
            stats.append(
                AggregateStat(
                    kind=kind,
                    epsilon=epsilon,
                    K=K,
                    alpha=alpha,
                    metric=metric,
                    mean=mean,
                    ci_low=mean - half,
                    ci_high=mean + half,
                    n=n,
                )
            )
    return stats


def write_sweep_csv(records: list[SweepRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_CSV_HEADER)
        for r in records:
            writer.writerow(
                [r.kind.value, repr(r.epsilon), r.K, repr(r.alpha), r.seed,
                 r.k_star, repr(r.coverage)]
            )


def write_aggregate_csv(stats: list[AggregateStat], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGGREGATE_CSV_HEADER)
        for s in stats:
            writer.writerow(
                [s.kind.value, repr(s.epsilon), s.K, repr(s.alpha), s.metric,
                 repr(s.mean), repr(s.ci_low), repr(s.ci_high), s.n]
            )
