"""Portfolio construction over a ranked candidate set.

A stochastic generator induces a probability distribution over a finite
set of candidates, and an evaluator induces a total order over the same
set.  The portfolio is the shortest ranking prefix whose cumulative
probability reaches a user-chosen threshold 1 - alpha.  Coverage measures
how much of the (ground truth) top-k the portfolio captures, and two
checkable predicates characterize when the generator or evaluator agrees
with the ground-truth ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Absolute tolerance on cumulative sums when comparing against 1 - alpha,
# so the portfolio size is stable under summation-order noise.
CUMSUM_TOL = 1e-12

# Tolerance on the distribution sum-to-one invariant.
PROB_SUM_TOL = 1e-9


class PortfolioError(ValueError):
    """Base class for portfolio construction errors."""


class DomainMismatchError(PortfolioError):
    """Ranking and distribution index different candidate sets."""


class InvalidAlphaError(PortfolioError):
    """alpha outside the open interval (0, 1)."""


class InvalidDistributionError(PortfolioError):
    """Probabilities negative or not summing to one."""


@dataclass(frozen=True)
class GeneratorDistribution:
    """Probability distribution over candidates 0..K-1."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 1:
            raise InvalidDistributionError("empty distribution")
        if any(p < 0 for p in probs):
            raise InvalidDistributionError("negative probability")
        total = float(np.sum(probs))
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise InvalidDistributionError(
                f"probabilities sum to {total!r}, expected 1 within {PROB_SUM_TOL}"
            )

    @property
    def size(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=np.float64)


@dataclass(frozen=True)
class Ranking:
    """A total order over candidates 0..K-1; position i holds the rank-(i+1)
    candidate and lower rank is better.

    Used both for evaluator rankings and for the reference (human) ranking.
    """

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        object.__setattr__(self, "order", order)
        k = len(order)
        if k < 1 or sorted(order) != list(range(k)):
            raise PortfolioError(f"order is not a permutation of 0..{k - 1}")

    @property
    def size(self) -> int:
        return len(self.order)

    @classmethod
    def identity(cls, k: int) -> "Ranking":
        return cls(tuple(range(k)))


# The evaluator and human rankings share one representation.
EvaluatorRanking = Ranking
HumanRanking = Ranking


@dataclass(frozen=True)
class Portfolio:
    """Shortest ranking prefix with cumulative probability >= 1 - alpha."""

    members: tuple[int, ...]
    k_star: int
    alpha: float
    cumulative_mass: float
    universe_size: int = field(default=0)

    def __post_init__(self):
        if self.k_star != len(self.members) or self.k_star < 1:
            raise PortfolioError("k_star must equal the member count and be >= 1")


def build_portfolio(
    ranking: EvaluatorRanking, dist: GeneratorDistribution, alpha: float
) -> Portfolio:
    """Construct the minimal ranking prefix whose mass reaches 1 - alpha.

    The prefix always exists because the distribution sums to 1 > 1 - alpha,
    so the result size is at most the candidate count.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidAlphaError(f"alpha must be in (0, 1), got {alpha!r}")
    if ranking.size != dist.size:
        raise DomainMismatchError(
            f"ranking covers {ranking.size} candidates, distribution {dist.size}"
        )
    csum = np.cumsum(dist.as_array()[list(ranking.order)])
    k = int(np.searchsorted(csum, 1.0 - alpha - CUMSUM_TOL, side="left")) + 1
    k = min(k, ranking.size)
    return Portfolio(
        members=ranking.order[:k],
        k_star=k,
        alpha=float(alpha),
        cumulative_mass=float(csum[k - 1]),
        universe_size=ranking.size,
    )


def coverage(portfolio: Portfolio, human: HumanRanking) -> float:
    """Fraction of the human top-k_star contained in the portfolio."""
    if portfolio.universe_size != human.size:
        raise DomainMismatchError(
            f"portfolio built over {portfolio.universe_size} candidates, "
            f"human ranking covers {human.size}"
        )
    k = portfolio.k_star
    top = set(human.order[:k])
    return len(top.intersection(portfolio.members)) / k


def proposition2_bound(portfolio: Portfolio) -> float:
    """Strict lower bound (1 - 2*alpha) / k_star on coverage under an
    aligned generator; only meaningful for alpha < 1/2."""
    if portfolio.alpha >= 0.5:
        raise PortfolioError(
            f"bound requires alpha < 1/2, got {portfolio.alpha!r}"
        )
    return (1.0 - 2.0 * portfolio.alpha) / portfolio.k_star


def is_generator_aligned(
    dist: GeneratorDistribution, human: HumanRanking, tol: float = CUMSUM_TOL
) -> bool:
    """True iff probability is non-increasing along the human ranking."""
    if dist.size != human.size:
        raise DomainMismatchError(
            f"distribution covers {dist.size} candidates, human ranking {human.size}"
        )
    p = dist.as_array()[list(human.order)]
    return bool(np.all(np.diff(p) <= tol))


def is_evaluator_aligned(ranking: EvaluatorRanking, human: HumanRanking) -> bool:
    """True iff the evaluator ranking equals the human ranking exactly."""
    if ranking.size != human.size:
        raise DomainMismatchError(
            f"evaluator covers {ranking.size} candidates, human ranking {human.size}"
        )
    return ranking.order == human.order
