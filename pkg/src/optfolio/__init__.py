"""Robust portfolios of LLM-generated optimization models."""

from .core import (
    DomainMismatchError,
    EvaluatorRanking,
    GeneratorDistribution,
    HumanRanking,
    InvalidAlphaError,
    InvalidDistributionError,
    Portfolio,
    PortfolioError,
    Ranking,
    build_portfolio,
    coverage,
    is_evaluator_aligned,
    is_generator_aligned,
    proposition2_bound,
)

__version__ = "0.1.0"

__all__ = [
    "DomainMismatchError", "EvaluatorRanking", "GeneratorDistribution",
    "HumanRanking", "InvalidAlphaError", "InvalidDistributionError",
    "Portfolio", "PortfolioError", "Ranking", "build_portfolio", "coverage",
    "is_evaluator_aligned", "is_generator_aligned", "proposition2_bound",
]
