"""Portfolio construction, coverage and the theorem predicates."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optfolio.core import (
    DomainMismatchError,
    GeneratorDistribution,
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


def brute_force_k_star(order, probs, alpha, tol=1e-12):
    """Independent oracle: scan prefixes until the mass reaches 1 - alpha."""
    total = 0.0
    for k, idx in enumerate(order, start=1):
        total = math.fsum(probs[i] for i in order[:k])
        if total >= 1.0 - alpha - tol:
            return k
    return len(order)


def random_distribution(rng, k):
    w = rng.random(k) + 1e-9
    return GeneratorDistribution(tuple(w / w.sum()))


# ---------------------------------------------------------------------------
# examples


class TestBuildPortfolio:
    def test_hand_computed_prefix(self):
        # prefix sums 0.4, 0.7 < 0.75, 0.9 >= 0.75
        dist = GeneratorDistribution((0.4, 0.3, 0.2, 0.1))
        pf = build_portfolio(Ranking((0, 1, 2, 3)), dist, alpha=0.25)
        assert pf.members == (0, 1, 2)
        assert pf.k_star == 3
        assert pf.cumulative_mass == pytest.approx(0.9)

    @pytest.mark.parametrize("alpha", [0.01, 0.25, 0.5, 0.99])
    def test_full_mass_on_top_rank(self, alpha):
        dist = GeneratorDistribution((1.0, 0.0))
        pf = build_portfolio(Ranking((0, 1)), dist, alpha=alpha)
        assert pf.members == (0,)
        assert pf.k_star == 1

    def test_uniform_closed_form(self):
        dist = GeneratorDistribution((0.1,) * 10)
        pf = build_portfolio(Ranking.identity(10), dist, alpha=0.25)
        assert pf.k_star == 8  # ceil((1 - 0.25) * 10)

    def test_invalid_alpha(self):
        dist = GeneratorDistribution((0.5, 0.5))
        for alpha in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(InvalidAlphaError):
                build_portfolio(Ranking((0, 1)), dist, alpha=alpha)

    def test_domain_mismatch(self):
        dist = GeneratorDistribution((0.5, 0.5))
        with pytest.raises(DomainMismatchError):
            build_portfolio(Ranking((0, 1, 2)), dist, alpha=0.5)

    def test_invalid_distribution(self):
        with pytest.raises(InvalidDistributionError):
            GeneratorDistribution((0.3, 0.3))
        with pytest.raises(InvalidDistributionError):
            GeneratorDistribution((1.2, -0.2))


class TestCoverage:
    def test_identical_top_two(self):
        pf = Portfolio(members=(0, 1), k_star=2, alpha=0.2,
                       cumulative_mass=0.9, universe_size=4)
        assert coverage(pf, Ranking((0, 1, 2, 3))) == 1.0

    def test_one_of_two_matches(self):
        pf = Portfolio(members=(0, 2), k_star=2, alpha=0.2,
                       cumulative_mass=0.9, universe_size=4)
        assert coverage(pf, Ranking((0, 1, 2, 3))) == 0.5

    def test_full_reversal_uniform(self):
        dist = GeneratorDistribution((0.25,) * 4)
        pf = build_portfolio(Ranking((3, 2, 1, 0)), dist, alpha=0.4)
        assert pf.k_star == 3
        assert pf.members == (3, 2, 1)
        assert coverage(pf, Ranking.identity(4)) == pytest.approx(2 / 3)

    def test_domain_mismatch(self):
        pf = Portfolio(members=(0,), k_star=1, alpha=0.2,
                       cumulative_mass=1.0, universe_size=2)
        with pytest.raises(DomainMismatchError):
            coverage(pf, Ranking((0, 1, 2)))


class TestProposition2Bound:
    def test_direct_substitution(self):
        pf = Portfolio(members=(0, 1, 2), k_star=3, alpha=0.25,
                       cumulative_mass=0.9, universe_size=4)
        assert proposition2_bound(pf) == pytest.approx((1 - 0.5) / 3)

    def test_singleton_small_alpha(self):
        pf = Portfolio(members=(0,), k_star=1, alpha=1e-9,
                       cumulative_mass=1.0, universe_size=2)
        assert proposition2_bound(pf) == pytest.approx(1.0)

    def test_large_portfolio(self):
        pf = Portfolio(members=tuple(range(10)), k_star=10, alpha=0.4,
                       cumulative_mass=0.7, universe_size=20)
        assert proposition2_bound(pf) == pytest.approx(0.02)

    def test_alpha_out_of_range(self):
        pf = Portfolio(members=(0,), k_star=1, alpha=0.5,
                       cumulative_mass=1.0, universe_size=2)
        with pytest.raises(PortfolioError):
            proposition2_bound(pf)


class TestAlignmentPredicates:
    def test_aligned_distribution(self):
        dist = GeneratorDistribution((0.4, 0.3, 0.2, 0.1))
        assert is_generator_aligned(dist, Ranking.identity(4))

    def test_uniform_is_aligned(self):
        dist = GeneratorDistribution((0.25,) * 4)
        assert is_generator_aligned(dist, Ranking.identity(4))

    def test_misaligned_distribution(self):
        dist = GeneratorDistribution((0.1, 0.2, 0.3, 0.4))
        assert not is_generator_aligned(dist, Ranking.identity(4))

    def test_evaluator_alignment(self):
        assert is_evaluator_aligned(Ranking((2, 0, 1)), Ranking((2, 0, 1)))
        assert not is_evaluator_aligned(Ranking((3, 2, 1, 0)), Ranking.identity(4))
        swapped = list(range(10))
        swapped[4], swapped[5] = swapped[5], swapped[4]
        assert not is_evaluator_aligned(Ranking(tuple(swapped)), Ranking.identity(10))

    def test_domain_mismatch(self):
        with pytest.raises(DomainMismatchError):
            is_generator_aligned(GeneratorDistribution((1.0,)), Ranking((0, 1)))
        with pytest.raises(DomainMismatchError):
            is_evaluator_aligned(Ranking((0,)), Ranking((0, 1)))


# ---------------------------------------------------------------------------
# properties


def dist_strategy(k):
    return st.lists(
        st.floats(min_value=1e-6, max_value=1.0), min_size=k, max_size=k
    ).map(lambda w: GeneratorDistribution(tuple(x / sum(w) for x in w)))


@st.composite
def portfolio_inputs(draw, max_k=8):
    k = draw(st.integers(min_value=1, max_value=max_k))
    dist = draw(dist_strategy(k))
    order = tuple(draw(st.permutations(range(k))))
    alpha = draw(st.floats(min_value=1e-3, max_value=0.999))
    return Ranking(order), dist, alpha


class TestPortfolioProperties:
    @given(portfolio_inputs())
    def test_prefix_and_minimality(self, inputs):
        ranking, dist, alpha = inputs
        pf = build_portfolio(ranking, dist, alpha)
        assert pf.members == ranking.order[: pf.k_star]
        assert pf.cumulative_mass >= 1 - alpha - 1e-12
        if pf.k_star > 1:
            below = math.fsum(dist.probs[i] for i in pf.members[:-1])
            assert below < 1 - alpha - 1e-12

    @given(portfolio_inputs(), st.floats(min_value=1e-3, max_value=0.999))
    def test_monotone_in_alpha(self, inputs, alpha2):
        ranking, dist, alpha1 = inputs
        lo, hi = sorted((alpha1, alpha2))
        pf_lo = build_portfolio(ranking, dist, lo)
        pf_hi = build_portfolio(ranking, dist, hi)
        assert pf_lo.k_star >= pf_hi.k_star
        assert pf_lo.members[: pf_hi.k_star] == pf_hi.members

    @given(portfolio_inputs())
    def test_brute_force_oracle(self, inputs):
        ranking, dist, alpha = inputs
        pf = build_portfolio(ranking, dist, alpha)
        assert pf.k_star == brute_force_k_star(ranking.order, dist.probs, alpha)

    @given(st.integers(min_value=1, max_value=8).flatmap(
        lambda k: st.tuples(st.just(k), dist_strategy(k),
                            st.permutations(range(k)),
                            st.floats(min_value=1e-3, max_value=0.999))))
    def test_corollary1_aligned_evaluator(self, args):
        # Aligned evaluator: ranking equals the human ranking, so coverage
        # is exactly 1 for any generator and any alpha.
        k, dist, human_order, alpha = args
        human = Ranking(tuple(human_order))
        pf = build_portfolio(human, dist, alpha)
        assert coverage(pf, human) == 1.0

    @given(st.integers(min_value=1, max_value=8).flatmap(
        lambda k: st.tuples(st.just(k), dist_strategy(k),
                            st.permutations(range(k)),
                            st.floats(min_value=1e-3, max_value=0.499))))
    @settings(max_examples=200)
    def test_proposition2_aligned_generator(self, args):
        # Aligned generator: sort the probabilities so they are
        # non-increasing along the identity human ranking; any evaluator.
        k, dist, ev_order, alpha = args
        probs = tuple(sorted(dist.probs, reverse=True))
        dist = GeneratorDistribution(probs)
        human = Ranking.identity(k)
        assert is_generator_aligned(dist, human)
        pf = build_portfolio(Ranking(tuple(ev_order)), dist, alpha)
        assert coverage(pf, human) > proposition2_bound(pf)

    def test_degenerate_single_candidate(self):
        pf = build_portfolio(Ranking((0,)), GeneratorDistribution((1.0,)), 0.3)
        assert coverage(pf, Ranking((0,))) == 1.0

    def test_zero_probability_member_enters_by_rank(self):
        dist = GeneratorDistribution((0.0, 1.0))
        pf = build_portfolio(Ranking((0, 1)), dist, alpha=0.3)
        assert pf.members == (0, 1)
