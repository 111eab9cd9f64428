"""Synthetic generators, evaluators, the sweep runner and aggregation."""

import csv
import math

import numpy as np
import pytest

from optfolio.core import is_generator_aligned, Ranking
from optfolio.simlab import (
    AGGREGATE_CSV_HEADER,
    GeneratorKind,
    SimConfigError,
    SweepConfig,
    SweepRecord,
    SWEEP_CSV_HEADER,
    aggregate,
    default_alpha_grid,
    make_evaluator,
    make_generator,
    run_sweep,
    write_aggregate_csv,
    write_sweep_csv,
)

ALL_KINDS = tuple(GeneratorKind)


class TestMakeGenerator:
    def test_aligned_k4(self):
        g = make_generator(GeneratorKind.ALIGNED, 4)
        assert g.probs == pytest.approx((0.4, 0.3, 0.2, 0.1))

    def test_misaligned_k4(self):
        g = make_generator(GeneratorKind.MISALIGNED, 4)
        assert g.probs == pytest.approx((0.1, 0.2, 0.3, 0.4))

    def test_uniform_k10(self):
        g = make_generator(GeneratorKind.UNIFORM, 10)
        assert g.probs == pytest.approx((0.1,) * 10)

    @pytest.mark.parametrize("seed", range(25))
    def test_weakly_aligned_top_half_mass(self, seed):
        g = make_generator(GeneratorKind.WEAKLY_ALIGNED, 20, seed=seed)
        top = sum(g.probs[:10])
        assert 0.5 <= top < 0.99

    @pytest.mark.parametrize("kind", ALL_KINDS)
    @pytest.mark.parametrize("K", [2, 10, 100, 1000])
    def test_sum_invariant(self, kind, K):
        for seed in range(10):
            g = make_generator(kind, K, seed=seed)  # validates on construction
            assert abs(sum(g.probs) - 1.0) < 1e-9

    @pytest.mark.parametrize("K", [2, 4, 10, 50])
    def test_alignment_predicates(self, K):
        human = Ranking.identity(K)
        assert is_generator_aligned(make_generator(GeneratorKind.ALIGNED, K), human)
        assert is_generator_aligned(make_generator(GeneratorKind.UNIFORM, K), human)
        assert not is_generator_aligned(make_generator(GeneratorKind.MISALIGNED, K), human)

    def test_invalid_k(self):
        with pytest.raises(SimConfigError):
            make_generator(GeneratorKind.ALIGNED, 1)
        with pytest.raises(SimConfigError):
            make_generator(GeneratorKind.WEAKLY_ALIGNED, 9)


class TestMakeEvaluator:
    def test_identity(self):
        assert make_evaluator(0.0, 5).order == (0, 1, 2, 3, 4)

    def test_full_reversal(self):
        assert make_evaluator(1.0, 4).order == (3, 2, 1, 0)

    @pytest.mark.parametrize("epsilon", [0.3, 0.5, 0.7])
    @pytest.mark.parametrize("K", [10, 100])
    def test_exact_mismatch_fraction(self, epsilon, K):
        m = math.ceil(epsilon * K - 1e-9)
        for seed in range(10):
            order = make_evaluator(epsilon, K, seed=seed).order
            mismatches = sum(1 for i, o in enumerate(order) if i != o)
            assert mismatches == m

    def test_infeasible_epsilon(self):
        # ceil(0.1 * 10) = 1: no permutation displaces exactly one element
        with pytest.raises(SimConfigError):
            make_evaluator(0.1, 10)

    def test_determinism(self):
        a = make_evaluator(0.5, 50, seed=7)
        b = make_evaluator(0.5, 50, seed=7)
        assert a.order == b.order


class TestRunSweep:
    def test_uniform_closed_form_record(self):
        cfg = SweepConfig(K_values=(10,), kinds=(GeneratorKind.UNIFORM,),
                          epsilons=(0.0,), alphas=(0.25,), n_seeds=1)
        records = run_sweep(cfg)
        assert len(records) == 1
        assert records[0].k_star == 8
        assert records[0].coverage == 1.0

    def test_proposition2_post_hoc(self):
        cfg = SweepConfig(K_values=(4,), kinds=(GeneratorKind.ALIGNED,),
                          epsilons=(1.0,), alphas=(0.45,), n_seeds=1)
        rec = run_sweep(cfg)[0]
        assert rec.coverage > (1 - 0.9) / rec.k_star

    def test_empty_kinds_vacuous(self):
        cfg = SweepConfig(K_values=(10,), kinds=(), epsilons=(0.0,), n_seeds=1)
        assert run_sweep(cfg) == []

    def test_reproducible(self):
        cfg = SweepConfig(K_values=(10, 20), kinds=ALL_KINDS,
                          epsilons=(0.0, 0.5), alphas=(0.1, 0.3), n_seeds=5)
        assert run_sweep(cfg) == run_sweep(cfg)

    def test_infeasible_tuple_diagnostic(self):
        cfg = SweepConfig(K_values=(10,), kinds=(GeneratorKind.UNIFORM,),
                          epsilons=(0.1,), alphas=(0.3,), n_seeds=1)
        with pytest.raises(SimConfigError, match="epsilon=0.1, K=10"):
            run_sweep(cfg)

    def test_grid_extension_keeps_existing_tuples(self):
        # Adding grid points never perturbs previously computed tuples.
        small = SweepConfig(K_values=(10,), kinds=(GeneratorKind.WEAKLY_ALIGNED,),
                            epsilons=(0.5,), alphas=(0.2,), n_seeds=3)
        big = SweepConfig(K_values=(10, 20), kinds=ALL_KINDS,
                          epsilons=(0.5, 1.0), alphas=(0.2,), n_seeds=3)
        small_recs = set(run_sweep(small))
        assert small_recs.issubset(set(run_sweep(big)))


class TestAggregate:
    def _rec(self, coverage, k_star=5, seed=0):
        return SweepRecord(kind=GeneratorKind.UNIFORM, epsilon=0.0, K=10,
                           alpha=0.2, seed=seed, k_star=k_star, coverage=coverage)

    def test_zero_variance(self):
        stats = aggregate([self._rec(1.0, seed=s) for s in range(40)])
        cov = next(s for s in stats if s.metric == "coverage")
        assert (cov.mean, cov.ci_low, cov.ci_high, cov.n) == (1.0, 1.0, 1.0, 40)

    def test_hand_statistics(self):
        stats = aggregate([self._rec(0.0, seed=0), self._rec(1.0, seed=1)])
        cov = next(s for s in stats if s.metric == "coverage")
        half = 1.96 * np.std([0.0, 1.0], ddof=1) / math.sqrt(2)
        assert cov.mean == pytest.approx(0.5)
        assert cov.ci_low == pytest.approx(0.5 - half)
        assert cov.ci_high == pytest.approx(0.5 + half)

    def test_single_record_collapses(self):
        stats = aggregate([self._rec(0.75, k_star=3)])
        for s in stats:
            assert s.ci_low == s.mean == s.ci_high
            assert s.n == 1
        assert {s.metric: s.mean for s in stats} == {"coverage": 0.75, "size": 3.0}

    def test_empty_input(self):
        with pytest.raises(ValueError):
            aggregate([])


class TestCsvOutput:
    def test_sweep_round_trip_exact(self, tmp_path):
        cfg = SweepConfig(K_values=(10,), kinds=(GeneratorKind.WEAKLY_ALIGNED,),
                          epsilons=(0.5,), alphas=default_alpha_grid(0.1), n_seeds=3)
        records = run_sweep(cfg)
        path = tmp_path / "sweep.csv"
        write_sweep_csv(records, path)
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == SWEEP_CSV_HEADER
        assert len(rows) == len(records) + 1
        for row, rec in zip(rows[1:], records):
            assert row[0] == rec.kind.value
            assert float(row[1]) == rec.epsilon
            assert int(row[2]) == rec.K
            assert float(row[3]) == rec.alpha
            assert int(row[5]) == rec.k_star
            assert float(row[6]) == rec.coverage  # round-trip exact

    def test_aggregate_round_trip(self, tmp_path):
        cfg = SweepConfig(K_values=(10,), kinds=(GeneratorKind.UNIFORM,),
                          epsilons=(0.0,), alphas=(0.25, 0.5), n_seeds=4)
        stats = aggregate(run_sweep(cfg))
        path = tmp_path / "agg.csv"
        write_aggregate_csv(stats, path)
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == AGGREGATE_CSV_HEADER
        for row, stat in zip(rows[1:], stats):
            assert row[4] in ("coverage", "size")
            assert float(row[5]) == stat.mean
            assert stat.ci_low <= stat.mean <= stat.ci_high


def test_default_alpha_grid():
    grid = default_alpha_grid(0.02)
    assert grid[0] == pytest.approx(0.02)
    assert grid[-1] == pytest.approx(0.98)
    assert len(grid) == 49
    assert all(0 < a < 1 for a in grid)
