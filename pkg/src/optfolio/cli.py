"""Command-line orchestration: synthetic sweeps, the generate/evaluate/
judge pipeline, portfolio construction with the human review report, and
the random-baseline comparison report."""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import click
import numpy as np

from . import core, simlab
from .pipeline import (
    BackendConfig,
    HTTPBackend,
    MockBackend,
    RunCache,
    RunnerConfig,
    load_dataset,
)
from .pipeline import stages
from .pipeline.cache import content_hash
from .pipeline.mock import serve_mock

TOY_DATASET = Path(__file__).resolve().parent / "data" / "toy_problems.jsonl"
REPORT_CSV_HEADER = ["problem_id", "method", "size", "draw", "min_judge_score"]
EVAL_MODES = ("llm", "genprob")


def _parse_list(value: str, conv):
    return tuple(conv(part) for part in value.split(",") if part.strip())


def _make_backend(mock: bool, base_url: str, model: str, temperature: float):
    """Returns (backend, fingerprint); fingerprint keys the run cache."""
    if mock:
        problems = load_dataset(TOY_DATASET)
        return MockBackend(problems), "mock"
    config = BackendConfig(base_url=base_url, model=model, temperature=temperature)
    return HTTPBackend(config), f"{base_url}|{model}|{temperature!r}"


@click.group()
def main():
    """Robust portfolios of LLM-generated optimization models."""


# ---------------------------------------------------------------------------
# simulate


@main.command()
@click.option("--K", "k_values", default="100", show_default=True,
              help="Comma-separated candidate-set sizes.")
@click.option("--generators", default="aligned,weakly_aligned,uniform,misaligned",
              show_default=True, help="Comma-separated generator kinds.")
@click.option("--eps", default="0,0.3,0.5,0.7,1", show_default=True,
              help="Comma-separated evaluator error fractions.")
@click.option("--seeds", default=40, show_default=True, help="Number of seeds.")
@click.option("--alpha-step", default=0.02, show_default=True)
@click.option("--alphas", default=None, help="Explicit comma-separated alpha values "
              "(overrides --alpha-step).")
@click.option("--out", required=True, type=click.Path(), help="Sweep CSV path.")
@click.option("--agg-out", type=click.Path(), default=None,
              help="Aggregate CSV path (defaults to <out> with .agg.csv suffix).")
def simulate(k_values, generators, eps, seeds, alpha_step, alphas, out, agg_out):
    """Run the synthetic alpha/seed/K sweep and write sweep + aggregate CSVs."""
    try:
        config = simlab.SweepConfig(
            K_values=_parse_list(k_values, int),
            kinds=tuple(simlab.GeneratorKind(g) for g in _parse_list(generators, str)),
            epsilons=_parse_list(eps, float),
            alphas=(_parse_list(alphas, float) if alphas
                    else simlab.default_alpha_grid(alpha_step)),
            n_seeds=seeds,
        )
        records = simlab.run_sweep(config)
    except (ValueError, simlab.SimConfigError) as exc:
        raise click.ClickException(str(exc))
    if not records:
        raise click.ClickException("sweep produced no records")
    simlab.write_sweep_csv(records, out)
    agg_out = agg_out or str(Path(out).with_suffix(".agg.csv"))
    simlab.write_aggregate_csv(simlab.aggregate(records), agg_out)

    cor1 = sum(1 for r in records if r.epsilon == 0.0 and r.coverage != 1.0)
    prop2 = sum(
        1 for r in records
        if r.kind is simlab.GeneratorKind.ALIGNED and r.alpha < 0.5
        and r.coverage <= (1.0 - 2.0 * r.alpha) / r.k_star
    )
    click.echo(f"wrote {len(records)} records to {out}; aggregates to {agg_out}")
    click.echo(f"theorem checks: evaluator-aligned coverage violations = {cor1}, "
               f"aligned-generator bound violations = {prop2}")
    if cor1 or prop2:
        raise click.ClickException("theorem check violations found")


# ---------------------------------------------------------------------------
# pipeline stages

_backend_options = [
    click.option("--mock", is_flag=True, help="Use the bundled deterministic backend."),
    click.option("--base-url", default="https://api.openai.com/v1", show_default=True),
    click.option("--model", default="gpt-4o-mini", show_default=True),
    click.option("--temperature", default=1.0, show_default=True),
]


def backend_options(fn):
    for opt in reversed(_backend_options):
        fn = opt(fn)
    return fn


def _common_pipeline_args(fn):
    fn = click.option("--dataset", type=click.Path(exists=True), default=str(TOY_DATASET),
                      show_default=False, help="Problem dataset (JSONL); defaults to the "
                      "bundled toy problems.")(fn)
    fn = click.option("--cache", "cache_path", default="runcache.jsonl",
                      show_default=True, help="Run cache path.")(fn)
    return fn


@main.command()
@_common_pipeline_args
@backend_options
@click.option("--n", default=50, show_default=True, help="Candidates per problem.")
def generate(dataset, cache_path, mock, base_url, model, temperature, n):
    """Sample candidate optimization models for every problem."""
    problems = load_dataset(dataset)
    backend, fingerprint = _make_backend(mock, base_url, model, temperature)
    cache = RunCache(cache_path)
    for problem in problems:
        did_work = stages.run_generate(cache, problem, n, backend, fingerprint)
        click.echo(f"{problem.id}: {'generated' if did_work else 'cached'} "
                   f"{n} candidates")


@main.command()
@_common_pipeline_args
@backend_options
@click.option("--mode", type=click.Choice(EVAL_MODES), default="llm", show_default=True)
@click.option("--samples", default=4, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--timeout", default=10.0, show_default=True,
              help="Per-candidate execution timeout (seconds).")
@click.option("--jobs", default=4, show_default=True,
              help="Max concurrent backend requests.")
def evaluate(dataset, cache_path, mock, base_url, model, temperature, mode,
             samples, seed, timeout, jobs):
    """Execute candidate code, then rank candidates with the chosen evaluator."""
    problems = load_dataset(dataset)
    backend, fingerprint = _make_backend(mock, base_url, model, temperature)
    cache = RunCache(cache_path)
    for problem in problems:
        try:
            state = stages.load_state(cache, problem)
        except KeyError as exc:
            raise click.ClickException(str(exc))
        stages.run_execute(cache, state, RunnerConfig(timeout=timeout))
        did_work = stages.run_evaluate(
            cache, state, mode, samples,
            backend if mode == "llm" else None, fingerprint, seed, parallel=jobs,
        )
        click.echo(f"{problem.id}: {mode} evaluation "
                   f"{'done' if did_work else 'cached'}")


@main.command()
@_common_pipeline_args
@backend_options
@click.option("--samples", default=4, show_default=True)
@click.option("--jobs", default=4, show_default=True)
def judge(dataset, cache_path, mock, base_url, model, temperature, samples, jobs):
    """Score every candidate with ground truth in the prompt."""
    problems = load_dataset(dataset)
    backend, fingerprint = _make_backend(mock, base_url, model, temperature)
    cache = RunCache(cache_path)
    for problem in problems:
        try:
            state = stages.load_state(cache, problem)
            did_work = stages.run_judge(cache, state, samples, backend,
                                        fingerprint, parallel=jobs)
        except (KeyError, RuntimeError) as exc:
            raise click.ClickException(str(exc))
        click.echo(f"{problem.id}: judging {'done' if did_work else 'cached'}")


# ---------------------------------------------------------------------------
# portfolio + report


@main.command()
@_common_pipeline_args
@click.option("--alpha", type=float, default=None,
              help="Build the minimal prefix with mass >= 1 - alpha.")
@click.option("--size", type=int, default=None,
              help="Truncate the evaluator ranking at a fixed size instead.")
@click.option("--mode", type=click.Choice(EVAL_MODES), default="llm", show_default=True)
@click.option("--problem", "problem_id", default=None,
              help="Restrict to one problem id.")
def portfolio(dataset, cache_path, alpha, size, mode, problem_id):
    """Print the portfolio review report for a human decision-maker."""
    if (alpha is None) == (size is None):
        raise click.UsageError("exactly one of --alpha / --size is required")
    problems = load_dataset(dataset)
    if problem_id is not None:
        problems = [p for p in problems if p.id == problem_id]
        if not problems:
            raise click.ClickException(f"unknown problem id {problem_id!r}")
    cache = RunCache(cache_path)
    for problem in problems:
        try:
            state = stages.load_state(cache, problem)
            ranking = stages.load_ranking(cache, problem.id, mode)
        except KeyError as exc:
            raise click.ClickException(str(exc))
        sheets = stages.load_score_sheets(cache, problem.id, mode)
        if size is not None:
            if size > ranking.size:
                raise click.ClickException(
                    f"{problem.id}: requested size {size} exceeds "
                    f"{ranking.size} available candidates"
                )
            members = ranking.order[:size]
            header = f"size={size}"
        else:
            try:
                pf = core.build_portfolio(ranking, state.dist, alpha)
            except core.PortfolioError as exc:
                raise click.ClickException(f"{problem.id}: {exc}")
            members = pf.members
            header = (f"alpha={alpha} -> k*={pf.k_star}, "
                      f"cumulative mass={pf.cumulative_mass:.4f}")
        click.echo(f"=== Portfolio for {problem.id} ({mode} evaluator, {header}) ===")
        for rank, pos in enumerate(members, start=1):
            cand = state.candidates[pos]
            mean = sheets[pos].mean_score if pos in sheets else float("nan")
            click.echo(f"\n--- rank {rank} | p={state.dist.probs[pos]:.4f} | "
                       f"mean evaluator score={mean:.1f} | "
                       f"{'valid' if cand.is_valid else 'INVALID'} ---")
            click.echo(cand.raw_text.strip())
            if cand.execution is not None:
                click.echo(f"[execution output]\n{cand.execution.stdout.strip()}")
        click.echo()


@main.command()
@_common_pipeline_args
@click.option("--sizes", default="2,4,6,8", show_default=True)
@click.option("--baseline-draws", default=30, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(), default="report.csv", show_default=True)
def report(dataset, cache_path, sizes, baseline_draws, seed, out):
    """Compare fixed-size portfolios against random baselines on the
    worst-case (minimum) judge score; write the report CSV."""
    problems = load_dataset(dataset)
    sizes = _parse_list(sizes, int)
    cache = RunCache(cache_path)
    rows = []  # (problem_id, method, size, draw, min_score)
    portfolio_wins = {mode: 0 for mode in EVAL_MODES}
    cells = 0
    for problem in problems:
        try:
            judge_scores = stages.load_judge_scores(cache, problem.id)
        except KeyError as exc:
            raise click.ClickException(str(exc))
        n_candidates = len(judge_scores)
        random_means: dict[int, float] = {}
        for s in sizes:
            if s > n_candidates:
                raise click.ClickException(
                    f"{problem.id}: size {s} exceeds {n_candidates} candidates"
                )
            rng = np.random.default_rng(
                int(content_hash(seed, problem.id, s)[:16], 16)
            )
            mins = []
            for draw in range(baseline_draws):
                subset = rng.choice(n_candidates, size=s, replace=False)
                m = min(judge_scores[int(pos)] for pos in subset)
                mins.append(m)
                rows.append((problem.id, "random", s, draw, m))
            random_means[s] = float(np.mean(mins))
        for mode in EVAL_MODES:
            try:
                ranking = stages.load_ranking(cache, problem.id, mode)
            except KeyError as exc:
                raise click.ClickException(str(exc))
            for s in sizes:
                members = ranking.order[:s]
                m = min(judge_scores[pos] for pos in members)
                rows.append((problem.id, f"portfolio_{mode}", s, "", m))
                cells += 1
                if m >= random_means[s]:
                    portfolio_wins[mode] += 1
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_CSV_HEADER)
        for pid, method, s, draw, m in rows:
            writer.writerow([pid, method, s, draw, repr(float(m))])
    click.echo(f"wrote {len(rows)} rows to {out}")
    for method in ("portfolio_llm", "portfolio_genprob", "random"):
        vals = [m for _, mth, _, _, m in rows if mth == method]
        click.echo(f"mean min judge score [{method}]: {np.mean(vals):.4f}")
    half = cells // len(EVAL_MODES)
    for mode in EVAL_MODES:
        click.echo(f"portfolio_{mode} beats the random-baseline mean in "
                   f"{portfolio_wins[mode]}/{half} (problem, size) cells")


@main.command("mock-server")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8099, show_default=True)
@click.option("--dataset", type=click.Path(exists=True), default=str(TOY_DATASET))
def mock_server(host, port, dataset):
    """Serve the deterministic mock backend over HTTP (OpenAI-compatible)."""
    problems = load_dataset(dataset)
    server = serve_mock(problems, host=host, port=port)
    click.echo(f"mock backend listening on http://{host}:{port}/chat/completions")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()


if __name__ == "__main__":
    sys.exit(main())
