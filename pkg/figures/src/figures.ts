// Builds figure panel specs from the CSV schemas the optfolio CLI writes:
//   aggregate CSV: generator,epsilon,K,alpha,metric,mean,ci_low,ci_high,n
//   report CSV:    problem_id,method,size,draw,min_judge_score

import { Row, requireColumns } from "./csv.js";
import { kdeCurve, mean } from "./stats.js";
import { PanelSpec, RefLine, Series } from "./svg.js";

export interface Filters {
  K?: number;
  generator?: string;
  epsilon?: number;
  sizes?: number[];
}

export type FigureKind = "coverage_curve" | "size_curve" | "kde_scores" | "grid";

function uniq<T>(xs: T[]): T[] {
  return [...new Set(xs)];
}

function filterAggregate(rows: Row[], filters: Filters): Row[] {
  requireColumns(rows, ["generator", "epsilon", "K", "alpha", "metric", "mean", "ci_low", "ci_high"], "aggregate CSV");
  return rows.filter(
    (r) =>
      (filters.K === undefined || Number(r.K) === filters.K) &&
      (filters.generator === undefined || r.generator === filters.generator) &&
      (filters.epsilon === undefined || Number(r.epsilon) === filters.epsilon)
  );
}

function curveSeries(rows: Row[], label: string): Series {
  const sorted = [...rows].sort((a, b) => Number(b.alpha) - Number(a.alpha));
  return {
    label,
    points: sorted.map((r) => [1 - Number(r.alpha), Number(r.mean)]),
    band: sorted.map((r) => [1 - Number(r.alpha), Number(r.ci_low), Number(r.ci_high)]),
  };
}

function curvePanel(rows: Row[], metric: "coverage" | "size", title: string): PanelSpec {
  const metricRows = rows.filter((r) => r.metric === metric);
  if (metricRows.length === 0) {
    throw new Error(`no '${metric}' rows after filtering`);
  }
  // one line per epsilon when several are present, else one per generator
  const epsilons = uniq(metricRows.map((r) => r.epsilon));
  const byEps = epsilons.length > 1;
  const keys = byEps ? epsilons : uniq(metricRows.map((r) => r.generator));
  const series = keys.map((key) =>
    curveSeries(
      metricRows.filter((r) => (byEps ? r.epsilon : r.generator) === key),
      byEps ? `eps=${Number(key)}` : String(key)
    )
  );
  return {
    title,
    xLabel: "1 - alpha",
    yLabel: metric === "coverage" ? "mean coverage" : "mean portfolio size",
    series,
    diagonal: metric === "coverage",
    xDomain: [0, 1],
    yDomain: metric === "coverage" ? [0, 1.02] : undefined,
  };
}

export function buildCurveFigure(
  rows: Row[],
  metric: "coverage" | "size",
  filters: Filters
): PanelSpec[] {
  const filtered = filterAggregate(rows, filters);
  if (filtered.length === 0) {
    throw new Error("no rows match the requested filters");
  }
  const kinds = uniq(filtered.map((r) => r.generator)).join("/");
  const kLabel = uniq(filtered.map((r) => r.K)).join(",");
  const what = metric === "coverage" ? "coverage" : "size";
  return [curvePanel(filtered, metric, `Portfolio ${what} (${kinds}, K=${kLabel})`)];
}

export function buildGridFigure(rows: Row[], filters: Filters): PanelSpec[] {
  const filtered = filterAggregate(rows, filters);
  if (filtered.length === 0) {
    throw new Error("no rows match the requested filters");
  }
  const combos = uniq(filtered.map((r) => `${r.generator}|${r.epsilon}|${r.K}`));
  return combos.map((combo) => {
    const [generator, epsilon, K] = combo.split("|");
    const panelRows = filtered.filter(
      (r) => r.generator === generator && r.epsilon === epsilon && r.K === K
    );
    return curvePanel(
      panelRows,
      "coverage",
      `${generator}, eps=${Number(epsilon)}, K=${K}`
    );
  });
}

export function buildKdeFigure(rows: Row[], filters: Filters): PanelSpec[] {
  requireColumns(rows, ["problem_id", "method", "size", "min_judge_score"], "report CSV");
  const filtered = rows.filter(
    (r) => filters.sizes === undefined || filters.sizes.includes(Number(r.size))
  );
  if (filtered.length === 0) {
    throw new Error("no rows match the requested filters");
  }
  const methods = uniq(filtered.map((r) => r.method)).sort();
  const series: Series[] = [];
  const refLines: RefLine[] = [];
  methods.forEach((method) => {
    const scores = filtered
      .filter((r) => r.method === method)
      .map((r) => Number(r.min_judge_score));
    series.push({ label: method, points: kdeCurve(scores, 0, 1) });
    const isRandom = method === "random";
    refLines.push({
      x: mean(scores),
      label: `${method} mean`,
      dash: isRandom ? "6,4" : "2,3", // dashed random, dotted portfolio
      color: isRandom ? "#555" : "#111",
    });
  });
  const sizes = uniq(filtered.map((r) => r.size)).join(",");
  return [
    {
      title: `Min judge score by method (sizes ${sizes})`,
      xLabel: "minimum judge score",
      yLabel: "density",
      series,
      refLines,
      xDomain: [0, 1],
    },
  ];
}

export function buildFigure(kind: FigureKind, rows: Row[], filters: Filters): PanelSpec[] {
  switch (kind) {
    case "coverage_curve":
      return buildCurveFigure(rows, "coverage", filters);
    case "size_curve":
      return buildCurveFigure(rows, "size", filters);
    case "grid":
      return buildGridFigure(rows, filters);
    case "kde_scores":
      return buildKdeFigure(rows, filters);
    default:
      throw new Error(`unknown figure kind '${kind}'`);
  }
}
