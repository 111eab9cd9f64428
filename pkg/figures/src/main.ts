// CLI: render one figure from a CSV produced by the optfolio CLI.
//
//   node dist/main.js --input agg.csv --kind coverage_curve --K 100 --out fig.svg
//
// Kinds: coverage_curve, size_curve, grid (from the aggregate CSV) and
// kde_scores (from the report CSV).  The output SVG embeds the sha256 of
// the input CSV in a <metadata> element.  Rendering never recomputes
// statistics; it only draws what the CSV holds.

import { createHash } from "node:crypto";
import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv } from "./csv.js";
import { buildFigure, FigureKind, Filters } from "./figures.js";
import { renderSvg } from "./svg.js";

interface Args {
  input: string;
  kind: FigureKind;
  out: string;
  format: string;
  filters: Filters;
}

function parseArgs(argv: string[]): Args {
  const opts: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near '${flag}'`);
    }
    opts[flag.slice(2)] = argv[i + 1];
  }
  for (const required of ["input", "kind", "out"]) {
    if (!(required in opts)) {
      throw new Error(`missing required flag --${required}`);
    }
  }
  const kinds = ["coverage_curve", "size_curve", "kde_scores", "grid"];
  if (!kinds.includes(opts.kind)) {
    throw new Error(`--kind must be one of ${kinds.join(", ")}`);
  }
  const format = opts.format ?? "svg";
  if (format !== "svg") {
    // png would need a rasterizer; svg is the native output
    throw new Error(`unsupported format '${format}' (only svg is supported)`);
  }
  const filters: Filters = {};
  if (opts.K !== undefined) filters.K = Number(opts.K);
  if (opts.generator !== undefined) filters.generator = opts.generator;
  if (opts.eps !== undefined) filters.epsilon = Number(opts.eps);
  if (opts.sizes !== undefined) filters.sizes = opts.sizes.split(",").map(Number);
  return { input: opts.input, kind: opts.kind as FigureKind, out: opts.out, format, filters };
}

export function runFigures(argv: string[]): string {
  const args = parseArgs(argv);
  const text = readFileSync(args.input, "utf-8");
  const inputHash = createHash("sha256").update(text).digest("hex");
  const panels = buildFigure(args.kind, parseCsv(text), args.filters);
  const svg = renderSvg(panels, inputHash);
  writeFileSync(args.out, svg);
  return args.out;
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("main.js") || entry.endsWith("main.ts")) {
  try {
    const out = runFigures(process.argv.slice(2));
    console.log(`wrote ${out}`);
  } catch (err) {
    console.error(`figures: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  }
}
