#!/usr/bin/env node
/**
 * plot-invariants — semilog invariant-error curves from msint diagnostics CSVs.
 *
 * Usage:
 *   plot-invariants --spec figure.json
 *
 * The spec file names the runs, the quantity column and the output image:
 *   {
 *     "runs": [
 *       { "csv": "out_dt10/diagnostics.csv", "label": "dt = 0.1" },
 *       { "csv": "out_dt05/diagnostics.csv", "label": "dt = 0.05" }
 *     ],
 *     "quantity": "err_frakI_h",
 *     "out": "invariant_error.svg",
 *     "yscale": "log",          // optional, default log
 *     "xscale": "linear",       // optional, default linear
 *     "title": "..."            // optional
 *   }
 */

import { readFile, writeFile } from "fs/promises";
import path from "path";

import { parseCsv, requireColumn } from "./csv.js";
import { buildChart, paletteColor, Series } from "./svg.js";

export interface FigureSpec {
  runs: { csv: string; label: string }[];
  quantity: string;
  out: string;
  yscale?: "linear" | "log";
  xscale?: "linear" | "log";
  title?: string;
}

export function validateSpec(raw: unknown): FigureSpec {
  if (typeof raw !== "object" || raw === null) {
    throw new Error("figure spec must be a JSON object");
  }
  const spec = raw as Record<string, unknown>;
  if (!Array.isArray(spec.runs) || spec.runs.length === 0) {
    throw new Error("figure spec needs a nonempty 'runs' array");
  }
  for (const run of spec.runs) {
    if (typeof run !== "object" || run === null || typeof (run as any).csv !== "string" || typeof (run as any).label !== "string") {
      throw new Error("every run needs string 'csv' and 'label' fields");
    }
  }
  if (typeof spec.quantity !== "string") {
    throw new Error("figure spec needs a 'quantity' column name");
  }
  if (typeof spec.out !== "string") {
    throw new Error("figure spec needs an 'out' image path");
  }
  const yscale = (spec.yscale ?? "log") as string;
  const xscale = (spec.xscale ?? "linear") as string;
  if (yscale !== "log" && yscale !== "linear") throw new Error(`unknown yscale '${yscale}'`);
  if (xscale !== "log" && xscale !== "linear") throw new Error(`unknown xscale '${xscale}'`);
  return {
    runs: spec.runs as FigureSpec["runs"],
    quantity: spec.quantity,
    out: spec.out,
    yscale: yscale as "log" | "linear",
    xscale: xscale as "log" | "linear",
    title: typeof spec.title === "string" ? spec.title : undefined,
  };
}

/** Pure renderer: run CSV texts in, SVG text out. */
export function renderInvariantFigure(
  spec: FigureSpec,
  tables: { label: string; text: string; source: string }[]
): string {
  const series: Series[] = tables.map((run, i) => {
    const table = parseCsv(run.text, run.source);
    const t = requireColumn(table, "t", run.source);
    const q = requireColumn(table, spec.quantity, run.source);
    return { x: t, y: q, label: run.label, color: paletteColor(i) };
  });
  return buildChart({
    title: spec.title ?? `${spec.quantity} vs. time`,
    xLabel: "t",
    yLabel: spec.quantity,
    series,
    yScale: spec.yscale ?? "log",
    xScale: spec.xscale ?? "linear",
  });
}

async function main(): Promise<void> {
  const args = process.argv.slice(2);
  const flag = args.indexOf("--spec");
  if (flag === -1 || flag + 1 >= args.length) {
    console.error("usage: plot-invariants --spec <figure.json>");
    process.exit(2);
  }
  const specPath = args[flag + 1];
  const baseDir = path.dirname(specPath);
  const spec = validateSpec(JSON.parse(await readFile(specPath, "utf-8")));
  const tables = await Promise.all(
    spec.runs.map(async (run) => ({
      label: run.label,
      source: run.csv,
      text: await readFile(path.resolve(baseDir, run.csv), "utf-8"),
    }))
  );
  const svg = renderInvariantFigure(spec, tables);
  const outPath = path.resolve(baseDir, spec.out);
  await writeFile(outPath, svg, "utf-8");
  console.log(`SVG -> ${outPath}`);
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  (process.argv[1].endsWith("plotInvariants.js") || process.argv[1].endsWith("plot-invariants"));
if (invokedDirectly) {
  main().catch((error) => {
    console.error(String(error instanceof Error ? error.message : error));
    process.exit(1);
  });
}
