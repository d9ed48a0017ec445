#!/usr/bin/env node
/**
 * plot-profile — line plot of a solitary-wave profile CSV (x, eta, u).
 *
 * Usage:
 *   plot-profile <profile.csv> --out <figure.svg> [--with-u]
 *
 * Metadata comments written by the solver (speed, classification, residual)
 * become the figure title when present.
 */

import { readFile, writeFile } from "fs/promises";
import path from "path";

import { parseCsv, requireColumn } from "./csv.js";
import { buildChart, paletteColor, Series } from "./svg.js";

export function renderProfileFigure(text: string, source: string, withVelocity: boolean): string {
  const table = parseCsv(text, source);
  const x = requireColumn(table, "x", source);
  const eta = requireColumn(table, "eta", source);
  const series: Series[] = [{ x, y: eta, label: "surface eta", color: paletteColor(0) }];
  if (withVelocity) {
    const u = requireColumn(table, "u", source);
    series.push({ x, y: u, label: "velocity u", color: paletteColor(1), dash: "5,3" });
  }
  const meta = Object.fromEntries(
    table.comments
      .map((c) => c.split(":").map((part) => part.trim()))
      .filter((parts) => parts.length === 2)
  );
  const bits: string[] = [];
  if (meta["classification"]) bits.push(meta["classification"]);
  if (meta["speed"]) bits.push(`speed ${meta["speed"]}`);
  const title = bits.length > 0 ? `Traveling-wave profile (${bits.join(", ")})` : "Traveling-wave profile";
  return buildChart({
    title,
    xLabel: "x",
    yLabel: withVelocity ? "eta, u" : "eta",
    series,
    yScale: "linear",
  });
}

async function main(): Promise<void> {
  const args = process.argv.slice(2);
  const positional: string[] = [];
  let outPath: string | undefined;
  let withVelocity = false;
  for (let i = 0; i < args.length; i++) {
    const arg = args[i];
    if (arg === "--out") {
      outPath = args[++i];
    } else if (arg === "--with-u") {
      withVelocity = true;
    } else if (arg.startsWith("--")) {
      console.error(`unknown option '${arg}'`);
      process.exit(2);
    } else {
      positional.push(arg);
    }
  }
  if (positional.length !== 1 || outPath === undefined) {
    console.error("usage: plot-profile <profile.csv> --out <figure.svg> [--with-u]");
    process.exit(2);
  }
  const csvPath = positional[0];
  const svg = renderProfileFigure(await readFile(csvPath, "utf-8"), csvPath, withVelocity);
  await writeFile(path.resolve(outPath), svg, "utf-8");
  console.log(`SVG -> ${outPath}`);
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  (process.argv[1].endsWith("plotProfile.js") || process.argv[1].endsWith("plot-profile"));
if (invokedDirectly) {
  main().catch((error) => {
    console.error(String(error instanceof Error ? error.message : error));
    process.exit(1);
  });
}
