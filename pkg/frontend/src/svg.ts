/**
 * Minimal deterministic SVG chart builder.
 *
 * No plotting library: axes, grid lines, polylines and a legend are emitted as
 * plain SVG text with fixed 2-decimal coordinates, so reruns produce identical
 * bytes.
 */

import { Scale, linearScale, logScale } from "./scale.js";

export interface Series {
  x: number[];
  y: number[];
  label: string;
  color: string;
  dash?: string;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  yScale: "linear" | "log";
  xScale?: "linear" | "log";
  width?: number;
  height?: number;
  /** floor for clamping nonpositive values on a log axis */
  logFloor?: number;
}

const PALETTE = ["#4361ee", "#e63946", "#2d6a4f", "#f3722c", "#7209b7", "#118ab2"];

export function paletteColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

const fmt = (v: number): string => v.toFixed(2);

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function buildChart(spec: ChartSpec): string {
  const width = spec.width ?? 760;
  const height = spec.height ?? 480;
  const margin = { left: 78, right: 24, top: 42, bottom: 52 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const floor = spec.logFloor ?? 1e-18;

  const xs = spec.series.flatMap((s) => s.x);
  let ys = spec.series.flatMap((s) => s.y);
  if (spec.yScale === "log") {
    ys = ys.map((v) => (v > 0 ? v : floor));
  }
  if (xs.length === 0 || ys.length === 0) {
    throw new Error("chart has no data points");
  }
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const yLo = Math.min(...ys);
  const yHi = Math.max(...ys);

  const xScale: Scale =
    (spec.xScale ?? "linear") === "log"
      ? logScale(Math.max(xLo, floor), Math.max(xHi, floor), margin.left, margin.left + plotW)
      : linearScale(xLo, xHi, margin.left, margin.left + plotW);
  // pixel axis is inverted for y
  const yScale: Scale =
    spec.yScale === "log"
      ? logScale(yLo, yHi, margin.top + plotH, margin.top)
      : linearScale(yLo, yHi, margin.top + plotH, margin.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${fmt(width / 2)}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15" fill="#222">${escapeXml(spec.title)}</text>`
  );

  // frame
  parts.push(
    `<rect x="${fmt(margin.left)}" y="${fmt(margin.top)}" width="${fmt(plotW)}" height="${fmt(plotH)}" fill="none" stroke="#333" stroke-width="1"/>`
  );

  for (const tick of xScale.ticks()) {
    const px = xScale.toPixel(tick.value);
    if (px < margin.left - 0.5 || px > margin.left + plotW + 0.5) continue;
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(margin.top)}" x2="${fmt(px)}" y2="${fmt(margin.top + plotH)}" stroke="#ddd" stroke-width="0.6"/>`
    );
    parts.push(
      `<text x="${fmt(px)}" y="${fmt(margin.top + plotH + 18)}" text-anchor="middle" font-family="sans-serif" font-size="11" fill="#333">${escapeXml(tick.label)}</text>`
    );
  }
  for (const tick of yScale.ticks()) {
    const py = yScale.toPixel(tick.value);
    if (py < margin.top - 0.5 || py > margin.top + plotH + 0.5) continue;
    parts.push(
      `<line x1="${fmt(margin.left)}" y1="${fmt(py)}" x2="${fmt(margin.left + plotW)}" y2="${fmt(py)}" stroke="#ddd" stroke-width="0.6"/>`
    );
    parts.push(
      `<text x="${fmt(margin.left - 8)}" y="${fmt(py + 4)}" text-anchor="end" font-family="sans-serif" font-size="11" fill="#333">${escapeXml(tick.label)}</text>`
    );
  }

  parts.push(
    `<text x="${fmt(margin.left + plotW / 2)}" y="${fmt(height - 12)}" text-anchor="middle" font-family="sans-serif" font-size="12" fill="#222">${escapeXml(spec.xLabel)}</text>`
  );
  parts.push(
    `<text x="20" y="${fmt(margin.top + plotH / 2)}" text-anchor="middle" font-family="sans-serif" font-size="12" fill="#222" transform="rotate(-90 20 ${fmt(margin.top + plotH / 2)})">${escapeXml(spec.yLabel)}</text>`
  );

  spec.series.forEach((series) => {
    const points = series.x
      .map((x, i) => {
        const yRaw = series.y[i];
        const y = spec.yScale === "log" && !(yRaw > 0) ? floor : yRaw;
        return `${fmt(xScale.toPixel(x))},${fmt(yScale.toPixel(y))}`;
      })
      .join(" ");
    const dash = series.dash ? ` stroke-dasharray="${series.dash}"` : "";
    parts.push(
      `<polyline points="${points}" fill="none" stroke="${series.color}" stroke-width="1.4"${dash}/>`
    );
  });

  // legend
  spec.series.forEach((series, i) => {
    const ly = margin.top + 14 + 16 * i;
    const lx = margin.left + plotW - 160;
    parts.push(
      `<line x1="${fmt(lx)}" y1="${fmt(ly - 4)}" x2="${fmt(lx + 22)}" y2="${fmt(ly - 4)}" stroke="${series.color}" stroke-width="1.6"${series.dash ? ` stroke-dasharray="${series.dash}"` : ""}/>`
    );
    parts.push(
      `<text x="${fmt(lx + 28)}" y="${fmt(ly)}" font-family="sans-serif" font-size="11" fill="#222">${escapeXml(series.label)}</text>`
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
