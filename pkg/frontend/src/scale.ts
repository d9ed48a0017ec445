/** Axis scales (linear and base-10 logarithmic) with tick generation. */

export interface Scale {
  /** map a data value to a pixel coordinate */
  toPixel(value: number): number;
  ticks(): { value: number; label: string }[];
  domain: [number, number];
}

function linearTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const rawStep = span / count;
  const magnitude = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 5, 10].map((m) => m * magnitude);
  const step = candidates.find((c) => span / c <= count) ?? candidates[3];
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 0.01 && magnitude < 10000) {
    return String(Number(value.toPrecision(6)));
  }
  return value.toExponential(0).replace("+", "");
}

export function linearScale(lo: number, hi: number, pixelLo: number, pixelHi: number): Scale {
  if (hi === lo) {
    hi = lo + 1;
  }
  const slope = (pixelHi - pixelLo) / (hi - lo);
  return {
    domain: [lo, hi],
    toPixel: (value) => pixelLo + (value - lo) * slope,
    ticks: () => linearTicks(lo, hi).map((v) => ({ value: v, label: formatTick(v) })),
  };
}

/**
 * Log scale over positive values; decade ticks labeled 1e<exp>.
 * The domain is widened to whole decades so the floor of an error curve is
 * always visibly below its plateau.
 */
export function logScale(lo: number, hi: number, pixelLo: number, pixelHi: number): Scale {
  if (!(lo > 0) || !(hi > 0)) {
    throw new Error(`log scale requires positive bounds, got [${lo}, ${hi}]`);
  }
  const loExp = Math.floor(Math.log10(lo));
  const hiExp = Math.ceil(Math.log10(hi));
  const lgLo = loExp;
  const lgHi = hiExp > loExp ? hiExp : loExp + 1;
  const slope = (pixelHi - pixelLo) / (lgHi - lgLo);
  const every = Math.max(1, Math.ceil((lgHi - lgLo) / 8));
  const ticks: { value: number; label: string }[] = [];
  for (let e = lgLo; e <= lgHi; e += every) {
    ticks.push({ value: Math.pow(10, e), label: `1e${e}` });
  }
  return {
    domain: [Math.pow(10, lgLo), Math.pow(10, lgHi)],
    toPixel: (value) => pixelLo + (Math.log10(value) - lgLo) * slope,
    ticks: () => ticks,
  };
}
