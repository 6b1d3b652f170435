/** Deterministic SVG line charts: fixed geometry, fixed per-method colors,
 * fixed number formatting: identical input bytes give identical output bytes. */

export interface Series {
  label: string;
  color: string;
  points: Array<{ x: number; y: number }>;
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 24, bottom: 56, left: 84 };

// one fixed color per method line, keyed by method + latency weight
const COLORS: Record<string, string> = {
  "proposed (0.3,0.7)": "#d62728",
  "proposed (0.5,0.5)": "#1f77b4",
  "proposed (0.7,0.3)": "#2ca02c",
  "equal (0.5,0.5)": "#ff7f0e",
  "random (0.5,0.5)": "#9467bd",
};
const FALLBACK_COLORS = ["#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

export function seriesColor(label: string, index: number): string {
  return COLORS[label] ?? FALLBACK_COLORS[index % FALLBACK_COLORS.length];
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e-3 && a < 1e6) {
    return String(Number(v.toPrecision(6)));
  }
  return v.toExponential(3);
}

function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) {
    const pad = Math.abs(lo) > 0 ? Math.abs(lo) * 0.1 : 1;
    lo -= pad;
    hi += pad;
  }
  const span = hi - lo;
  const step0 = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const norm = step0 / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = start; t <= hi + step * 1e-9; t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return ticks;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderLineChart(
  series: Series[],
  title: string,
  xLabel: string,
  yLabel: string,
): string {
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  if (xs.length === 0) {
    throw new Error("nothing to draw: every series is empty");
  }
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (xHi === xLo) {
    xLo -= 1;
    xHi += 1;
  }
  const yPad = (yHi - yLo || Math.abs(yHi) || 1) * 0.08;
  yLo -= yPad;
  yHi += yPad;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const px = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) => MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;
  const coord = (v: number) => String(Number(v.toFixed(2)));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="26" text-anchor="middle" font-size="17" fill="#222">${esc(title)}</text>`,
  );

  for (const t of niceTicks(xLo, xHi, 7)) {
    const x = coord(px(t));
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + plotH}" stroke="#e5e5e5" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${MARGIN.top + plotH + 20}" text-anchor="middle" font-size="12" fill="#444">${fmt(t)}</text>`,
    );
  }
  for (const t of niceTicks(yLo, yHi, 6)) {
    const y = coord(py(t));
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" y2="${y}" stroke="#e5e5e5" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="12" fill="#444">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#888" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13" fill="#222">${esc(xLabel)}</text>`,
  );
  parts.push(
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" fill="#222" ` +
      `transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${esc(yLabel)}</text>`,
  );

  series.forEach((s) => {
    const pts = [...s.points].sort((a, b) => a.x - b.x);
    const path = pts
      .map((p, i) => `${i === 0 ? "M" : "L"}${coord(px(p.x))},${coord(py(p.y))}`)
      .join(" ");
    parts.push(`<path d="${path}" fill="none" stroke="${s.color}" stroke-width="2"/>`);
    for (const p of pts) {
      parts.push(
        `<circle cx="${coord(px(p.x))}" cy="${coord(py(p.y))}" r="3.5" fill="${s.color}"/>`,
      );
    }
  });

  const legendX = MARGIN.left + 12;
  series.forEach((s, i) => {
    const y = MARGIN.top + 16 + i * 18;
    parts.push(
      `<line x1="${legendX}" y1="${y}" x2="${legendX + 26}" y2="${y}" stroke="${s.color}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${legendX + 32}" y="${y + 4}" font-size="12" fill="#222">${esc(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
