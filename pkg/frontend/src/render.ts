/** Panel rendering: strictly a view over the sweep CSV, nothing recomputed. */

import * as fs from "node:fs";
import * as path from "node:path";

import { renderLineChart, Series, seriesColor } from "./chart.js";
import { parseSweepCsv, SweepRow, SweepTable } from "./csv.js";

export const PANELS = ["T", "U", "objective"] as const;
export type Panel = (typeof PANELS)[number];

export interface FigureSpec {
  csvPath: string;
  panel: Panel | "all";
  outDir: string;
}

const PANEL_COLUMN: Record<Panel, { pick: (r: SweepRow) => number; label: string }> = {
  T: { pick: (r) => r.tTotalS, label: "T_total_s" },
  U: { pick: (r) => r.uTotal, label: "U_total" },
  objective: { pick: (r) => r.objective, label: "objective" },
};

function seriesKey(r: SweepRow): string {
  return `${r.method} (${r.w1},${r.w2})`;
}

function buildSeries(table: SweepTable, panel: Panel): Series[] {
  const byKey = new Map<string, Array<{ x: number; y: number }>>();
  for (const row of table.rows) {
    const key = seriesKey(row);
    if (!byKey.has(key)) byKey.set(key, []);
    byKey.get(key)!.push({ x: row.axisValue, y: PANEL_COLUMN[panel].pick(row) });
  }
  const labels = [...byKey.keys()].sort();
  return labels.map((label, i) => ({
    label,
    color: seriesColor(label, i),
    points: byKey.get(label)!,
  }));
}

export function renderPanel(table: SweepTable, panel: Panel): string {
  const series = buildSeries(table, panel);
  const { label } = PANEL_COLUMN[panel];
  return renderLineChart(series, `${label} vs ${table.axis}`, table.axis, label);
}

/** Render the requested panel(s); returns the list of files written. */
export function render(spec: FigureSpec): string[] {
  const text = fs.readFileSync(spec.csvPath, "utf8");
  const table = parseSweepCsv(text); // throws before anything is written
  const panels: Panel[] = spec.panel === "all" ? [...PANELS] : [spec.panel];
  fs.mkdirSync(spec.outDir, { recursive: true });
  const stem = path.basename(spec.csvPath).replace(/\.csv$/i, "");
  const written: string[] = [];
  for (const panel of panels) {
    const svg = renderPanel(table, panel);
    const file = path.join(spec.outDir, `${stem}_${panel}.svg`);
    fs.writeFileSync(file, svg);
    written.push(file);
  }
  return written;
}
