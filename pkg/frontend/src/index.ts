export { CsvSchemaError, EXPECTED_HEADER, parseSweepCsv } from "./csv.js";
export type { SweepRow, SweepTable } from "./csv.js";
export { renderLineChart, seriesColor } from "./chart.js";
export type { Series } from "./chart.js";
export { PANELS, render, renderPanel } from "./render.js";
export type { FigureSpec, Panel } from "./render.js";
