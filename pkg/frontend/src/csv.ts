/** Strict reader for the sweep CSV emitted by the experiment harness. */

export const EXPECTED_HEADER = [
  "axis",
  "axis_value",
  "method",
  "w1",
  "w2",
  "T_total_s",
  "U_total",
  "objective",
  "converged",
  "iters_outer",
  "iters_fp_total",
  "wall_ms",
] as const;

export interface SweepRow {
  axis: string;
  axisValue: number;
  method: string;
  w1: number;
  w2: number;
  tTotalS: number;
  uTotal: number;
  objective: number;
  converged: boolean;
}

export interface SweepTable {
  axis: string;
  rows: SweepRow[];
}

export class CsvSchemaError extends Error {}

export function parseSweepCsv(text: string): SweepTable {
  const lines = text.split(/\r?\n/).filter((ln) => ln.trim().length > 0);
  if (lines.length === 0) {
    throw new CsvSchemaError("CSV is empty: no header line");
  }
  const header = lines[0].split(",");
  const expected = EXPECTED_HEADER as readonly string[];
  const missing = expected.filter((col) => !header.includes(col));
  if (missing.length > 0) {
    throw new CsvSchemaError(`CSV header is missing column(s): ${missing.join(", ")}`);
  }
  if (header.length !== expected.length || expected.some((col, i) => header[i] !== col)) {
    throw new CsvSchemaError(
      `CSV header does not match the sweep schema exactly; got: ${lines[0]}`,
    );
  }
  if (lines.length === 1) {
    throw new CsvSchemaError("CSV has a header but no data rows");
  }
  const rows: SweepRow[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== expected.length) {
      throw new CsvSchemaError(`malformed CSV row (${parts.length} fields): ${line}`);
    }
    const num = (label: string, s: string): number => {
      const v = Number(s);
      if (!Number.isFinite(v)) {
        throw new CsvSchemaError(`non-numeric ${label} value: ${s}`);
      }
      return v;
    };
    rows.push({
      axis: parts[0],
      axisValue: num("axis_value", parts[1]),
      method: parts[2],
      w1: num("w1", parts[3]),
      w2: num("w2", parts[4]),
      tTotalS: num("T_total_s", parts[5]),
      uTotal: num("U_total", parts[6]),
      objective: num("objective", parts[7]),
      converged: parts[8] === "true",
    });
  }
  const axes = new Set(rows.map((r) => r.axis));
  if (axes.size !== 1) {
    throw new CsvSchemaError(`expected a single swept axis, found: ${[...axes].join(", ")}`);
  }
  return { axis: rows[0].axis, rows };
}
