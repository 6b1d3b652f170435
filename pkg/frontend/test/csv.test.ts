import * as fs from "node:fs";
import * as path from "node:path";
import { describe, expect, it } from "vitest";

import { CsvSchemaError, parseSweepCsv } from "../src/csv.js";

const FIXTURE = path.join(__dirname, "..", "fixtures", "sweep.csv");

describe("parseSweepCsv", () => {
  it("parses the bundled sweep", () => {
    const table = parseSweepCsv(fs.readFileSync(FIXTURE, "utf8"));
    expect(table.axis).toBe("p_total_dbm");
    expect(table.rows.length).toBe(15);
    const methods = new Set(table.rows.map((r) => r.method));
    expect(methods).toEqual(new Set(["equal", "proposed", "random"]));
    expect(table.rows[0].converged).toBe(true);
  });

  it("rejects an empty document", () => {
    expect(() => parseSweepCsv("")).toThrow(CsvSchemaError);
  });

  it("rejects a header-only document", () => {
    const header = fs.readFileSync(FIXTURE, "utf8").split("\n")[0];
    expect(() => parseSweepCsv(header + "\n")).toThrow(/no data rows/);
  });

  it("names the missing column on a corrupted header", () => {
    const text = fs.readFileSync(FIXTURE, "utf8").replace("objective", "objectivo");
    expect(() => parseSweepCsv(text)).toThrow(/missing column.*objective/);
  });

  it("rejects reordered headers", () => {
    const lines = fs.readFileSync(FIXTURE, "utf8").split("\n");
    const cols = lines[0].split(",");
    [cols[0], cols[1]] = [cols[1], cols[0]];
    lines[0] = cols.join(",");
    expect(() => parseSweepCsv(lines.join("\n"))).toThrow(/does not match/);
  });

  it("rejects short rows", () => {
    const lines = fs.readFileSync(FIXTURE, "utf8").trimEnd().split("\n");
    lines.push("p_total_dbm,30.0,equal");
    expect(() => parseSweepCsv(lines.join("\n"))).toThrow(/malformed/);
  });

  it("rejects non-numeric values", () => {
    const text = fs.readFileSync(FIXTURE, "utf8").replace("24.0", "abc");
    expect(() => parseSweepCsv(text)).toThrow(/non-numeric/);
  });
});
