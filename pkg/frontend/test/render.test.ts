import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { parseSweepCsv } from "../src/csv.js";
import { render, renderPanel } from "../src/render.js";
import { main } from "../src/cli.js";

const FIXTURE = path.join(__dirname, "..", "fixtures", "sweep.csv");

let tmp: string;
beforeEach(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "charts-"));
});
afterEach(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

describe("render", () => {
  it("writes three images for panel=all", () => {
    const written = render({ csvPath: FIXTURE, panel: "all", outDir: tmp });
    expect(written.length).toBe(3);
    for (const file of written) {
      expect(fs.existsSync(file)).toBe(true);
      const svg = fs.readFileSync(file, "utf8");
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
    }
    expect(written.map((f) => path.basename(f))).toEqual([
      "sweep_T.svg",
      "sweep_U.svg",
      "sweep_objective.svg",
    ]);
  });

  it("reruns byte-identically", () => {
    const a = render({ csvPath: FIXTURE, panel: "all", outDir: path.join(tmp, "a") });
    const b = render({ csvPath: FIXTURE, panel: "all", outDir: path.join(tmp, "b") });
    for (let i = 0; i < a.length; i++) {
      expect(fs.readFileSync(a[i])).toEqual(fs.readFileSync(b[i]));
    }
  });

  it("writes nothing when the CSV is corrupted", () => {
    const bad = path.join(tmp, "bad.csv");
    fs.writeFileSync(bad, fs.readFileSync(FIXTURE, "utf8").replace("U_total", "uu"));
    expect(() => render({ csvPath: bad, panel: "all", outDir: path.join(tmp, "out") })).toThrow();
    expect(fs.existsSync(path.join(tmp, "out"))).toBe(false);
  });

  it("writes nothing for an empty CSV", () => {
    const empty = path.join(tmp, "empty.csv");
    fs.writeFileSync(empty, "");
    expect(() => render({ csvPath: empty, panel: "T", outDir: path.join(tmp, "out") })).toThrow();
    expect(fs.existsSync(path.join(tmp, "out"))).toBe(false);
  });

  it("draws one legend entry per method line", () => {
    const table = parseSweepCsv(fs.readFileSync(FIXTURE, "utf8"));
    const svg = renderPanel(table, "objective");
    for (const label of [
      "proposed (0.3,0.7)",
      "proposed (0.5,0.5)",
      "proposed (0.7,0.3)",
      "equal (0.5,0.5)",
      "random (0.5,0.5)",
    ]) {
      expect(svg).toContain(label);
    }
    expect(svg).toContain("p_total_dbm");
  });
});

describe("cli", () => {
  it("renders all panels by default", () => {
    expect(main([FIXTURE, "--out-dir", tmp])).toBe(0);
    expect(fs.readdirSync(tmp).sort()).toEqual([
      "sweep_T.svg",
      "sweep_U.svg",
      "sweep_objective.svg",
    ]);
  });

  it("renders a single panel", () => {
    expect(main([FIXTURE, "--panel", "U", "--out-dir", tmp])).toBe(0);
    expect(fs.readdirSync(tmp)).toEqual(["sweep_U.svg"]);
  });

  it("rejects unknown panels", () => {
    expect(main([FIXTURE, "--panel", "X", "--out-dir", tmp])).toBe(1);
  });

  it("fails cleanly on a missing file", () => {
    expect(main([path.join(tmp, "nope.csv"), "--out-dir", tmp])).toBe(1);
  });

  it("fails cleanly on a corrupted header", () => {
    const bad = path.join(tmp, "bad.csv");
    fs.writeFileSync(bad, fs.readFileSync(FIXTURE, "utf8").replace("axis,", "sixa,"));
    expect(main([bad, "--out-dir", tmp])).toBe(1);
  });
});
