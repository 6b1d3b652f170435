#!/usr/bin/env node
/** plot <csv> [--panel T|U|objective|all] [--out-dir <dir>] */

import { CsvSchemaError } from "./csv.js";
import { Panel, PANELS, render } from "./render.js";

function usage(): string {
  return "usage: plot <sweep.csv> [--panel T|U|objective|all] [--out-dir <dir>]";
}

export function main(argv: string[]): number {
  let csvPath: string | undefined;
  let panel: Panel | "all" = "all";
  let outDir = ".";
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--panel") {
      const value = argv[++i];
      if (value !== "all" && !PANELS.includes(value as Panel)) {
        console.error(`unknown panel ${value}; expected ${PANELS.join("|")}|all`);
        return 1;
      }
      panel = value as Panel | "all";
    } else if (arg === "--out-dir") {
      outDir = argv[++i];
      if (!outDir) {
        console.error(usage());
        return 1;
      }
    } else if (arg === "--help" || arg === "-h") {
      console.log(usage());
      return 0;
    } else if (!csvPath && !arg.startsWith("-")) {
      csvPath = arg;
    } else {
      console.error(`unexpected argument ${arg}\n${usage()}`);
      return 1;
    }
  }
  if (!csvPath) {
    console.error(usage());
    return 1;
  }
  try {
    const written = render({ csvPath, panel, outDir });
    for (const file of written) {
      console.log(`wrote ${file}`);
    }
    return 0;
  } catch (err) {
    if (err instanceof CsvSchemaError) {
      console.error(`schema error: ${err.message}`);
    } else if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`cannot read ${csvPath}`);
    } else {
      console.error(String(err));
    }
    return 1;
  }
}

const invokedDirectly = process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
