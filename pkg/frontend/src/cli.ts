#!/usr/bin/env node
/**
 * plots --in DIR --out DIR [--figures LIST]
 *
 * Reads results.csv (and traces/, for iteration figures) from the input
 * directory and writes one SVG per requested figure id. Unknown ids,
 * missing inputs or unusable schemas exit nonzero with a message.
 */

import { mkdirSync, writeFileSync } from "fs";
import path from "path";

import { FIGURE_IDS, renderFigure } from "./figures.js";

interface Args {
  inDir: string;
  outDir: string;
  figures: string[];
}

export function parseArgs(argv: string[]): Args {
  let inDir = "";
  let outDir = "";
  let figures: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--in") inDir = argv[++i] ?? "";
    else if (a === "--out") outDir = argv[++i] ?? "";
    else if (a === "--figures") {
      figures = (argv[++i] ?? "").split(",").map((s) => s.trim()).filter(Boolean);
    } else if (a === "--list") {
      figures = ["--list"];
    } else {
      throw new Error(`unknown argument "${a}"`);
    }
  }
  if (figures[0] !== "--list" && (!inDir || !outDir)) {
    throw new Error("usage: plots --in DIR --out DIR [--figures id1,id2] [--list]");
  }
  return { inDir, outDir, figures };
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  if (args.figures[0] === "--list") {
    for (const id of FIGURE_IDS) console.log(id);
    return 0;
  }
  const wanted = args.figures.length > 0 ? args.figures : FIGURE_IDS;
  const unknown = wanted.filter((id) => !FIGURE_IDS.includes(id));
  if (unknown.length > 0) {
    console.error(`error: unknown figure id(s): ${unknown.join(", ")}`);
    return 2;
  }
  let failures = 0;
  mkdirSync(args.outDir, { recursive: true });
  for (const id of wanted) {
    try {
      const svg = renderFigure(id, args.inDir);
      writeFileSync(path.join(args.outDir, `${id}.svg`), svg);
      console.log(`wrote ${id}.svg`);
    } catch (err) {
      console.error(`error: ${id}: ${(err as Error).message}`);
      failures += 1;
    }
  }
  return failures === 0 ? 0 : 1;
}

const isMain = process.argv[1] !== undefined &&
  import.meta.url.endsWith(path.basename(process.argv[1]));
if (isMain) {
  process.exit(run(process.argv.slice(2)));
}
