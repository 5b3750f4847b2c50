/**
 * Corner plot of the input-to-hidden weight block from a chain file:
 * pairwise scatter panels over (w11, w12, w21, w22), coloured per prominent
 * mode (or single-coloured with --style full), point opacity following the
 * posterior weight column.
 *
 * Usage: node dist/corner.js --chain chain.csv --summary run.json --out corner.png
 *        [--style modes|full] [--modes id,id,...]
 */

import * as fs from "fs";

import { parseFlags, runMain } from "./args";
import { prominentLeaves, readChain, readSummary } from "./artifacts";
import { encodePng } from "./png";
import { AXIS_COLOR, FULL_COLOR, MODE_COLORS, Raster, Rgb, Scale } from "./raster";

const PARAMS = [0, 1, 2, 3];
const LABELS = ["W11", "W12", "W21", "W22"];
const PANEL = 150;
const GAP = 10;
const MARGIN = 46;
const BOUND = 5.0;

export function renderCorner(
  chainPath: string,
  summaryPath: string,
  style: "modes" | "full" = "modes",
  modeFilter: number[] | null = null,
): { pixels: Raster; colorByMode: Map<number, Rgb> } {
  const chain = readChain(chainPath);
  const summary = readSummary(summaryPath);
  const prominent = prominentLeaves(summary);

  let selected = prominent;
  if (modeFilter !== null) {
    selected = modeFilter;
    const present = new Set(chain.map((p) => p.cluster));
    for (const id of selected) {
      if (!present.has(id)) {
        throw new Error(`mode filter is empty: no chain points carry cluster ${id}`);
      }
    }
  }

  const colorByMode = new Map<number, Rgb>();
  selected.forEach((id, i) => colorByMode.set(id, MODE_COLORS[i % MODE_COLORS.length]));

  const n = PARAMS.length - 1; // 3x3 lower-triangle layout
  const side = MARGIN + n * PANEL + (n - 1) * GAP + 14;
  const img = new Raster(side, side);

  const wMax = Math.max(...chain.map((p) => p.weight));
  const keep = chain.filter((p) =>
    style === "full" || colorByMode.has(p.cluster));

  for (let row = 0; row < n; row++) {
    for (let col = 0; col <= row; col++) {
      const iy = PARAMS[row + 1];
      const ix = PARAMS[col];
      const x0 = MARGIN + col * (PANEL + GAP);
      const y0 = 8 + row * (PANEL + GAP);
      img.rect(x0, y0, PANEL, PANEL, AXIS_COLOR);
      const sx = new Scale(-BOUND, BOUND, x0 + 1, x0 + PANEL - 2);
      const sy = new Scale(-BOUND, BOUND, y0 + PANEL - 2, y0 + 1);
      for (const p of keep) {
        const alpha = Math.min(1, 0.05 + 0.95 * Math.sqrt(p.weight / wMax));
        if (alpha < 0.02) continue;
        const color = style === "full" ? FULL_COLOR : colorByMode.get(p.cluster)!;
        img.set(sx.apply(p.theta[ix]), sy.apply(p.theta[iy]), color, alpha);
      }
      if (row === n - 1) {
        img.text(x0 + PANEL / 2 - img.textWidth(LABELS[col]) / 2, side - 12,
                 LABELS[col], AXIS_COLOR);
      }
      if (col === 0) {
        img.text(4, y0 + PANEL / 2 - 4, LABELS[row + 1], AXIS_COLOR);
      }
    }
  }
  return { pixels: img, colorByMode };
}

function main(): void {
  const flags = parseFlags(process.argv.slice(2),
    ["chain", "summary", "out"], ["style", "modes"]);
  const style = (flags.get("style") ?? "modes") as "modes" | "full";
  if (style !== "modes" && style !== "full") {
    throw new Error(`--style must be "modes" or "full", got "${style}"`);
  }
  const modeFilter = flags.has("modes")
    ? flags.get("modes")!.split(",").map((s) => Number(s.trim()))
    : null;
  const { pixels } = renderCorner(flags.get("chain")!, flags.get("summary")!,
                                  style, modeFilter);
  fs.writeFileSync(flags.get("out")!,
                   encodePng(pixels.width, pixels.height, pixels.pixels));
  console.log(`wrote ${flags.get("out")}`);
}

if (require.main === module) {
  runMain(main);
}
