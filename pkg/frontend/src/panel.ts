/**
 * Mode-comparison diagnostic panel, three rows by (modes + full) columns:
 * per-point mean log-likelihood strips for train and pooled test (dots are
 * the per-sample values, bars the mean, whiskers the extremes, with the
 * full-solution means overlaid across all columns), local log-evidence
 * bars, and the per-column prediction grids on the shared colour scale.
 *
 * Usage: node dist/panel.js --report analysis/report.json --out panel.png
 *        [--grids analysis]
 */

import * as fs from "fs";
import * as path from "path";

import { parseFlags, runMain } from "./args";
import { LogLikBlock, ModeEntry, readGrid, readReport } from "./artifacts";
import { encodePng } from "./png";
import { AXIS_COLOR, FULL_COLOR, MODE_COLORS, predictionColor, Raster, Rgb, Scale } from "./raster";

const COL_W = 190;
const ROW_H = 170;
const MARGIN_L = 56;
const MARGIN_T = 26;
const GAP = 14;

function jitter(i: number): number {
  // deterministic pseudo-jitter in [0, 1)
  return (Math.imul(i + 1, 2654435761) >>> 0) / 2 ** 32;
}

function strip(
  img: Raster,
  x: number,
  w: number,
  scale: Scale,
  block: LogLikBlock,
  color: Rgb,
): void {
  for (let i = 0; i < block.values.length; i++) {
    const px = x + 2 + jitter(i) * (w - 4);
    img.set(px, scale.apply(block.values[i]), color, 0.25);
  }
  const mid = x + w / 2;
  img.line(mid, scale.apply(block.min), mid, scale.apply(block.max), AXIS_COLOR);
  img.line(x + 3, scale.apply(block.mean), x + w - 3, scale.apply(block.mean), AXIS_COLOR);
  img.line(x + 3, scale.apply(block.mean) + 1, x + w - 3, scale.apply(block.mean) + 1, AXIS_COLOR);
}

function dashed(img: Raster, x0: number, x1: number, y: number, color: Rgb): void {
  for (let x = x0; x < x1; x += 6) {
    img.line(x, y, Math.min(x + 3, x1), y, color, 0.9);
  }
}

export function renderPanel(reportPath: string, gridDir?: string): Raster {
  const report = readReport(reportPath);
  const dir = gridDir ?? path.dirname(reportPath);
  const columns: ModeEntry[] = [
    ...report.modes.filter((m) => m.mode_id !== null && m.prominent),
    ...report.modes.filter((m) => m.mode_id === null),
  ];
  if (columns.length === 0 || columns[columns.length - 1].mode_id !== null) {
    throw new Error("report has no full-posterior entry");
  }
  const full = columns[columns.length - 1];
  const colColor = (k: number): Rgb =>
    columns[k].mode_id === null ? FULL_COLOR : MODE_COLORS[k % MODE_COLORS.length];

  const width = MARGIN_L + columns.length * (COL_W + GAP);
  const height = MARGIN_T + 3 * (ROW_H + GAP) + 16;
  const img = new Raster(width, height);

  // shared log-likelihood scale over every block in the figure
  const blocks: LogLikBlock[] = [];
  for (const m of columns) {
    blocks.push(m.train, m.test_pooled);
  }
  const llLo = Math.min(...blocks.map((b) => b.min));
  const llHi = Math.max(...blocks.map((b) => b.max));
  const pad = 0.05 * (llHi - llLo || 1);

  // shared log-evidence scale
  const zVals = columns.map((m) => m.log_z_local);
  const zLo = Math.min(...zVals);
  const zHi = Math.max(...zVals);
  const zPad = 0.15 * (zHi - zLo || 1);

  for (let k = 0; k < columns.length; k++) {
    const m = columns[k];
    const x0 = MARGIN_L + k * (COL_W + GAP);
    const title = m.mode_id === null ? "FULL" : `MODE ${k + 1}`;
    img.text(x0 + COL_W / 2 - img.textWidth(title) / 2, 8, title, colColor(k));

    // row 1: <log L> strips, train left, pooled test right
    const y1 = MARGIN_T;
    img.rect(x0, y1, COL_W, ROW_H, AXIS_COLOR);
    const ll = new Scale(llLo - pad, llHi + pad, y1 + ROW_H - 4, y1 + 4);
    const half = COL_W / 2;
    strip(img, x0 + 4, half - 8, ll, m.train, colColor(k));
    strip(img, x0 + half + 4, half - 8, ll, m.test_pooled, colColor(k));
    dashed(img, x0 + 2, x0 + half - 2, ll.apply(full.train.mean), FULL_COLOR);
    dashed(img, x0 + half + 2, x0 + COL_W - 2, ll.apply(full.test_pooled.mean), FULL_COLOR);
    img.text(x0 + 10, y1 + ROW_H - 12, "TRAIN", AXIS_COLOR);
    img.text(x0 + half + 10, y1 + ROW_H - 12, "TEST", AXIS_COLOR);

    // row 2: local log-evidence bar
    const y2 = MARGIN_T + ROW_H + GAP;
    img.rect(x0, y2, COL_W, ROW_H, AXIS_COLOR);
    const zs = new Scale(zLo - zPad, zHi + zPad, y2 + ROW_H - 4, y2 + 4);
    const barTop = zs.apply(m.log_z_local);
    img.fillRect(x0 + COL_W / 3, barTop, COL_W / 3, y2 + ROW_H - 2 - barTop, colColor(k), 0.85);
    img.text(x0 + 8, y2 + 6, `LOGZ ${m.log_z_local.toFixed(2)}`, AXIS_COLOR);

    // row 3: prediction grid
    const y3 = MARGIN_T + 2 * (ROW_H + GAP);
    if (!m.grid_file) throw new Error(`report entry for ${title} carries no grid_file`);
    const grid = readGrid(path.join(dir, m.grid_file));
    const n1 = grid.x1.length;
    const n2 = grid.x2.length;
    const cw = Math.max(1, Math.floor(COL_W / n1));
    const ch = Math.max(1, Math.floor(ROW_H / n2));
    const gx = x0 + Math.floor((COL_W - cw * n1) / 2);
    const gy = y3 + Math.floor((ROW_H - ch * n2) / 2);
    for (let i = 0; i < n1; i++) {
      for (let j = 0; j < n2; j++) {
        img.fillRect(gx + i * cw, gy + (n2 - 1 - j) * ch, cw, ch,
                     predictionColor(grid.values[i][j]));
      }
    }
    img.rect(gx, gy, cw * n1, ch * n2, AXIS_COLOR);
  }

  img.text(4, MARGIN_T + ROW_H / 2 - 4, "<LOGL>", AXIS_COLOR);
  img.text(4, MARGIN_T + ROW_H + GAP + ROW_H / 2 - 4, "LOGZ", AXIS_COLOR);
  img.text(4, MARGIN_T + 2 * (ROW_H + GAP) + ROW_H / 2 - 4, "PRED", AXIS_COLOR);
  return img;
}

function main(): void {
  const flags = parseFlags(process.argv.slice(2), ["report", "out"], ["grids"]);
  const img = renderPanel(flags.get("report")!, flags.get("grids"));
  fs.writeFileSync(flags.get("out")!, encodePng(img.width, img.height, img.pixels));
  console.log(`wrote ${flags.get("out")}`);
}

if (require.main === module) {
  runMain(main);
}
