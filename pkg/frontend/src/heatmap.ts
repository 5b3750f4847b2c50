/**
 * Mean-prediction heatmap with the training points scattered on top.
 * The colour scale is the shared [0, 1] prediction map used by every
 * figure; labelled points render at the scale's extremes.
 *
 * Usage: node dist/heatmap.js --grid grid_full.csv --data train.csv --out heatmap.png
 */

import * as fs from "fs";

import { parseFlags, runMain } from "./args";
import { readDataset, readGrid } from "./artifacts";
import { encodePng } from "./png";
import { AXIS_COLOR, predictionColor, Raster, Scale } from "./raster";

const CELL = 12;
const MARGIN_L = 40;
const MARGIN_B = 26;
const MARGIN_T = 10;
const BAR_W = 14;
const BAR_GAP = 20;

export function renderHeatmap(gridPath: string, dataPath: string): Raster {
  const grid = readGrid(gridPath);
  const data = readDataset(dataPath);
  const n1 = grid.x1.length;
  const n2 = grid.x2.length;
  const spacing1 = n1 > 1 ? grid.x1[1] - grid.x1[0] : 1;
  const spacing2 = n2 > 1 ? grid.x2[1] - grid.x2[0] : 1;

  const plotW = n1 * CELL;
  const plotH = n2 * CELL;
  const width = MARGIN_L + plotW + BAR_GAP + BAR_W + 40;
  const height = MARGIN_T + plotH + MARGIN_B;
  const img = new Raster(width, height);

  // x1 increases to the right, x2 upwards
  const sx = new Scale(grid.x1[0] - spacing1 / 2, grid.x1[n1 - 1] + spacing1 / 2,
                       MARGIN_L, MARGIN_L + plotW);
  const sy = new Scale(grid.x2[0] - spacing2 / 2, grid.x2[n2 - 1] + spacing2 / 2,
                       MARGIN_T + plotH, MARGIN_T);

  for (let i = 0; i < n1; i++) {
    for (let j = 0; j < n2; j++) {
      const x = MARGIN_L + i * CELL;
      const y = MARGIN_T + (n2 - 1 - j) * CELL;
      img.fillRect(x, y, CELL, CELL, predictionColor(grid.values[i][j]));
    }
  }
  img.rect(MARGIN_L, MARGIN_T, plotW, plotH, AXIS_COLOR);

  for (const p of data) {
    const px = sx.apply(p.x1);
    const py = sy.apply(p.x2);
    img.fillCircle(px, py, 3.2, [20, 20, 20]);
    img.fillCircle(px, py, 2.2, p.y === 1 ? predictionColor(1) : predictionColor(0));
  }

  // axis ticks at integer coordinates
  for (let v = Math.ceil(grid.x1[0]); v <= grid.x1[n1 - 1]; v++) {
    const px = sx.apply(v);
    img.line(px, MARGIN_T + plotH, px, MARGIN_T + plotH + 3, AXIS_COLOR);
    img.text(px - 5, MARGIN_T + plotH + 6, String(v), AXIS_COLOR);
  }
  for (let v = Math.ceil(grid.x2[0]); v <= grid.x2[n2 - 1]; v++) {
    const py = sy.apply(v);
    img.line(MARGIN_L - 3, py, MARGIN_L, py, AXIS_COLOR);
    img.text(MARGIN_L - 18, py - 3, String(v), AXIS_COLOR);
  }
  img.text(MARGIN_L + plotW / 2 - 6, height - 10, "X1", AXIS_COLOR);
  img.text(4, MARGIN_T + plotH / 2 - 4, "X2", AXIS_COLOR);

  // shared colour bar, 0 at the bottom
  const barX = MARGIN_L + plotW + BAR_GAP;
  for (let y = 0; y < plotH; y++) {
    const v = 1 - y / (plotH - 1);
    img.fillRect(barX, MARGIN_T + y, BAR_W, 1, predictionColor(v));
  }
  img.rect(barX, MARGIN_T, BAR_W, plotH, AXIS_COLOR);
  img.text(barX + BAR_W + 4, MARGIN_T - 2, "1", AXIS_COLOR);
  img.text(barX + BAR_W + 4, MARGIN_T + plotH - 7, "0", AXIS_COLOR);
  return img;
}

function main(): void {
  const flags = parseFlags(process.argv.slice(2), ["grid", "data", "out"]);
  const img = renderHeatmap(flags.get("grid")!, flags.get("data")!);
  fs.writeFileSync(flags.get("out")!, encodePng(img.width, img.height, img.pixels));
  console.log(`wrote ${flags.get("out")}`);
}

if (require.main === module) {
  runMain(main);
}
