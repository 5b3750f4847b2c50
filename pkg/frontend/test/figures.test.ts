/**
 * Figure rendering from a real constrained-run fixture (reduced scale but a
 * genuine sampler output with two prominent modes). Covers the secondary
 * acceptance: two-colour corner plot, heatmap with the XOR quadrant
 * pattern, a 3x3 diagnostic panel, and byte-deterministic regeneration.
 */
import * as fs from "fs";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { readGrid, readReport, readSummary } from "../src/artifacts";
import { renderCorner } from "../src/corner";
import { renderHeatmap } from "../src/heatmap";
import { renderPanel } from "../src/panel";
import { encodePng } from "../src/png";
import { MODE_COLORS, Raster } from "../src/raster";

const RUN = path.join(__dirname, "..", "fixtures", "run");
const CHAIN = path.join(RUN, "chain.csv");
const SUMMARY = path.join(RUN, "run.json");
const TRAIN = path.join(RUN, "train.csv");
const REPORT = path.join(RUN, "analysis", "report.json");
const GRID_FULL = path.join(RUN, "analysis", "grid_full.csv");

function countHues(img: Raster): { reddish: number; blueish: number } {
  let reddish = 0;
  let blueish = 0;
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) {
      const [r, g, b] = img.get(x, y);
      if (r > g + 30 && r > b + 30) reddish++;
      if (b > r + 30 && b > g + 30) blueish++;
    }
  }
  return { reddish, blueish };
}

describe("corner plot", () => {
  it("colours the two prominent modes differently", () => {
    const { pixels, colorByMode } = renderCorner(CHAIN, SUMMARY);
    expect(colorByMode.size).toBe(2);
    const palette = [MODE_COLORS[0], MODE_COLORS[1]];
    expect([...colorByMode.values()]).toEqual(palette);
    const { reddish, blueish } = countHues(pixels);
    expect(reddish).toBeGreaterThan(50);
    expect(blueish).toBeGreaterThan(50);
  });

  it("single-colour variant has one hue family", () => {
    const { pixels } = renderCorner(CHAIN, SUMMARY, "full");
    const { reddish, blueish } = countHues(pixels);
    expect(reddish).toBeGreaterThan(50);
    expect(blueish).toBe(0);
  });

  it("is deterministic", () => {
    const a = renderCorner(CHAIN, SUMMARY).pixels;
    const b = renderCorner(CHAIN, SUMMARY).pixels;
    const bufA = encodePng(a.width, a.height, a.pixels);
    const bufB = encodePng(b.width, b.height, b.pixels);
    expect(bufA.equals(bufB)).toBe(true);
  });

  it("rejects an empty mode filter by name", () => {
    expect(() => renderCorner(CHAIN, SUMMARY, "modes", [999]))
      .toThrow(/cluster 999/);
  });
});

describe("heatmap", () => {
  it("shows the xor quadrant pattern of the underlying grid", () => {
    const grid = readGrid(GRID_FULL);
    const nearest = (vals: number[], target: number) =>
      vals.reduce((best, v, i) => (Math.abs(v - target) < Math.abs(vals[best] - target) ? i : best), 0);
    const cellMean = (x1: number, x2: number) =>
      grid.values[nearest(grid.x1, x1)][nearest(grid.x2, x2)];
    // diagonal cardinals lean to class 1, anti-diagonal to class 0
    expect(cellMean(1, 1)).toBeGreaterThan(0.5);
    expect(cellMean(-1, -1)).toBeGreaterThan(0.5);
    expect(cellMean(1, -1)).toBeLessThan(0.5);
    expect(cellMean(-1, 1)).toBeLessThan(0.5);

    const img = renderHeatmap(GRID_FULL, TRAIN);
    const { reddish, blueish } = countHues(img);
    expect(reddish).toBeGreaterThan(500);
    expect(blueish).toBeGreaterThan(500);
  });

  it("is deterministic", () => {
    const a = renderHeatmap(GRID_FULL, TRAIN);
    const b = renderHeatmap(GRID_FULL, TRAIN);
    expect(encodePng(a.width, a.height, a.pixels)
      .equals(encodePng(b.width, b.height, b.pixels))).toBe(true);
  });
});

describe("diagnostic panel", () => {
  it("lays out three rows by (two modes + full) columns", () => {
    const report = readReport(REPORT);
    const prominent = report.modes.filter((m) => m.mode_id !== null && m.prominent);
    expect(prominent).toHaveLength(2);
    const img = renderPanel(REPORT);
    // column count drives the width: margin + 3 * (column + gap)
    expect(img.width).toBe(56 + 3 * (190 + 14));
    expect(img.height).toBe(26 + 3 * (170 + 14) + 16);
  });

  it("is deterministic", () => {
    const a = renderPanel(REPORT);
    const b = renderPanel(REPORT);
    expect(encodePng(a.width, a.height, a.pixels)
      .equals(encodePng(b.width, b.height, b.pixels))).toBe(true);
  });
});

describe("figures use only artifact inputs", () => {
  it("fixture is a complete artifact set", () => {
    const summary = readSummary(SUMMARY);
    expect(summary.dim).toBe(9);
    for (const p of [TRAIN, REPORT, GRID_FULL]) {
      expect(fs.existsSync(p) || fs.existsSync(p + ".gz")).toBe(true);
    }
  });
});
