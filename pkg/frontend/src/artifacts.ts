/**
 * Typed readers for the sampler's exported files: chain CSV, run summary
 * JSON, analysis report JSON, prediction-grid CSV and dataset CSV.
 * Gzipped variants (``*.gz``) load transparently.
 */

import * as fs from "fs";
import * as zlib from "zlib";

export interface ChainPoint {
  weight: number;
  logL: number;
  cluster: number;
  theta: number[];
}

export interface ClusterInfo {
  id: number;
  parent: number | null;
  log_z_local: number | null;
  log_z_local_err: number;
  n_dead: number;
  n_live_final: number;
  is_leaf: boolean;
}

export interface RunSummary {
  run_id: string;
  log_z: number;
  log_z_err: number;
  h: number;
  dim: number;
  clusters: ClusterInfo[];
  [key: string]: unknown;
}

export interface LogLikBlock {
  mean: number;
  min: number;
  max: number;
  values: number[];
}

export interface ModeEntry {
  mode_id: number | null;
  log_z_local: number;
  weight_share: number;
  prominent: boolean;
  n_samples: number;
  train: LogLikBlock;
  test_pooled: LogLikBlock;
  grid_file?: string;
  grid_spec: { x1_min: number; x2_min: number; spacing: number; n1: number; n2: number };
}

export interface Report {
  run_id: string;
  prominence_ratio: number;
  modes: ModeEntry[];
  [key: string]: unknown;
}

export interface Grid {
  x1: number[]; // sorted unique axis values
  x2: number[];
  values: number[][]; // [i][j] over (x1, x2)
}

export interface LabelledPoint {
  x1: number;
  x2: number;
  y: number;
}

export function readText(path: string): string {
  const raw = fs.readFileSync(path);
  if (path.endsWith(".gz")) {
    return zlib.gunzipSync(raw).toString("utf8");
  }
  return raw.toString("utf8");
}

/** Resolve ``path`` or, failing that, ``path + ".gz"``. */
export function resolveArtifact(path: string): string {
  if (fs.existsSync(path)) return path;
  if (fs.existsSync(path + ".gz")) return path + ".gz";
  throw new Error(`missing artifact: ${path}`);
}

function splitCsv(text: string, expectedHeader: string[], path: string): string[][] {
  const lines = text.trim().split("\n").map((l) => l.replace(/\r$/, ""));
  const header = lines[0].split(",");
  for (let i = 0; i < expectedHeader.length; i++) {
    if (header[i] !== expectedHeader[i]) {
      throw new Error(
        `unexpected column ${i} in ${path}: got "${header[i]}", want "${expectedHeader[i]}"`);
    }
  }
  return lines.slice(1).map((line) => line.split(","));
}

export function readChain(path: string): ChainPoint[] {
  const file = resolveArtifact(path);
  const rows = splitCsv(readText(file), ["weight", "log_l", "cluster"], file);
  return rows.map((row) => ({
    weight: Number(row[0]),
    logL: Number(row[1]),
    cluster: Number(row[2]),
    theta: row.slice(3).map(Number),
  }));
}

export function readSummary(path: string): RunSummary {
  const doc = JSON.parse(readText(resolveArtifact(path)));
  if (!Array.isArray(doc.clusters) || typeof doc.log_z !== "number") {
    throw new Error(`${path} does not look like a run summary`);
  }
  return doc as RunSummary;
}

export function readReport(path: string): Report {
  const doc = JSON.parse(readText(resolveArtifact(path)));
  if (!Array.isArray(doc.modes)) {
    throw new Error(`${path} does not look like a mode report`);
  }
  return doc as Report;
}

export function readGrid(path: string): Grid {
  const file = resolveArtifact(path);
  const rows = splitCsv(readText(file), ["x1", "x2", "mean_y"], file);
  const x1 = Array.from(new Set(rows.map((r) => Number(r[0])))).sort((a, b) => a - b);
  const x2 = Array.from(new Set(rows.map((r) => Number(r[1])))).sort((a, b) => a - b);
  const index1 = new Map(x1.map((v, i) => [v, i]));
  const index2 = new Map(x2.map((v, i) => [v, i]));
  const values = x1.map(() => x2.map(() => NaN));
  for (const r of rows) {
    values[index1.get(Number(r[0]))!][index2.get(Number(r[1]))!] = Number(r[2]);
  }
  for (const row of values) {
    for (const v of row) {
      if (Number.isNaN(v)) throw new Error(`${path}: grid is not a full lattice`);
    }
  }
  return { x1, x2, values };
}

export function readDataset(path: string): LabelledPoint[] {
  const file = resolveArtifact(path);
  const rows = splitCsv(readText(file), ["x1", "x2", "y"], file);
  return rows.map((r) => ({ x1: Number(r[0]), x2: Number(r[1]), y: Number(r[2]) }));
}

/** Leaves within the prominence ratio of the best leaf, best first. */
export function prominentLeaves(summary: RunSummary, ratio = 1e-3): number[] {
  const leaves = summary.clusters.filter((c) => c.is_leaf && c.log_z_local !== null);
  if (leaves.length === 0) throw new Error("run summary has no leaf clusters");
  const top = Math.max(...leaves.map((c) => c.log_z_local as number));
  return leaves
    .filter((c) => (c.log_z_local as number) >= top + Math.log(ratio))
    .sort((a, b) => (b.log_z_local as number) - (a.log_z_local as number))
    .map((c) => c.id);
}
