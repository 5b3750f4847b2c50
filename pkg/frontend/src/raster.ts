/** Tiny software canvas: everything the three figure kinds need. */

import { GLYPH_H, GLYPH_W, glyphFor } from "./font";

export type Rgb = [number, number, number];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8Array;

  constructor(width: number, height: number, background: Rgb = [255, 255, 255]) {
    this.width = width;
    this.height = height;
    this.pixels = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.pixels[i * 4] = background[0];
      this.pixels[i * 4 + 1] = background[1];
      this.pixels[i * 4 + 2] = background[2];
      this.pixels[i * 4 + 3] = 255;
    }
  }

  set(x: number, y: number, rgb: Rgb, alpha = 1): void {
    x = Math.round(x);
    y = Math.round(y);
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    const a = Math.max(0, Math.min(1, alpha));
    this.pixels[i] = Math.round(rgb[0] * a + this.pixels[i] * (1 - a));
    this.pixels[i + 1] = Math.round(rgb[1] * a + this.pixels[i + 1] * (1 - a));
    this.pixels[i + 2] = Math.round(rgb[2] * a + this.pixels[i + 2] * (1 - a));
    this.pixels[i + 3] = 255;
  }

  get(x: number, y: number): Rgb {
    const i = (y * this.width + x) * 4;
    return [this.pixels[i], this.pixels[i + 1], this.pixels[i + 2]];
  }

  fillRect(x0: number, y0: number, w: number, h: number, rgb: Rgb, alpha = 1): void {
    for (let y = Math.max(0, Math.floor(y0)); y < Math.min(this.height, y0 + h); y++) {
      for (let x = Math.max(0, Math.floor(x0)); x < Math.min(this.width, x0 + w); x++) {
        this.set(x, y, rgb, alpha);
      }
    }
  }

  fillCircle(cx: number, cy: number, r: number, rgb: Rgb, alpha = 1): void {
    for (let y = Math.floor(cy - r); y <= cy + r; y++) {
      for (let x = Math.floor(cx - r); x <= cx + r; x++) {
        if ((x - cx) ** 2 + (y - cy) ** 2 <= r * r) this.set(x, y, rgb, alpha);
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, rgb: Rgb, alpha = 1): void {
    let ix0 = Math.round(x0);
    let iy0 = Math.round(y0);
    const ix1 = Math.round(x1);
    const iy1 = Math.round(y1);
    const dx = Math.abs(ix1 - ix0);
    const dy = -Math.abs(iy1 - iy0);
    const sx = ix0 < ix1 ? 1 : -1;
    const sy = iy0 < iy1 ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(ix0, iy0, rgb, alpha);
      if (ix0 === ix1 && iy0 === iy1) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ix0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        iy0 += sy;
      }
    }
  }

  rect(x0: number, y0: number, w: number, h: number, rgb: Rgb): void {
    this.line(x0, y0, x0 + w - 1, y0, rgb);
    this.line(x0, y0 + h - 1, x0 + w - 1, y0 + h - 1, rgb);
    this.line(x0, y0, x0, y0 + h - 1, rgb);
    this.line(x0 + w - 1, y0, x0 + w - 1, y0 + h - 1, rgb);
  }

  text(x: number, y: number, s: string, rgb: Rgb, scale = 1): void {
    let cx = x;
    for (const ch of s) {
      const rows = glyphFor(ch);
      for (let gy = 0; gy < GLYPH_H; gy++) {
        for (let gx = 0; gx < GLYPH_W; gx++) {
          if (rows[gy] & (1 << (GLYPH_W - 1 - gx))) {
            this.fillRect(cx + gx * scale, y + gy * scale, scale, scale, rgb);
          }
        }
      }
      cx += (GLYPH_W + 1) * scale;
    }
  }

  textWidth(s: string, scale = 1): number {
    return s.length * (GLYPH_W + 1) * scale;
  }
}

/** Linear map from data coordinates to pixel coordinates. */
export class Scale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly p0: number,
    readonly p1: number,
  ) {}

  apply(v: number): number {
    if (this.d1 === this.d0) return (this.p0 + this.p1) / 2;
    return this.p0 + ((v - this.d0) / (this.d1 - this.d0)) * (this.p1 - this.p0);
  }
}

/** Shared prediction colour map on [0, 1]: class 0 blue, class 1 red. */
export function predictionColor(v: number): Rgb {
  const t = Math.max(0, Math.min(1, v));
  if (t < 0.5) {
    const s = t / 0.5;
    return [Math.round(40 + 215 * s), Math.round(80 + 175 * s), 255];
  }
  const s = (t - 0.5) / 0.5;
  return [255, Math.round(255 - 175 * s), Math.round(255 - 215 * s)];
}

/** Mode colours, stable across every figure (index by sorted leaf order). */
export const MODE_COLORS: Rgb[] = [
  [214, 39, 40],    // red
  [31, 119, 180],   // blue
  [44, 160, 44],    // green
  [255, 127, 14],   // orange
  [148, 103, 189],  // purple
  [140, 86, 75],    // brown
  [227, 119, 194],  // pink
  [127, 127, 127],  // grey
  [188, 189, 34],   // olive
  [23, 190, 207],   // cyan
];

export const FULL_COLOR: Rgb = [178, 24, 43];
export const AXIS_COLOR: Rgb = [40, 40, 40];
