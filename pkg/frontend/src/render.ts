/** Canvas painting for the image panes. The numeric work (value -> RGBA)
 * lives in colormap.ts; this file only touches the DOM. */

import { clipFromPercentile, dbToRgba, divergingColor, signedToRgba } from "./colormap.js";
import { GridMeta } from "./api.js";

export function paintSigned(canvas: HTMLCanvasElement, values: Float32Array,
                            nx: number, nz: number, clipPct: number): number {
  const clip = clipFromPercentile(values, clipPct);
  const rgba = signedToRgba(values, nx, nz, clip);
  blit(canvas, rgba, nx, nz);
  return clip;
}

export function paintDb(canvas: HTMLCanvasElement, values: Float32Array,
                        nx: number, nz: number, floorDb = -60): void {
  blit(canvas, dbToRgba(values, nx, nz, floorDb), nx, nz);
}

/** Focus-map rows: [nRows][nx], one raster row per shear depth. */
export function paintRows(canvas: HTMLCanvasElement, rows: Float32Array,
                          nRows: number, nx: number, clipPct: number): void {
  const clip = clipFromPercentile(rows, clipPct);
  const rgba = new Uint8ClampedArray(4 * nRows * nx);
  for (let r = 0; r < nRows; r++) {
    for (let ix = 0; ix < nx; ix++) {
      const c = divergingColor(rows[r * nx + ix] / clip);
      const o = 4 * (r * nx + ix);
      rgba[o] = c.r;
      rgba[o + 1] = c.g;
      rgba[o + 2] = c.b;
      rgba[o + 3] = 255;
    }
  }
  blitRaster(canvas, rgba, nx, nRows);
}

function blit(canvas: HTMLCanvasElement, rgba: Uint8ClampedArray,
              nx: number, nz: number): void {
  blitRaster(canvas, rgba, nx, nz);
}

function blitRaster(canvas: HTMLCanvasElement, rgba: Uint8ClampedArray,
                    width: number, height: number): void {
  canvas.width = width;
  canvas.height = height;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("no 2d context");
  const img = ctx.createImageData(width, height);
  img.data.set(rgba);
  ctx.putImageData(img, 0, 0);
}

export function axisLabel(grid: GridMeta): string {
  const xSpan = (grid.dx * (grid.nx - 1)) * 1e3;
  return `x: ${(grid.x0 * 1e3).toFixed(1)}..${(grid.x0 * 1e3 + xSpan).toFixed(1)} mm, ` +
    `z: ${(grid.z0 * 1e3).toFixed(1)}..${((grid.z0 + grid.dz * (grid.nz - 1)) * 1e3).toFixed(1)} mm`;
}
