/** Colormaps: diverging blue-white-red for signed phase (zero = mid-gray
 * white), plain grayscale for dB images. Pure functions so they can be unit
 * tested without a canvas. */

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

/** value in [-1, 1] -> diverging color; negative blue, positive red. */
export function divergingColor(v: number): Rgb {
  const t = Math.max(-1, Math.min(1, v));
  if (t < 0) {
    // blue (-1) to white (0)
    const u = 1 + t;
    return { r: Math.round(lerp(38, 255, u)), g: Math.round(lerp(94, 255, u)), b: Math.round(lerp(211, 255, u)) };
  }
  // white (0) to red (+1)
  return { r: Math.round(lerp(255, 202, t)), g: Math.round(lerp(255, 32, t)), b: Math.round(lerp(255, 38, t)) };
}

/** value in [0, 1] -> grayscale. */
export function grayColor(v: number): Rgb {
  const g = Math.round(255 * Math.max(0, Math.min(1, v)));
  return { r: g, g, b: g };
}

/** Percentile of |values| used as the symmetric color clip. */
export function clipFromPercentile(values: Float32Array, pct: number): number {
  if (values.length === 0) return 1;
  const mags = Array.from(values, Math.abs).sort((a, b) => a - b);
  const idx = Math.min(mags.length - 1,
    Math.max(0, Math.round((pct / 100) * (mags.length - 1))));
  const clip = mags[idx];
  return clip > 0 ? clip : 1;
}

/** Signed image -> RGBA, zero at mid-gray, +-clip at full saturation.
 * `values` is row-major [nx][nz]; output raster is [nz rows][nx cols] so
 * depth runs down the screen. */
export function signedToRgba(values: Float32Array, nx: number, nz: number,
                             clip: number): Uint8ClampedArray {
  const out = new Uint8ClampedArray(4 * nx * nz);
  for (let iz = 0; iz < nz; iz++) {
    for (let ix = 0; ix < nx; ix++) {
      const v = values[ix * nz + iz] / clip;
      const c = divergingColor(v);
      const o = 4 * (iz * nx + ix);
      out[o] = c.r;
      out[o + 1] = c.g;
      out[o + 2] = c.b;
      out[o + 3] = 255;
    }
  }
  return out;
}

/** dB image in [floorDb, 0] -> grayscale RGBA raster. */
export function dbToRgba(values: Float32Array, nx: number, nz: number,
                         floorDb: number): Uint8ClampedArray {
  const out = new Uint8ClampedArray(4 * nx * nz);
  for (let iz = 0; iz < nz; iz++) {
    for (let ix = 0; ix < nx; ix++) {
      const v = 1 - values[ix * nz + iz] / floorDb;
      const c = grayColor(v);
      const o = 4 * (iz * nx + ix);
      out[o] = c.r;
      out[o + 1] = c.g;
      out[o + 2] = c.b;
      out[o + 3] = 255;
    }
  }
  return out;
}
