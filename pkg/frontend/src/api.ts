/** Client for the phase-contrast service API.
 *
 * Binary image payloads are raw little-endian float32 with the array shape
 * in an `X-Dims` header; the first dimension is lateral (x), the second is
 * depth (z).
 */

export interface GridMeta {
  x0: number;
  dx: number;
  nx: number;
  z0: number;
  dz: number;
  nz: number;
}

export interface Meta {
  angles_rad: number[];
  n_angles: number;
  m_max: number;
  grid: GridMeta;
  z_range: [number, number];
  c: number;
  f0: number;
  lambda0: number;
  has_reference: boolean;
}

export interface DpcParams {
  z_s_m: number;
  m: number;
  filter_sigma_m: number;
  ref_correct: boolean;
  enhance_p: number;
  roi?: number[];
}

export interface BinaryImage {
  values: Float32Array;
  dims: number[];
  roiMeanAbs?: number;
}

export interface FocusMapResult {
  rows: Float32Array;
  dims: number[];
  zsList: number[];
}

export function parseDims(header: string | null): number[] {
  if (!header) throw new Error("missing X-Dims header");
  const dims = header.split(",").map((s) => parseInt(s, 10));
  if (dims.some((d) => !Number.isFinite(d) || d <= 0)) {
    throw new Error(`bad X-Dims header: ${header}`);
  }
  return dims;
}

/** Decode a little-endian float32 payload independent of host endianness. */
export function decodeF32(buffer: ArrayBuffer, expected: number): Float32Array {
  if (buffer.byteLength !== expected * 4) {
    throw new Error(
      `payload is ${buffer.byteLength} bytes, expected ${expected * 4}`);
  }
  const view = new DataView(buffer);
  const out = new Float32Array(expected);
  for (let i = 0; i < expected; i++) out[i] = view.getFloat32(4 * i, true);
  return out;
}

async function checkOk(resp: Response): Promise<Response> {
  if (!resp.ok) {
    let detail = `${resp.status}`;
    try {
      const doc = await resp.json();
      if (doc && doc.error) detail = `${resp.status}: ${doc.error}`;
    } catch {
      /* non-JSON error body */
    }
    throw new Error(`request failed (${detail})`);
  }
  return resp;
}

export class ApiClient {
  constructor(private base: string = "") {}

  async meta(): Promise<Meta> {
    const resp = await checkOk(await fetch(`${this.base}/api/meta`));
    return (await resp.json()) as Meta;
  }

  private async binary(resp: Response): Promise<BinaryImage> {
    const dims = parseDims(resp.headers.get("X-Dims"));
    const n = dims.reduce((a, b) => a * b, 1);
    const values = decodeF32(await resp.arrayBuffer(), n);
    const roi = resp.headers.get("X-Roi-Mean-Abs");
    return {
      values,
      dims,
      roiMeanAbs: roi === null ? undefined : parseFloat(roi),
    };
  }

  async dpc(params: DpcParams): Promise<BinaryImage> {
    const resp = await checkOk(await fetch(`${this.base}/api/dpc`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(params),
    }));
    return this.binary(resp);
  }

  async bmode(): Promise<BinaryImage> {
    return this.binary(await checkOk(await fetch(`${this.base}/api/bmode`)));
  }

  async focusmap(n: number): Promise<FocusMapResult> {
    const resp = await checkOk(
      await fetch(`${this.base}/api/focusmap?n=${n}`));
    const img = await this.binary(resp);
    const zsHeader = resp.headers.get("X-Zs-List");
    if (!zsHeader) throw new Error("missing X-Zs-List header");
    const zsList = zsHeader.split(",").map(parseFloat);
    return { rows: img.values, dims: img.dims, zsList };
  }
}
