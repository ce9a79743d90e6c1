/** Wiring: dual-pane display (B-mode + phase contrast), the shear-depth
 * slider, pair-separation and filter controls, and the clickable focus map.
 * All numbers shown are echoed from service responses; the UI itself only
 * colormaps. */

import { ApiClient, BinaryImage, DpcParams, FocusMapResult, Meta } from "./api.js";
import { RequestGate, ViewState, defaultViewState, rowToDepth } from "./state.js";
import { axisLabel, paintDb, paintRows, paintSigned } from "./render.js";

const api = new ApiClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function fmtMm(v: number): string {
  return `${(v * 1e3).toFixed(1)} mm`;
}

async function boot(): Promise<void> {
  const banner = el<HTMLDivElement>("banner");
  let meta: Meta;
  try {
    meta = await api.meta();
  } catch (err) {
    banner.textContent = `service unreachable: ${err} (retrying in 2 s)`;
    banner.style.display = "block";
    setTimeout(boot, 2000);
    return;
  }
  banner.style.display = "none";
  const state = defaultViewState(meta.z_range[0], meta.z_range[1], meta.lambda0);

  const zsSlider = el<HTMLInputElement>("zs");
  zsSlider.min = String(meta.z_range[0]);
  zsSlider.max = String(meta.z_range[1]);
  zsSlider.step = String(meta.grid.dz);
  zsSlider.value = String(state.z_s_m);

  const mSelect = el<HTMLSelectElement>("m");
  for (let m = 1; m <= meta.m_max; m++) {
    const opt = document.createElement("option");
    opt.value = String(m);
    opt.textContent = String(m);
    mSelect.appendChild(opt);
  }
  const sigmaInput = el<HTMLInputElement>("sigma");
  sigmaInput.value = String(state.filter_sigma_m * 1e3);
  const refBox = el<HTMLInputElement>("ref");
  refBox.disabled = !meta.has_reference;
  const enhanceSelect = el<HTMLSelectElement>("enhance");
  const clipInput = el<HTMLInputElement>("clip");
  clipInput.value = String(state.clip_pct);

  el<HTMLSpanElement>("grid-label").textContent = axisLabel(meta.grid);

  // --- B-mode pane (static) ---------------------------------------------
  const bmode = await api.bmode();
  paintDb(el<HTMLCanvasElement>("bmode-pane"), bmode.values,
          meta.grid.nx, meta.grid.nz);

  // --- phase pane: debounced last-write-wins requests --------------------
  const dpcPane = el<HTMLCanvasElement>("dpc-pane");
  const overlay = el<HTMLDivElement>("overlay");
  const gate = new RequestGate<DpcParams, { img: BinaryImage; params: DpcParams }>(
    async (params) => ({ img: await api.dpc(params), params }),
    ({ img, params }) => {
      if (img.dims[0] !== meta.grid.nx || img.dims[1] !== meta.grid.nz) {
        banner.textContent = `dimension mismatch: got ${img.dims.join("x")}, ` +
          `expected ${meta.grid.nx}x${meta.grid.nz}`;
        banner.style.display = "block";
        return;
      }
      const clip = paintSigned(dpcPane, img.values, meta.grid.nx, meta.grid.nz,
                               state.clip_pct);
      overlay.textContent =
        `z_s=${fmtMm(params.z_s_m)}  m=${params.m}  ` +
        `sigma=${fmtMm(params.filter_sigma_m)}  clip=${clip.toFixed(3)} rad` +
        (params.ref_correct ? "  ref-corrected" : "") +
        (params.enhance_p ? `  enhance p=${params.enhance_p}` : "") +
        (img.roiMeanAbs !== undefined
          ? `  ROI mean |phase|=${img.roiMeanAbs.toFixed(3)} rad` : "");
    },
    (err) => {
      banner.textContent = `request failed: ${err} (drag to retry)`;
      banner.style.display = "block";
    },
    { minIntervalMs: 100 },
  );

  const g = meta.grid;
  const roi = [g.x0 + 0.2 * g.dx * g.nx, g.x0 + 0.8 * g.dx * g.nx,
               g.z0 + 0.2 * g.dz * g.nz, g.z0 + 0.8 * g.dz * g.nz];

  function push(): void {
    banner.style.display = "none";
    gate.request({
      z_s_m: state.z_s_m,
      m: state.m,
      filter_sigma_m: state.filter_sigma_m,
      ref_correct: state.ref_correct,
      enhance_p: state.enhance_p,
      roi,
    });
    el<HTMLSpanElement>("zs-label").textContent = fmtMm(state.z_s_m);
  }

  zsSlider.addEventListener("input", () => {
    state.z_s_m = parseFloat(zsSlider.value);
    push();
  });
  mSelect.addEventListener("change", () => {
    state.m = parseInt(mSelect.value, 10);
    push();
  });
  sigmaInput.addEventListener("change", () => {
    state.filter_sigma_m = parseFloat(sigmaInput.value) * 1e-3;
    push();
  });
  refBox.addEventListener("change", () => {
    state.ref_correct = refBox.checked;
    push();
  });
  enhanceSelect.addEventListener("change", () => {
    state.enhance_p = parseInt(enhanceSelect.value, 10);
    push();
  });
  clipInput.addEventListener("change", () => {
    state.clip_pct = parseFloat(clipInput.value);
    push();
  });

  // --- focus map pane -----------------------------------------------------
  const fmapPane = el<HTMLCanvasElement>("focusmap-pane");
  let fmap: FocusMapResult | null = null;
  el<HTMLButtonElement>("focusmap-refresh").addEventListener("click", async () => {
    try {
      fmap = await api.focusmap(48);
      paintRows(fmapPane, fmap.rows, fmap.dims[0], fmap.dims[1], state.clip_pct);
    } catch (err) {
      banner.textContent = `focus map failed: ${err}`;
      banner.style.display = "block";
    }
  });
  fmapPane.addEventListener("click", (ev) => {
    if (!fmap) return;
    const rect = fmapPane.getBoundingClientRect();
    const row = ((ev.clientY - rect.top) / rect.height) * fmap.dims[0];
    state.z_s_m = rowToDepth(row - 0.5, fmap.zsList);
    zsSlider.value = String(state.z_s_m);
    push();
  });

  push();
}

boot();
