"""Scratch: null level vs density and vs interpolation scheme."""
import math
import time

import numpy as np
from scipy.signal import hilbert

import dpcus
from dpcus import presets
from dpcus.beamform import BeamformedStack

lam = presets.SOUND_SPEED / presets.CENTER_FREQUENCY
R = 16 * lam


def das_baseband(rf, grid, f_number=1.5):
    """Variant: lerp the demodulated (baseband) analytic signal, re-rotate."""
    scene = rf.scene
    tr = scene.transducer
    elem_x = tr.element_x
    c = scene.medium.c
    fs = tr.fs
    f0 = tr.f0
    n_samp = rf.n_samples
    analytic = hilbert(rf.samples, axis=-1)
    t_samples = rf.t0 + np.arange(n_samp) / fs
    bb = analytic * np.exp(-2j * np.pi * f0 * t_samples)[None, None, :]
    px = np.repeat(grid.x, grid.nz)
    pz = np.tile(grid.z, grid.nx)
    n_pix = px.size
    rx_delay = np.empty((tr.n_elements, n_pix))
    ap_mask = np.empty((tr.n_elements, n_pix), dtype=bool)
    half_ap = pz / (2.0 * f_number)
    for ie in range(tr.n_elements):
        lat = px - elem_x[ie]
        rx_delay[ie] = np.hypot(lat, pz) / c
        ap_mask[ie] = np.abs(lat) <= half_ap
    images = []
    for ia in range(scene.sequence.n_angles):
        theta = scene.sequence.angles[ia]
        tau_e = (px * math.sin(theta) + pz * math.cos(theta)) / c
        acc = np.zeros(n_pix, dtype=complex)
        for ie in range(tr.n_elements):
            mask = ap_mask[ie]
            t_want = tau_e + rx_delay[ie]
            idx = (t_want - rf.t0) * fs
            idx = np.where(mask, idx, 0.0)
            i0 = idx.astype(np.int64)
            w = idx - i0
            tr_e = bb[ia, ie]
            vals = (tr_e[i0] * (1.0 - w) + tr_e[i0 + 1] * w) * np.exp(2j * np.pi * f0 * t_want)
            acc += np.where(mask, vals, 0.0)
        images.append(acc.reshape(grid.nx, grid.nz))
    return BeamformedStack(np.stack(images), grid, scene)


def null_level(density, use_bb):
    scene = presets.default_scene()
    field = presets.default_scatterers(scene, seed=7, density=density)
    t0 = time.time()
    rf = dpcus.synthesize_rf(field, None, scene)
    t1 = time.time()
    stack = das_baseband(rf, scene.grid) if use_bb else dpcus.das_beamform(rf, scene.grid)
    t2 = time.time()
    comp = dpcus.compound_dpc(stack, 1, 0.0)
    f = dpcus.gaussian_filter(comp, 2 * lam)
    roi_l = (-1.5 * R, -0.5 * R, 8e-3, 30e-3)
    roi_r = (0.5 * R, 1.5 * R, 8e-3, 30e-3)
    m0 = 0.5 * (dpcus.roi_mean_abs(f, roi_l) + dpcus.roi_mean_abs(f, roi_r))
    print(f"density={density:.1e} n={field.count} bb={use_bb}: null={m0:.3f} "
          f"(synth {t1-t0:.0f}s, bf {t2-t1:.0f}s)")
    return m0


for d in (8e6, 1.6e7, 2.4e7):
    null_level(d, False)
null_level(8e6, True)
null_level(1.6e7, True)
