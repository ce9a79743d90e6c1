"""Scratch: receive apodization effect on pair coherence noise."""
import math
import time

import numpy as np
from scipy.signal import hilbert

import dpcus
from dpcus import presets
from dpcus.beamform import BeamformedStack

lam = presets.SOUND_SPEED / presets.CENTER_FREQUENCY
R = 16 * lam


def das_apod(rf, grid, f_number=1.5, window="hann"):
    scene = rf.scene
    tr = scene.transducer
    elem_x = tr.element_x
    c = scene.medium.c
    fs = tr.fs
    n_samp = rf.n_samples
    analytic = hilbert(rf.samples, axis=-1)
    px = np.repeat(grid.x, grid.nz)
    pz = np.tile(grid.z, grid.nx)
    n_pix = px.size
    half_ap = pz / (2.0 * f_number)
    rx_delay = np.empty((tr.n_elements, n_pix))
    apod = np.empty((tr.n_elements, n_pix))
    for ie in range(tr.n_elements):
        lat = px - elem_x[ie]
        rx_delay[ie] = np.hypot(lat, pz) / c
        u = np.abs(lat) / half_ap
        if window == "hann":
            apod[ie] = np.where(u <= 1.0, 0.5 * (1 + np.cos(np.pi * u)), 0.0)
        else:
            apod[ie] = (u <= 1.0).astype(float)
    images = []
    for ia in range(scene.sequence.n_angles):
        theta = scene.sequence.angles[ia]
        tau_e = (px * math.sin(theta) + pz * math.cos(theta)) / c
        acc = np.zeros(n_pix, dtype=complex)
        for ie in range(tr.n_elements):
            w_ap = apod[ie]
            idx = (tau_e + rx_delay[ie] - rf.t0) * fs
            i0 = idx.astype(np.int64)
            w = idx - i0
            tr_e = analytic[ia, ie]
            vals = tr_e[i0] * (1.0 - w) + tr_e[i0 + 1] * w
            acc += w_ap * vals
        images.append(acc.reshape(grid.nx, grid.nz))
    return BeamformedStack(np.stack(images), grid, scene)


def run(density, window, fnum=1.5):
    screen = dpcus.sphere_delay_profile(0.0, R, 0.2 * lam / presets.SOUND_SPEED, 0.0)
    scene = presets.default_scene(aberrator=screen)
    field = presets.default_scatterers(scene, seed=7, density=density)
    rf_pos = dpcus.synthesize_rf(field, screen, scene)
    rf_nul = dpcus.synthesize_rf(field, None, scene)
    sp = das_apod(rf_pos, scene.grid, fnum, window)
    sn = das_apod(rf_nul, scene.grid, fnum, window)
    pm = dpcus.pair_phase(sp, 0, 1)
    single = dpcus.shear_untilt(pm, pm.theta_c, 0.0)
    comp = dpcus.compound_dpc(sp, 1, 0.0)
    comp0 = dpcus.compound_dpc(sn, 1, 0.0)
    pm0 = dpcus.pair_phase(sn, 0, 1)
    roi_l = (-1.5 * R, -0.5 * R, 8e-3, 30e-3)
    roi_r = (0.5 * R, 1.5 * R, 8e-3, 30e-3)
    raw_pair_null = dpcus.roi_mean_abs(dpcus.shear_untilt(pm0, pm0.theta_c, 0.0), roi_l)
    for sig_lam in (2.0, 3.0):
        s = sig_lam * lam
        fs_ = dpcus.gaussian_filter(single, s)
        fc = dpcus.gaussian_filter(comp, s)
        f0_ = dpcus.gaussian_filter(comp0, s)
        ms = 0.5 * (dpcus.roi_mean_abs(fs_, roi_l) + dpcus.roi_mean_abs(fs_, roi_r))
        mc = 0.5 * (dpcus.roi_mean_abs(fc, roi_l) + dpcus.roi_mean_abs(fc, roi_r))
        m0 = 0.5 * (dpcus.roi_mean_abs(f0_, roi_l) + dpcus.roi_mean_abs(f0_, roi_r))
        print(f"  d={density:.0e} {window} f#{fnum} sig={sig_lam:.0f}lam: ratio={mc/ms:.2f} "
              f"comp={mc:.3f} null={m0:.3f} frac={m0/mc:.2f} pair_raw_null={raw_pair_null:.3f}")


t0 = time.time()
run(8e6, "rect")
run(8e6, "hann")
run(1.6e7, "hann")
run(8e6, "hann", fnum=1.2)
print("t =", time.time() - t0)
