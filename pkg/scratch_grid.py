"""Scratch: null/ratio/r over (density, f-number, filter sigma)."""
import time

import numpy as np

import dpcus
from dpcus import presets

lam = presets.SOUND_SPEED / presets.CENTER_FREQUENCY
R = 16 * lam
roi_l = (-1.5 * R, -0.5 * R, 8e-3, 30e-3)
roi_r = (0.5 * R, 1.5 * R, 8e-3, 30e-3)


def run(density, fnum):
    screen = dpcus.sphere_delay_profile(0.0, R, 0.2 * lam / presets.SOUND_SPEED, 0.0)
    scene = presets.default_scene(aberrator=screen)
    field = presets.default_scatterers(scene, seed=7, density=density)
    t0 = time.time()
    rf_pos = dpcus.synthesize_rf(field, screen, scene)
    rf_nul = dpcus.synthesize_rf(field, None, scene)
    stack_pos = dpcus.das_beamform(rf_pos, scene.grid, f_number=fnum)
    stack_nul = dpcus.das_beamform(rf_nul, scene.grid, f_number=fnum)
    dt = time.time() - t0
    pm = dpcus.pair_phase(stack_pos, 0, 1)
    single = dpcus.shear_untilt(pm, pm.theta_c, 0.0)
    comp = dpcus.compound_dpc(stack_pos, 1, 0.0)
    comp0 = dpcus.compound_dpc(stack_nul, 1, 0.0)
    for sig_lam in (2.0, 3.0):
        s = sig_lam * lam
        fs_ = dpcus.gaussian_filter(single, s)
        fc = dpcus.gaussian_filter(comp, s)
        f0_ = dpcus.gaussian_filter(comp0, s)
        ms = 0.5 * (dpcus.roi_mean_abs(fs_, roi_l) + dpcus.roi_mean_abs(fs_, roi_r))
        mc = 0.5 * (dpcus.roi_mean_abs(fc, roi_l) + dpcus.roi_mean_abs(fc, roi_r))
        m0 = 0.5 * (dpcus.roi_mean_abs(f0_, roi_l) + dpcus.roi_mean_abs(f0_, roi_r))
        print(f"  d={density:.1e} f#={fnum} sig={sig_lam:.0f}lam: "
              f"ratio={mc/ms:.2f} comp={mc:.3f} null={m0:.3f} frac={m0/mc:.2f} ({dt:.0f}s)")


for fnum in (1.5, 1.0):
    for d in (8e6, 1.6e7):
        run(d, fnum)
run(2.4e7, 1.0)
