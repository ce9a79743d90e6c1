"""Scratch: effect of Gaussian filtering on DPC statistics."""
import time

import numpy as np

import dpcus
from dpcus import presets

t0 = time.time()
lam = presets.SOUND_SPEED / presets.CENTER_FREQUENCY
screen = dpcus.sphere_delay_profile(0.0, 16 * lam, 0.2 * lam / presets.SOUND_SPEED, 0.0)
scene = presets.default_scene(aberrator=screen)
field = presets.default_scatterers(scene, seed=7)

rf = dpcus.synthesize_rf(field, screen, scene)
stack = dpcus.das_beamform(rf, scene.grid)
rf0 = dpcus.synthesize_rf(field, None, scene)
stack0 = dpcus.das_beamform(rf0, scene.grid)
rf_neg = dpcus.synthesize_rf(field, screen.scaled(-1.0), scene)
stack_neg = dpcus.das_beamform(rf_neg, scene.grid)
print(f"sims done t={time.time()-t0:.0f}s")

R = 16 * lam
sig = 2 * lam

pm = dpcus.pair_phase(stack, 0, 1)
single = dpcus.shear_untilt(pm, pm.theta_c, 0.0)
comp = dpcus.compound_dpc(stack, 1, 0.0)
comp0 = dpcus.compound_dpc(stack0, 1, 0.0)
comp_neg = dpcus.compound_dpc(stack_neg, 1, 0.0)

for sigma in (0.0, lam, 2 * lam, 3 * lam):
    f_single = dpcus.gaussian_filter(single, sigma)
    f_comp = dpcus.gaussian_filter(comp, sigma)
    f_comp0 = dpcus.gaussian_filter(comp0, sigma)
    f_neg = dpcus.gaussian_filter(comp_neg, sigma)
    out = [f"sigma={sigma/lam:.0f}lam:"]
    for band in [(0.5, 1.5), (0.6, 1.4)]:
        lo, hi = band
        roi_l = (-hi * R, -lo * R, 8e-3, 30e-3)
        roi_r = (lo * R, hi * R, 8e-3, 30e-3)
        ms = 0.5 * (dpcus.roi_mean_abs(f_single, roi_l) + dpcus.roi_mean_abs(f_single, roi_r))
        mc = 0.5 * (dpcus.roi_mean_abs(f_comp, roi_l) + dpcus.roi_mean_abs(f_comp, roi_r))
        m0 = 0.5 * (dpcus.roi_mean_abs(f_comp0, roi_l) + dpcus.roi_mean_abs(f_comp0, roi_r))
        out.append(f"band{band}: ratio={mc/ms:.2f} null={m0:.3f} comp={mc:.3f} null_frac={m0/mc:.2f}")
    # pearson over full lobes region
    sl = dpcus.roi_slices(scene.grid, (-1.6 * R, 1.6 * R, 8e-3, 30e-3))
    mask = (f_comp.valid & f_neg.valid)[sl[0], sl[1]]
    a = f_comp.values[sl[0], sl[1]][mask]
    b = f_neg.values[sl[0], sl[1]][mask]
    r = np.corrcoef(a, b)[0, 1]
    out.append(f"r(+/-)={r:.3f}")
    print("\n   ".join(out))

print("total", time.time() - t0)
