"""Scratch: end-to-end physics smoke test (not part of the deliverable)."""
import time

import numpy as np

import dpcus
from dpcus import presets

t0 = time.time()
lam = presets.SOUND_SPEED / presets.CENTER_FREQUENCY
print(f"lambda0 = {lam*1e3:.5f} mm")

screen = dpcus.sphere_delay_profile(0.0, 16 * lam, 0.2 * lam / presets.SOUND_SPEED, 0.0)
print("sphere peak delay:", screen.delays.max(), "expect", 0.2 * lam / 1540)

scene = presets.default_scene(aberrator=screen)
field = presets.default_scatterers(scene, seed=7)
print("scatterers:", field.count, f"(t={time.time()-t0:.1f}s)")

rf = dpcus.synthesize_rf(field, screen, scene)
print("rf shape:", rf.samples.shape, "t0:", rf.t0, f"(t={time.time()-t0:.1f}s)")

stack = dpcus.das_beamform(rf, scene.grid)
print("stack done", f"(t={time.time()-t0:.1f}s)")

# single-pair untilted vs compounded
pm = dpcus.pair_phase(stack, 0, 1)
single = dpcus.shear_untilt(pm, pm.theta_c, 0.0)
comp = dpcus.compound_dpc(stack, 1, 0.0)
R = 16 * lam
roi_lobes = (-1.6 * R, 1.6 * R, 8e-3, 30e-3)
sl = dpcus.roi_slices(scene.grid, roi_lobes)
m_single = np.abs(single.values[sl[0], sl[1]])[single.valid[sl[0], sl[1]]].mean()
m_comp = np.abs(comp.values[sl[0], sl[1]])[comp.valid[sl[0], sl[1]]].mean()
print(f"mean|dphi| single={m_single:.4f} comp={m_comp:.4f} ratio={m_comp/m_single:.2f}")

# edge-band ROI (lobes only)
for band in [(0.6, 1.4), (0.7, 1.5), (0.5, 1.5)]:
    lo, hi = band
    sx1 = dpcus.roi_slices(scene.grid, (-hi * R, -lo * R, 8e-3, 30e-3))
    sx2 = dpcus.roi_slices(scene.grid, (lo * R, hi * R, 8e-3, 30e-3))
    ms = 0.5 * (np.abs(single.values[sx1[0], sx1[1]]).mean() + np.abs(single.values[sx2[0], sx2[1]]).mean())
    mc = 0.5 * (np.abs(comp.values[sx1[0], sx1[1]]).mean() + np.abs(comp.values[sx2[0], sx2[1]]).mean())
    print(f"  band {band}: single={ms:.4f} comp={mc:.4f} ratio={mc/ms:.2f}")

# zero-aberration null
scene0 = dpcus.with_aberrator(scene, None)
rf0 = dpcus.synthesize_rf(field, None, scene0)
stack0 = dpcus.das_beamform(rf0, scene0.grid)
comp0 = dpcus.compound_dpc(stack0, 1, 0.0)
m_null = dpcus.roi_mean_abs(comp0, roi_lobes)
print(f"null mean|dphi| = {m_null:.4f}  (vs comp {m_comp:.4f}; ratio {m_comp/m_null:.1f})")

# sign response
rf_neg = dpcus.synthesize_rf(field, screen.scaled(-1.0), scene)
stack_neg = dpcus.das_beamform(rf_neg, scene.grid)
comp_neg = dpcus.compound_dpc(stack_neg, 1, 0.0)
mask = comp.valid & comp_neg.valid
a = comp.values[sl[0], sl[1]][mask[sl[0], sl[1]]]
b = comp_neg.values[sl[0], sl[1]][mask[sl[0], sl[1]]]
r = np.corrcoef(a, b)[0, 1]
print(f"sign-flip pearson r = {r:.3f}  (t={time.time()-t0:.1f}s)")

np.save("/tmp/comp_vals.npy", comp.values)
np.save("/tmp/single_vals.npy", single.values)
print("total", time.time() - t0, "s")
