"""Scratch: structure of the zero-aberration null."""
import time

import numpy as np

import dpcus
from dpcus import presets

lam = presets.SOUND_SPEED / presets.CENTER_FREQUENCY
R = 16 * lam


def analyze(density, seed=7):
    scene = presets.default_scene()
    field = presets.default_scatterers(scene, seed=seed, density=density)
    rf = dpcus.synthesize_rf(field, None, scene)
    stack = dpcus.das_beamform(rf, scene.grid)
    comp = dpcus.compound_dpc(stack, 1, 0.0)
    pm0 = dpcus.shear_untilt(dpcus.pair_phase(stack, 0, 1), scene.sequence.theta_c(0, 1), 0.0)
    pm3 = dpcus.shear_untilt(dpcus.pair_phase(stack, 3, 1), scene.sequence.theta_c(3, 1), 0.0)
    f2 = dpcus.gaussian_filter(comp, 2 * lam)
    f3 = dpcus.gaussian_filter(comp, 3 * lam)
    for roi_name, roi in [("8-20mm", (-1.5 * R, 1.5 * R, 8e-3, 20e-3)),
                          ("20-30mm", (-1.5 * R, 1.5 * R, 20e-3, 30e-3)),
                          ("8-30mm", (-1.5 * R, 1.5 * R, 8e-3, 30e-3))]:
        sl = dpcus.roi_slices(scene.grid, roi)
        v2 = f2.values[sl[0], sl[1]]
        v3 = f3.values[sl[0], sl[1]]
        p0 = pm0.values[sl[0], sl[1]]
        p3 = pm3.values[sl[0], sl[1]]
        pair_r = np.corrcoef(p0.ravel(), p3.ravel())[0, 1]
        print(f"  d={density:.0e} {roi_name}: filt2 mean|v|={np.abs(v2).mean():.3f} "
              f"signed={v2.mean():+.3f} | filt3 mean|v|={np.abs(v3).mean():.3f} "
              f"signed={v3.mean():+.3f} | pair0 raw={np.abs(p0).mean():.3f} "
              f"r(pair0,pair3)={pair_r:.2f}")


t0 = time.time()
analyze(8e6)
analyze(2.4e7)
analyze(5e7)
print("t =", time.time() - t0)
