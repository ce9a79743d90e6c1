"""Scratch: seed spread for criteria 1-3 and runs for criteria 6-7."""
import time

import numpy as np

import dpcus
from dpcus import presets

lam = presets.SOUND_SPEED / presets.CENTER_FREQUENCY
R = 16 * lam
DENS = 1.6e7
SIG = 2 * lam
roi_l = (-1.5 * R, -0.5 * R, 8e-3, 30e-3)
roi_r = (0.5 * R, 1.5 * R, 8e-3, 30e-3)
t00 = time.time()


def pipeline(scene, field, screen):
    rf = dpcus.synthesize_rf(field, screen, scene)
    return dpcus.das_beamform(rf, scene.grid)


def crit123(seed):
    screen = dpcus.sphere_delay_profile(0.0, R, 0.2 * lam / presets.SOUND_SPEED, 0.0)
    scene = presets.default_scene(aberrator=screen)
    field = presets.default_scatterers(scene, seed=seed, density=DENS)
    sp = pipeline(scene, field, screen)
    sn = pipeline(scene, field, None)
    sm = pipeline(scene, field, screen.scaled(-1.0))
    pm = dpcus.pair_phase(sp, 0, 1)
    single = dpcus.gaussian_filter(dpcus.shear_untilt(pm, pm.theta_c, 0.0), SIG)
    comp = dpcus.gaussian_filter(dpcus.compound_dpc(sp, 1, 0.0), SIG)
    comp0 = dpcus.gaussian_filter(dpcus.compound_dpc(sn, 1, 0.0), SIG)
    compm = dpcus.gaussian_filter(dpcus.compound_dpc(sm, 1, 0.0), SIG)
    ms = 0.5 * (dpcus.roi_mean_abs(single, roi_l) + dpcus.roi_mean_abs(single, roi_r))
    mc = 0.5 * (dpcus.roi_mean_abs(comp, roi_l) + dpcus.roi_mean_abs(comp, roi_r))
    m0 = 0.5 * (dpcus.roi_mean_abs(comp0, roi_l) + dpcus.roi_mean_abs(comp0, roi_r))
    rep = dpcus.compare_images(comp, compm, (-1.6 * R, 1.6 * R, 8e-3, 30e-3))
    print(f"seed={seed}: ratio={mc/ms:.2f} null={m0:.3f} frac={m0/mc:.2f} "
          f"r={rep.pearson_r:.3f} ({time.time()-t00:.0f}s)")


for seed in (7, 11, 23):
    crit123(seed)

# criterion 6: focus localization, screens at 15 mm and 35 mm
for depth, zhi, tol in ((15e-3, 40e-3, 2e-3), (35e-3, 48e-3, 4e-3)):
    screen = dpcus.sphere_delay_profile(0.0, R, 0.2 * lam / presets.SOUND_SPEED, depth)
    scene = presets.default_scene(aberrator=screen, z_hi=zhi)
    field = presets.default_scatterers(scene, seed=7, density=DENS)
    stack = pipeline(scene, field, screen)
    zs_list = np.arange(2e-3, zhi - 2e-3, 2e-3)
    fmap = dpcus.focus_map(stack, 1, zs_list)
    sharp = dpcus.focus_sharpness(fmap)
    zhat = dpcus.localize_depth(fmap)
    # contrast vs +-20mm offsets
    def s_at(z):
        i = np.argmin(np.abs(zs_list - z))
        return sharp[i]
    s_true = s_at(depth)
    offs = [s_at(depth - 20e-3), s_at(depth + 20e-3)]
    print(f"screen@{depth*1e3:.0f}mm: argmax={zhat*1e3:.1f}mm (tol {tol*1e3:.0f}) "
          f"sharp@true={s_true:.2f} offsets={offs[0]:.2f},{offs[1]:.2f} "
          f"ratios={s_true/offs[0]:.2f},{s_true/offs[1]:.2f} ({time.time()-t00:.0f}s)")

# criterion 7: 0.5% inclusion at 15mm
med = dpcus.MediumConfig(presets.SOUND_SPEED)
incl = dpcus.inclusion_delay_from_sos((0.0, 15e-3), 5e-3, 0.005, med)
scene = presets.default_scene(aberrator=incl)
field = presets.default_scatterers(scene, seed=7, density=DENS)
st_i = pipeline(scene, field, incl)
st_0 = pipeline(scene, field, None)
ci = dpcus.gaussian_filter(dpcus.compound_dpc(st_i, 1, 15e-3), SIG)
c0 = dpcus.gaussian_filter(dpcus.compound_dpc(st_0, 1, 15e-3), SIG)
for roi in [(3e-3, 7e-3, 18e-3, 32e-3), (-7e-3, -3e-3, 18e-3, 32e-3),
            (3.5e-3, 6.5e-3, 17e-3, 30e-3)]:
    sl = dpcus.roi_slices(scene.grid, roi)
    mean_i = ci.values[sl[0], sl[1]][ci.valid[sl[0], sl[1]]].mean()
    std_0 = c0.values[sl[0], sl[1]][c0.valid[sl[0], sl[1]]].std()
    print(f"incl roi {roi}: |mean|={abs(mean_i):.3f} std0={std_0:.3f} "
          f"ratio={abs(mean_i)/std_0:.2f}")
print("total", time.time() - t00)
