# %% [markdown]
# # Differential phase contrast and angular compounding
#
# A thin spherical delay screen (radius 16 wavelengths, peak delay
# 0.2 wavelengths of travel) is applied to the transmit pulses at the
# transducer face. The screen is invisible in B-mode but each pair of
# neighboring tilts sees it as a phase difference downstream. Untilting the
# pair maps by an image shear about the screen depth and summing all six
# pairs boosts the contrast roughly sixfold; a final Gaussian filter
# suppresses the speckle phase noise.

# %%
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import dpcus
from dpcus import presets

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

lam = presets.SOUND_SPEED / presets.CENTER_FREQUENCY
screen = dpcus.sphere_delay_profile(0.0, 16 * lam, 0.2 * lam / presets.SOUND_SPEED,
                                    depth=0.0)
scene = presets.default_scene(aberrator=screen)
field = presets.default_scatterers(scene, seed=7, density=1.6e7)
stack = dpcus.das_beamform(dpcus.synthesize_rf(field, screen, scene), scene.grid)

# %%
pm = dpcus.pair_phase(stack, 0, 1)                      # first tilt pair
tilted = pm.values
untilted = dpcus.shear_untilt(pm, pm.theta_c, 0.0)      # shear about z_s = 0
compounded = dpcus.compound_dpc(stack, 1, 0.0)          # all six pairs
filtered = dpcus.gaussian_filter(compounded, 2 * lam)

roi_l = (-1.5 * 16 * lam, -0.5 * 16 * lam, 8e-3, 30e-3)
roi_r = (0.5 * 16 * lam, 1.5 * 16 * lam, 8e-3, 30e-3)
single_level = 0.5 * (dpcus.roi_mean_abs(dpcus.gaussian_filter(untilted, 2 * lam), roi_l)
                      + dpcus.roi_mean_abs(dpcus.gaussian_filter(untilted, 2 * lam), roi_r))
comp_level = 0.5 * (dpcus.roi_mean_abs(filtered, roi_l)
                    + dpcus.roi_mean_abs(filtered, roi_r))
print(f"shadow-band mean |phase|: single pair {single_level:.3f} rad, "
      f"compounded {comp_level:.3f} rad -> gain {comp_level/single_level:.1f}x")

# %%
g = scene.grid
extent = [g.x0 * 1e3, g.x_max * 1e3, g.z_max * 1e3, g.z0 * 1e3]
panels = [(tilted, "single pair, as beamformed", np.pi / 2),
          (untilted.values, "single pair, untilted", np.pi / 2),
          (compounded.values, "six pairs compounded", 3.0),
          (filtered.values, "after Gaussian filter", 3.0)]
fig, axes = plt.subplots(1, 4, figsize=(16, 5))
for ax, (vals, title, clip) in zip(axes, panels):
    ax.imshow(vals.T, cmap="RdBu_r", vmin=-clip, vmax=clip, extent=extent)
    ax.set_title(title)
    ax.set_xlabel("x (mm)")
axes[0].set_ylabel("z (mm)")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "02_phase_contrast_compounding.png"), dpi=120)
print("wrote output/02_phase_contrast_compounding.png")

# %% [markdown]
# The screen edges cast antisymmetric phase lobes straight down once the
# pair maps are untilted; without untilting each pair's lobes lean along its
# own midline tilt and the sum would blur them away.
