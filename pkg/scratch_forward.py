"""Scratch: forward model checks + independent dense-quadrature oracle."""
import time

import numpy as np

import dpcus
from dpcus import presets

lam = presets.SOUND_SPEED / presets.CENTER_FREQUENCY
C = presets.SOUND_SPEED
t0 = time.time()

params = dpcus.ForwardParams(kappa0=1 / lam, kappa_sigma=0.25 / lam,
                             theta_d=0.0698, phi_kappa=0.05, c=C)
grid = presets.default_grid()


def oracle_phase(profile, params, x, z_rel, step_frac=64.0, halfwidth=40e-3):
    """Independent direct trapezoid evaluation at one point (dense)."""
    lam0 = 1.0 / params.kappa0
    xc = np.arange(x - halfwidth, x + halfwidth, lam0 / step_frac)
    dtau = np.gradient(profile.delays, profile.spacing)
    psi = np.interp(xc, profile.xs, params.c * dtau, left=0.0, right=0.0)
    u = x - xc
    w = np.exp(-(np.pi / params.phi_kappa) ** 2 * (u / z_rel - psi) ** 2) / params.phi_kappa
    env = np.exp(-(np.pi * params.theta_d * params.kappa_sigma) ** 2 * u ** 2
                 - 2j * np.pi * params.theta_d * params.kappa0 * u)
    val = np.trapezoid(w * env, xc)
    return np.angle(val)


# 1. zero / constant screens -> exactly flat
zero = dpcus.AberratorProfile(0.0, np.linspace(-5e-3, 5e-3, 300), np.zeros(300))
img0 = dpcus.eval_forward_dpc(zero, params, grid)
const = dpcus.constant_delay_profile(-5e-3, 5e-3, 1e-7, 0.0, lam / 8)
imgc = dpcus.eval_forward_dpc(const, params, grid)
print(f"zero screen max|dphi| = {np.abs(img0.values).max():.2e}")
print(f"const screen max|dphi| = {np.abs(imgc.values).max():.2e}")

# 2. Gaussian profile (waist 16lam, peak 2lam/c): odd symmetry + oracle
gauss = dpcus.gauss_delay_profile(0.0, 16 * lam, 2 * lam / C, 0.0)
img = dpcus.eval_forward_dpc(gauss, params, grid)
# odd symmetry about x=0: grid x symmetric?
x = grid.x
ix = np.argmin(np.abs(x))
print("x center:", x[ix])
k = min(ix, grid.nx - 1 - ix)
left = img.values[ix - k:ix, :]
right = img.values[ix + 1:ix + k + 1, :][::-1, :]
print(f"odd symmetry max err = {np.abs(left + right).max():.2e}")

# oracle comparison on a probe row
iz = np.argmin(np.abs(grid.z - 20e-3))
z_rel = grid.z[iz]
probe_ix = np.arange(10, grid.nx - 10, 16)
err = []
for i in probe_ix:
    o = oracle_phase(gauss, params, x[i], z_rel)
    err.append(abs(np.angle(np.exp(1j * (img.values[i, iz] - o)))))
print(f"oracle max err @z=20mm = {max(err):.2e}  (t={time.time()-t0:.0f}s)")

# peak lobe on that row (dense oracle scan)
xs_dense = np.linspace(-8e-3, 8e-3, 161)
row = np.array([oracle_phase(gauss, params, xx, z_rel) for xx in xs_dense])
imax = np.argmax(row)
imin = np.argmin(row)
print(f"oracle row z=20mm: max {row[imax]:.4f} @ {xs_dense[imax]*1e3:.2f}mm, "
      f"min {row[imin]:.4f} @ {xs_dense[imin]*1e3:.2f}mm")

# 3. TV smoothing with phi_kappa
tv = {}
for pk in (0.05, 0.1):
    p2 = dpcus.ForwardParams(params.kappa0, params.kappa_sigma, params.theta_d, pk, C)
    im2 = dpcus.eval_forward_dpc(gauss, p2, grid, check_convergence=False)
    tv[pk] = np.abs(np.diff(im2.values, axis=0)).sum()
print(f"TV @phi=0.05: {tv[0.05]:.1f}, @phi=0.1: {tv[0.1]:.1f} (should not increase)")

# 4. ray-limit sweep on a linear ramp
slope = 0.05  # psi_a = c * dtau/dx = slope
ramp_xs = np.arange(-20e-3, 20e-3, lam / 8)
ramp = dpcus.AberratorProfile(0.0, ramp_xs, slope * ramp_xs / C)
small = dpcus.ImageGrid(x0=-2e-3, dx=lam / 2, nx=32, z0=10e-3, dz=1e-3, nz=4)
vals = {}
for pk in (0.2, 0.1, 0.05, 0.02):
    p2 = dpcus.ForwardParams(params.kappa0, params.kappa_sigma, params.theta_d, pk, C)
    im2 = dpcus.eval_forward_dpc(ramp, p2, small, check_convergence=False)
    vals[pk] = im2.values[16, 0]
ray = dpcus.ray_limit_dpc(ramp, params, small, check_convergence=False)
pred = -2 * np.pi * params.theta_d * params.kappa0 * slope * small.z[0]
print("ray sweep center values:", {k: f"{v:.4f}" for k, v in vals.items()},
      f"ray-limit={ray.values[16,0]:.4f} analytic={pred:.4f}")
print(f"total t={time.time()-t0:.0f}s")
