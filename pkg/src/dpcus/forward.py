"""Paraxial wave-acoustic forward model for the differential phase image of
a thin delay screen.

For a field point at lateral position x and depth z below the screen, the
predicted phase is

    dphi(x, z) = arg[ integral W(x, z, x_c)
                      * exp(-pi^2 theta_d^2 kappa_sigma^2 (x - x_c)^2)
                      * exp(-i 2 pi theta_d kappa_0 (x - x_c)) dx_c ]

where the weighting

    W = (1 / phi_k) * exp[-(pi^2 / phi_k^2) (psi_r - psi_a)^2]

compares the ray direction from the screen point to the field point,
psi_r = (x - x_c) / z, with the ray direction set by the local screen slope,
psi_a = c * dtau_a/dx(x_c). The coherence parameter phi_k sets how much the
two may disagree; as phi_k -> 0 the weighting collapses onto psi_r = psi_a
and the model becomes ray-acoustic.

The quadrature is a uniform trapezoid rule per depth row, on a lattice
aligned with the pixel grid. The node step resolves both the screen sampling
and the W width (which shrinks linearly with z); the integration window is
wide enough that the truncated tails are below double precision, so a zero
or constant screen yields an exactly flat phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import AberratorProfile, ImageGrid, Scene, SceneError, PARAXIAL_LIMIT_RAD
from .dpc import DpcImage

# Gaussian tails are dropped beyond this many standard deviations:
# exp(-8.6^2 / 2) ~ 8e-17, i.e. below double-precision resolution.
TAIL_SIGMAS = 8.6

# Nodes per standard deviation of the W weighting in u = x - x_c.
NODES_PER_W_SIGMA = 2.5

RAY_LIMIT_PHI = 1e-3


class QuadratureError(RuntimeError):
    """Raised when doubling the node density still moves the result."""


@dataclass(frozen=True)
class ForwardParams:
    """Pulse and geometry constants of the forward model: wavenumber average
    kappa0 = nu0/c, wavenumber spread kappa_sigma = nu_sigma/c, tilt-pair
    separation theta_d, coherence parameter phi_kappa, background SoS c."""

    kappa0: float
    kappa_sigma: float
    theta_d: float
    phi_kappa: float
    c: float

    def __post_init__(self):
        if min(self.kappa0, self.kappa_sigma, self.theta_d,
               self.phi_kappa, self.c) <= 0:
            raise SceneError("forward parameters must be positive")
        if not self.phi_kappa < 1:
            raise SceneError("phi_kappa must be in (0, 1)")
        if self.theta_d > PARAXIAL_LIMIT_RAD:
            raise SceneError("theta_d exceeds paraxial limit")


def params_from_scene(scene: Scene, m: int = 1,
                      phi_kappa: float = 0.05) -> ForwardParams:
    """Forward-model constants matching a pipeline scene's pulse and tilt
    spacing (pair separation taken from the first pair at separation m)."""
    tr = scene.transducer
    c = scene.medium.c
    return ForwardParams(kappa0=tr.f0 / c, kappa_sigma=tr.bandwidth_sigma / c,
                         theta_d=scene.sequence.theta_d(0, m),
                         phi_kappa=phi_kappa, c=c)


@dataclass(frozen=True)
class ComparisonReport:
    """Pearson correlation and sign agreement between two images on a ROI."""

    pearson_r: float
    sign_agreement: float
    roi: tuple

    def __post_init__(self):
        if not -1.0 <= self.pearson_r <= 1.0:
            raise SceneError("correlation outside [-1, 1]")
        if not 0.0 <= self.sign_agreement <= 1.0:
            raise SceneError("sign agreement outside [0, 1]")


def _screen_slope_interp(profile: AberratorProfile, c: float):
    """c * dtau_a/dx on the profile grid (central differences), as a callable
    that is zero outside the screen support."""
    psi = c * np.gradient(profile.delays, profile.spacing)

    def psi_at(x):
        return np.interp(x, profile.xs, psi, left=0.0, right=0.0)

    return psi_at, float(np.abs(psi).max())


def _row_phase(x_pix: np.ndarray, z_rel: float, psi_at, psi_max: float,
               params: ForwardParams, dx_pix: float, refine: int = 1) -> np.ndarray:
    """Evaluate the forward integral for one depth row.

    Quadrature nodes are x_c = x_pixel - u with u on a lattice of step
    dx_pix / k, so the node positions for every pixel live on one shared
    lattice and the screen slope is interpolated only once per row.
    """
    th_d = params.theta_d
    k0 = params.kappa0
    ks = params.kappa_sigma
    phi_k = params.phi_kappa

    sigma_env = 1.0 / (math.sqrt(2.0) * math.pi * th_d * ks)
    sigma_w_u = phi_k * z_rel / (math.pi * math.sqrt(2.0))
    lam0 = 1.0 / k0

    h_target = min(lam0 / 8.0, sigma_w_u / NODES_PER_W_SIGMA) / refine
    k = max(1, int(math.ceil(dx_pix / h_target)))
    h = dx_pix / k

    u_reach_env = TAIL_SIGMAS * sigma_env
    u_reach_w = z_rel * (psi_max + TAIL_SIGMAS * phi_k / (math.pi * math.sqrt(2.0)))
    u_reach = min(u_reach_env, u_reach_w)
    q = max(2, int(math.ceil(u_reach / h)))
    m_nodes = 2 * q + 1
    u = (np.arange(m_nodes) - q) * h

    env = np.exp(-(math.pi * th_d * ks) ** 2 * u * u) \
        * np.exp(-2j * math.pi * th_d * k0 * u)
    wt = np.full(m_nodes, h)
    wt[0] = wt[-1] = 0.5 * h
    e_vec = env * wt

    # shared lattice of screen positions x_pixel - u
    nx = x_pix.size
    t0 = x_pix[0] - u[-1]
    n_lattice = (nx - 1) * k + m_nodes
    lattice = t0 + h * np.arange(n_lattice)
    psi_vec = psi_at(lattice)
    idx = (np.arange(nx) * k)[:, None] + (2 * q - np.arange(m_nodes))[None, :]
    psi_mat = psi_vec[idx]

    d = u[None, :] / z_rel - psi_mat
    w_mat = np.exp(-(math.pi / phi_k) ** 2 * d * d) / phi_k
    integral = w_mat @ e_vec
    phi = np.angle(integral)
    return np.where(phi == -np.pi, np.pi, phi)


def eval_forward_dpc(aberrator: AberratorProfile, params: ForwardParams,
                     grid: ImageGrid, check_convergence: bool = True,
                     tol: float = 1e-3) -> DpcImage:
    """Predicted differential-phase image for a screen and a pixel grid.

    The grid uses absolute depths; rows are re-referenced internally to the
    screen plane and must all lie strictly below it. The screen must be
    sampled at least at lambda0/4. With ``check_convergence`` the quadrature
    is repeated at doubled node density and the run fails if any pixel moves
    by more than ``tol`` radians (the denser result is returned).

    Adding a constant to tau_a cannot change the result: only the screen
    slope enters.
    """
    lam0 = 1.0 / params.kappa0
    if aberrator.spacing > lam0 / 4.0 * (1.0 + 1e-9):
        raise SceneError("screen sampling coarser than lambda0/4")
    z_rel = grid.z - aberrator.depth
    if z_rel.min() <= 0:
        raise SceneError("grid rows must lie strictly below the screen depth")

    psi_at, psi_max = _screen_slope_interp(aberrator, params.c)
    x_pix = grid.x

    def run(refine: int) -> np.ndarray:
        out = np.empty(grid.shape)
        for iz in range(grid.nz):
            out[:, iz] = _row_phase(x_pix, float(z_rel[iz]), psi_at, psi_max,
                                    params, grid.dx, refine=refine)
        return out

    base = run(1)
    values = base
    if check_convergence:
        dense = run(2)
        delta = np.angle(np.exp(1j * (dense - base)))
        if np.abs(delta).max() > tol:
            raise QuadratureError(
                f"quadrature not converged: max change {np.abs(delta).max():.2e} rad")
        values = dense
    return DpcImage(values, grid, z_s=aberrator.depth, m=1,
                    provenance="forward-model")


def ray_limit_dpc(aberrator: AberratorProfile, params: ForwardParams,
                  grid: ImageGrid, check_convergence: bool = True) -> DpcImage:
    """Ray-acoustic limit: same integral with phi_kappa at a small floor,
    where W approaches a selector of psi_r = psi_a."""
    ray_params = ForwardParams(params.kappa0, params.kappa_sigma,
                               params.theta_d, RAY_LIMIT_PHI, params.c)
    return eval_forward_dpc(aberrator, ray_params, grid,
                            check_convergence=check_convergence)


def compare_images(a: DpcImage, b: DpcImage, roi: tuple) -> ComparisonReport:
    """Pearson correlation and sign-agreement fraction over a rectangular ROI
    (x_lo, x_hi, z_lo, z_hi), restricted to pixels valid in both images."""
    from .dpc import roi_slices

    if a.grid != b.grid:
        raise SceneError("images on different grids")
    sx, sz = roi_slices(a.grid, roi)
    mask = a.valid[sx, sz] & b.valid[sx, sz]
    if not mask.any():
        raise SceneError("ROI contains no valid pixels")
    va = a.values[sx, sz][mask]
    vb = b.values[sx, sz][mask]
    if va.std() == 0.0 or vb.std() == 0.0:
        raise SceneError("zero variance in ROI")
    r = float(np.corrcoef(va, vb)[0, 1])
    nz = (va != 0.0) & (vb != 0.0)
    agree = float(np.mean(np.sign(va[nz]) == np.sign(vb[nz]))) if nz.any() else 0.0
    return ComparisonReport(r, agree, tuple(float(v) for v in roi))
