"""Differential phase contrast: pairwise phase maps, shear untilting about a
chosen depth, angular compounding, filtering, reference correction, focus
scanning over shear depth, nonlinear-enhanced transverse integration, and
C-mode assembly.

The pair map is arg[B_n conj(B_{n+m})]; untilting shears each map so that
the pair's shadow direction (its midline tilt) becomes vertical, which lets
all pairs add coherently. The shear pivot depth z_s acts as a focus knob:
contrast is maximal when z_s matches the aberrator depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.ndimage import convolve1d

from .beamform import BeamformedStack, ScalarImage
from .domain import ImageGrid, SceneError, PARAXIAL_LIMIT_RAD


def wrap_phase(phi: np.ndarray) -> np.ndarray:
    """Wrap radians into the half-open interval (-pi, pi]."""
    out = np.angle(np.exp(1j * np.asarray(phi, dtype=float)))
    return np.where(out == -np.pi, np.pi, out)


@dataclass(frozen=True)
class PhasePairMap:
    """Phase difference arg[B_n conj(B_{n+m})] for one tilt pair."""

    values: np.ndarray
    grid: ImageGrid
    pair: tuple
    theta_c: float
    theta_d: float
    valid: Optional[np.ndarray] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise SceneError("map shape does not match grid")
        if v.size and (v.min() <= -np.pi or v.max() > np.pi):
            raise SceneError("pair phase outside (-pi, pi]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        mask = np.ones(self.grid.shape, dtype=bool) if self.valid is None \
            else np.asarray(self.valid, dtype=bool)
        mask.setflags(write=False)
        object.__setattr__(self, "valid", mask)


@dataclass(frozen=True)
class DpcImage:
    """Compounded differential-phase image for a shear depth z_s."""

    values: np.ndarray
    grid: ImageGrid
    z_s: float
    m: int
    provenance: str = "pipeline"
    valid: Optional[np.ndarray] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise SceneError("image shape does not match grid")
        if not np.all(np.isfinite(v)):
            raise SceneError("non-finite DPC values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        mask = np.ones(self.grid.shape, dtype=bool) if self.valid is None \
            else np.asarray(self.valid, dtype=bool)
        mask.setflags(write=False)
        object.__setattr__(self, "valid", mask)


@dataclass(frozen=True)
class FocusMap:
    """Depth projections of the DPC image for a scan of shear depths.

    ``rows[i]`` is the signed integral over z of the compounded image with
    z_s = zs_list[i]; stacking rows over the scan yields the shear-depth vs
    x localization map.
    """

    rows: np.ndarray
    zs_list: np.ndarray
    grid: ImageGrid

    def __post_init__(self):
        r = np.asarray(self.rows, dtype=float)
        zs = np.asarray(self.zs_list, dtype=float)
        if r.ndim != 2 or r.shape[0] != zs.size or r.shape[1] != self.grid.nx:
            raise SceneError("focus map shape mismatch")
        if zs.size >= 2 and not np.all(np.diff(zs) > 0):
            raise SceneError("zs_list must be strictly increasing")
        r.setflags(write=False)
        zs.setflags(write=False)
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "zs_list", zs)


@dataclass(frozen=True)
class CModeImage:
    """Per-y extended-depth projections stacked into an x-y image."""

    values: np.ndarray
    ys: np.ndarray
    z_s: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if v.ndim != 2 or v.shape[0] != ys.size:
            raise SceneError("c-mode shape mismatch")
        v.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "ys", ys)


def pair_phase(stack: BeamformedStack, n: int, m: int) -> PhasePairMap:
    """Pointwise arg[B_n conj(B_{n+m})]; n is 0-based, 0 <= n < N - m.

    arg(0) is taken as 0 so empty regions contribute no phase.
    """
    seq = stack.scene.sequence
    n_angles = seq.n_angles
    if not (1 <= m <= n_angles - 1):
        raise SceneError("pair separation m must be in [1, N-1]")
    if not (0 <= n < n_angles - m):
        raise SceneError("pair index n out of range")
    prod = stack.images[n] * np.conj(stack.images[n + m])
    phi = np.angle(prod)
    phi = np.where(phi == -np.pi, np.pi, phi)
    return PhasePairMap(phi, stack.grid, (n, m),
                        seq.theta_c(n, m), seq.theta_d(n, m))


def _shear_values(values: np.ndarray, valid: np.ndarray, grid: ImageGrid,
                  theta_c: float, z_s: float) -> tuple:
    """Resample each row at x + theta_c (z - z_s); out-of-bounds reads give 0
    and clear the validity mask. The pivot row (z = z_s) is copied bit-exactly
    because its shift is exactly zero."""
    nx, nz = grid.nx, grid.nz
    shift_px = theta_c * (grid.z - z_s) / grid.dx          # (nz,)
    src = np.arange(nx)[:, None] + shift_px[None, :]       # (nx, nz)
    i0 = np.floor(src).astype(np.int64)
    w = src - i0
    i1 = i0 + 1
    ok0 = (i0 >= 0) & (i0 <= nx - 1)
    ok1 = (i1 >= 0) & (i1 <= nx - 1)
    i0c = np.clip(i0, 0, nx - 1)
    i1c = np.clip(i1, 0, nx - 1)
    cols = np.broadcast_to(np.arange(nz)[None, :], (nx, nz))
    v0 = np.where(ok0, values[i0c, cols], 0.0)
    v1 = np.where(ok1, values[i1c, cols], 0.0)
    out = (1.0 - w) * v0 + np.where(w > 0.0, w * v1, 0.0)
    m0 = ok0 & valid[i0c, cols]
    m1 = ok1 & valid[i1c, cols]
    out_valid = m0 & np.where(w > 0.0, m1, True)
    out = np.where(out_valid, out, 0.0)  # partially-read pixels carry nothing
    return out, out_valid


def shear_untilt(img: Union[PhasePairMap, DpcImage, ScalarImage],
                 theta_c: float, z_s: float):
    """Shear the image about depth z_s so direction theta_c becomes vertical.

    Returns the same type as the input. Out-of-bounds source pixels read as
    zero and are excluded from the validity mask.
    """
    if abs(theta_c) > PARAXIAL_LIMIT_RAD:
        raise SceneError("shear angle exceeds paraxial limit")
    out, out_valid = _shear_values(img.values, img.valid, img.grid, theta_c, z_s)
    if isinstance(img, PhasePairMap):
        return PhasePairMap(out, img.grid, img.pair, img.theta_c, img.theta_d,
                            valid=out_valid)
    if isinstance(img, DpcImage):
        return DpcImage(out, img.grid, img.z_s, img.m, img.provenance,
                        valid=out_valid)
    return ScalarImage(out, img.grid, valid=out_valid)


def compound_dpc(stack: BeamformedStack, m: int, z_s: float) -> DpcImage:
    """Angular compounding: sum of untilted pair maps over n = 0..N-m-1.

    Validity masks of the individual untilted maps are intersected.
    """
    seq = stack.scene.sequence
    if not (1 <= m <= seq.n_angles - 1):
        raise SceneError("pair separation m must be in [1, N-1]")
    total = np.zeros(stack.grid.shape)
    valid = np.ones(stack.grid.shape, dtype=bool)
    for n in range(seq.n_angles - m):
        pm = pair_phase(stack, n, m)
        sheared = shear_untilt(pm, pm.theta_c, z_s)
        total = total + sheared.values
        valid &= sheared.valid
    return DpcImage(total, stack.grid, z_s, m, "pipeline", valid=valid)


def _axis_kernel(sigma_px: float) -> np.ndarray:
    radius = int(math.ceil(3.0 * sigma_px))
    i = np.arange(-radius, radius + 1)
    k = np.exp(-0.5 * (i / sigma_px) ** 2)
    return k / k.sum()


def gaussian_filter(img: Union[DpcImage, ScalarImage], sigma: float):
    """Separable Gaussian blur with physical sigma (meters) on both axes.

    The kernel is truncated at 3 sigma and renormalized near the image edges
    (zero padding divided by the in-bounds kernel mass), so a constant image
    stays constant. sigma = 0 returns the image unchanged.
    """
    if sigma < 0:
        raise SceneError("sigma must be >= 0")
    if sigma == 0.0:
        return img
    g = img.grid
    out = img.values.astype(float)
    norm = np.ones(g.shape)
    for axis, step in ((0, g.dx), (1, g.dz)):
        sigma_px = sigma / step
        if sigma_px < 1e-9:
            continue
        k = _axis_kernel(sigma_px)
        out = convolve1d(out, k, axis=axis, mode="constant", cval=0.0)
        norm = convolve1d(norm, k, axis=axis, mode="constant", cval=0.0)
    out = out / norm
    if isinstance(img, DpcImage):
        return DpcImage(out, g, img.z_s, img.m, img.provenance, valid=img.valid)
    return ScalarImage(out, g, valid=img.valid)


def subtract_reference(img: DpcImage, ref: DpcImage) -> DpcImage:
    """Elementwise img - ref; both must share grid, z_s and m."""
    if img.grid != ref.grid:
        raise SceneError("grid mismatch between image and reference")
    if img.z_s != ref.z_s or img.m != ref.m:
        raise SceneError("z_s / m mismatch between image and reference")
    return DpcImage(img.values - ref.values, img.grid, img.z_s, img.m,
                    "reference-corrected", valid=img.valid & ref.valid)


def enhance_integrate(img: DpcImage, p: int = 3) -> ScalarImage:
    """Raise values to the odd power p (sign-preserving edge sharpening) and
    cumulatively integrate along x."""
    if p < 1 or p % 2 == 0:
        raise SceneError("enhancement power must be odd and >= 1")
    boosted = img.values ** p
    integ = np.cumsum(boosted, axis=0) * img.grid.dx
    return ScalarImage(integ, img.grid, valid=img.valid)


def focus_map(stack: BeamformedStack, m: int, zs_list: Sequence[float],
              signed: bool = True) -> FocusMap:
    """Depth projection of the compounded image for each shear depth.

    Each row is sum_z of the DPC image (times dz) at that z_s; ``signed=False``
    integrates |values| instead.
    """
    g = stack.grid
    zs = np.asarray(list(zs_list), dtype=float)
    if zs.size == 0:
        raise SceneError("zs_list must not be empty")
    if zs.min() < g.z0 or zs.max() > g.z0 + g.nz * g.dz:
        raise SceneError("zs_list outside grid depth range")
    rows = np.empty((zs.size, g.nx))
    for i, z_s in enumerate(zs):
        img = compound_dpc(stack, m, float(z_s))
        v = np.abs(img.values) if not signed else img.values
        rows[i] = v.sum(axis=1) * g.dz
    return FocusMap(rows, zs, g)


def focus_sharpness(fmap: FocusMap, metric: str = "max_abs") -> np.ndarray:
    """Per-row sharpness: ``max_abs`` (default) or ``grad_energy`` (sum of
    squared lateral differences)."""
    if metric == "max_abs":
        return np.abs(fmap.rows).max(axis=1)
    if metric == "grad_energy":
        return (np.diff(fmap.rows, axis=1) ** 2).sum(axis=1)
    raise SceneError(f"unknown sharpness metric: {metric!r}")


def localize_depth(fmap: FocusMap, metric: str = "max_abs") -> float:
    """Shear depth with maximal sharpness (the focus-knob readout)."""
    s = focus_sharpness(fmap, metric)
    return float(fmap.zs_list[int(np.argmax(s))])


def cmode_assemble(rows: Sequence[tuple], z_s: float) -> CModeImage:
    """Stack per-y projected rows (y, row values) into an x-y image."""
    if not rows:
        raise SceneError("no rows to assemble")
    ys = np.array([float(y) for y, _ in rows])
    if np.unique(ys).size != ys.size:
        raise SceneError("duplicate y positions")
    if not np.all(np.diff(ys) > 0):
        raise SceneError("y positions must be strictly increasing")
    mats = [np.asarray(r, dtype=float).reshape(-1) for _, r in rows]
    widths = {m.size for m in mats}
    if len(widths) != 1:
        raise SceneError("rows must share the same lateral length")
    return CModeImage(np.vstack(mats), ys, z_s)


def roi_slices(grid: ImageGrid, roi: tuple) -> tuple:
    """Index slices covering a physical rectangle (x_lo, x_hi, z_lo, z_hi)."""
    x_lo, x_hi, z_lo, z_hi = roi
    ix = np.where((grid.x >= x_lo) & (grid.x <= x_hi))[0]
    iz = np.where((grid.z >= z_lo) & (grid.z <= z_hi))[0]
    if ix.size == 0 or iz.size == 0:
        raise SceneError("ROI does not intersect the grid")
    return slice(ix[0], ix[-1] + 1), slice(iz[0], iz[-1] + 1)


def roi_mean_abs(img: Union[DpcImage, ScalarImage], roi: tuple) -> float:
    """Mean |value| over the ROI, counting only valid pixels."""
    sx, sz = roi_slices(img.grid, roi)
    vals = img.values[sx, sz]
    mask = img.valid[sx, sz]
    if not mask.any():
        raise SceneError("ROI contains no valid pixels")
    return float(np.abs(vals[mask]).mean())
