"""Synthetic pulse-echo data: random scatterer fields, delay-screen profiles,
and per-element RF traces for each transmit tilt.

The echo model is single scattering from point reflectors. A transmit plane
wave tilted by theta reaches scatterer i after ``s_n . r_i / c`` plus the
screen delay tau_a evaluated where the tilted ray through the scatterer
crosses the screen plane; the echo returns to element e after the two-point
travel time. Receive delays never see tau_a: the screen acts on transmit
only.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domain import AberratorProfile, MediumConfig, Scene, SceneError

# Pulse window half-width in envelope standard deviations. At 5 sigma the
# truncated tail is exp(-12.5) ~ 4e-6 of the peak.
PULSE_CUTOFF_SIGMAS = 5.0

MAX_EXPECTED_SCATTERERS = 10_000_000


class SynthesisError(RuntimeError):
    """Raised when echoes fall outside the requested trace window."""


@dataclass(frozen=True)
class ScattererField:
    """Point scatterers: positions (n, 2) as (x, z) meters, reflectivities
    (n,), and the bounding region (x_min, x_max, z_min, z_max)."""

    positions: np.ndarray
    reflectivities: np.ndarray
    region: tuple
    seed: int = -1

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        amp = np.asarray(self.reflectivities, dtype=float).reshape(-1)
        if amp.shape[0] != pos.shape[0]:
            raise SceneError("positions / reflectivities length mismatch")
        pos.setflags(write=False)
        amp.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "reflectivities", amp)
        object.__setattr__(self, "region", tuple(float(v) for v in self.region))

    @property
    def count(self) -> int:
        return self.positions.shape[0]


def gen_scatterers(region: tuple, density: float, seed: int) -> ScattererField:
    """Poisson-distributed uniform scatterers with N(0, 1) reflectivities.

    ``region`` is (x_min, x_max, z_min, z_max) in meters, ``density`` in
    scatterers per square meter. Deterministic for a given seed.
    """
    x_min, x_max, z_min, z_max = (float(v) for v in region)
    if not (x_max > x_min and z_max > z_min):
        raise SceneError("degenerate scatterer region")
    if density < 0:
        raise SceneError("density must be >= 0")
    area = (x_max - x_min) * (z_max - z_min)
    expected = density * area
    if expected > MAX_EXPECTED_SCATTERERS:
        raise SceneError(
            f"expected scatterer count {expected:.3g} exceeds resource guard "
            f"({MAX_EXPECTED_SCATTERERS:g})")
    rng = np.random.default_rng(seed)
    n = int(rng.poisson(expected)) if expected > 0 else 0
    xs = rng.uniform(x_min, x_max, size=n)
    zs = rng.uniform(z_min, z_max, size=n)
    amps = rng.standard_normal(n)
    return ScattererField(np.column_stack([xs, zs]), amps,
                          (x_min, x_max, z_min, z_max), seed=seed)


def merge_fields(a: ScattererField, b: ScattererField) -> ScattererField:
    """Union of two fields (used for linearity checks)."""
    region = (min(a.region[0], b.region[0]), max(a.region[1], b.region[1]),
              min(a.region[2], b.region[2]), max(a.region[3], b.region[3]))
    return ScattererField(
        np.vstack([a.positions, b.positions]),
        np.concatenate([a.reflectivities, b.reflectivities]),
        region)


# ---------------------------------------------------------------------------
# Delay-screen profiles
# ---------------------------------------------------------------------------

def sphere_delay_profile(center_x: float, radius: float, max_delay: float,
                         depth: float, dx: Optional[float] = None) -> AberratorProfile:
    """Projected chord of a sphere: max_delay * sqrt(1 - ((x-cx)/R)^2) inside
    |x - cx| <= R, zero outside."""
    if radius <= 0:
        raise SceneError("radius must be > 0")
    dx = radius / 256.0 if dx is None else float(dx)
    n = int(math.ceil(2.0 * radius / dx)) + 1
    xs = center_x + np.linspace(-radius, radius, n)
    u = (xs - center_x) / radius
    delays = max_delay * np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    return AberratorProfile(depth, xs, delays, label="sphere")


def gauss_delay_profile(center_x: float, waist: float, max_delay: float,
                        depth: float, dx: Optional[float] = None) -> AberratorProfile:
    """Gaussian bump max_delay * exp(-((x-cx)/waist)^2), truncated at 4 waists."""
    if waist <= 0:
        raise SceneError("waist must be > 0")
    dx = waist / 128.0 if dx is None else float(dx)
    half = 4.0 * waist
    n = int(math.ceil(2.0 * half / dx)) + 1
    xs = center_x + np.linspace(-half, half, n)
    u = (xs - center_x) / waist
    delays = max_delay * np.exp(-u * u)
    return AberratorProfile(depth, xs, delays, label="gauss")


def inclusion_delay_from_sos(center: tuple, radius: float, dc_over_c: float,
                             medium: MediumConfig,
                             dx: Optional[float] = None) -> AberratorProfile:
    """Thin-screen reduction of a spherical speed-of-sound inclusion.

    A relative SoS contrast ``dc_over_c`` over a chord of length
    2*sqrt(R^2 - (x-cx)^2) produces tau_a(x) = -(dc_over_c/c) * chord; a
    faster inclusion (dc_over_c > 0) advances the wavefront (negative delay).
    The screen sits at the inclusion's center depth.
    """
    if radius <= 0:
        raise SceneError("radius must be > 0")
    if abs(dc_over_c) >= 0.1:
        raise SceneError("|dc_over_c| must be < 0.1 (weak-contrast model)")
    cx, cz = float(center[0]), float(center[1])
    dx = radius / 256.0 if dx is None else float(dx)
    n = int(math.ceil(2.0 * radius / dx)) + 1
    xs = cx + np.linspace(-radius, radius, n)
    chord = 2.0 * np.sqrt(np.clip(radius ** 2 - (xs - cx) ** 2, 0.0, None))
    delays = -(dc_over_c / medium.c) * chord
    return AberratorProfile(cz, xs, delays, label="sos-inclusion")


def constant_delay_profile(x_min: float, x_max: float, delay: float,
                           depth: float, dx: float) -> AberratorProfile:
    """Uniform screen over [x_min, x_max] (diagnostics: shifts every echo)."""
    n = int(math.ceil((x_max - x_min) / dx)) + 1
    xs = np.linspace(x_min, x_max, n)
    return AberratorProfile(depth, xs, np.full(n, delay), label="constant")


# ---------------------------------------------------------------------------
# RF synthesis
# ---------------------------------------------------------------------------

def pulse(t, f0: float, bw_sigma: float):
    """Gaussian-spectrum pulse exp(-2 pi^2 nu_sigma^2 t^2) cos(2 pi nu_0 t)."""
    t = np.asarray(t, dtype=float)
    return np.exp(-2.0 * np.pi ** 2 * bw_sigma ** 2 * t * t) * np.cos(2.0 * np.pi * f0 * t)


@dataclass(frozen=True)
class RfDataset:
    """Receive traces [n_angles, n_elements, n_samples] plus the time of the
    first sample and the scene that produced them."""

    samples: np.ndarray
    t0: float
    scene: Scene

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 3:
            raise SceneError("samples must be a 3-tensor")
        if s.shape[0] != self.scene.sequence.n_angles:
            raise SceneError("angle count mismatch with scene")
        if s.shape[1] != self.scene.transducer.n_elements:
            raise SceneError("element count mismatch with scene")
        if not np.all(np.isfinite(s)):
            raise SceneError("non-finite RF samples")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[2]

    @property
    def t_end(self) -> float:
        return self.t0 + (self.n_samples - 1) / self.scene.transducer.fs


def _transmit_times(field: ScattererField, aberrator: Optional[AberratorProfile],
                    theta: float, c: float) -> np.ndarray:
    """Plane-wave arrival time at each scatterer, including the screen delay
    evaluated at the tilted-ray crossing of the screen plane."""
    x = field.positions[:, 0]
    z = field.positions[:, 1]
    t = (x * math.sin(theta) + z * math.cos(theta)) / c
    if aberrator is not None:
        x_int = x - (z - aberrator.depth) * math.tan(theta)
        tau = aberrator(x_int)
        # the screen only delays what lies beyond it
        t = t + np.where(z >= aberrator.depth, tau, 0.0)
    return t


def _element_range_bounds(field: ScattererField, elem_x: np.ndarray) -> tuple:
    """(min, max) scatterer-to-element distance without forming the full matrix."""
    x = field.positions[:, 0]
    z = field.positions[:, 1]
    lo, hi = elem_x[0], elem_x[-1]
    dx_near = np.where(x < lo, lo - x, np.where(x > hi, x - hi, 0.0))
    near = np.hypot(dx_near, z)
    far = np.maximum(np.hypot(x - lo, z), np.hypot(x - hi, z))
    return float(near.min()), float(far.max())


def _grid_delay_bounds(scene: Scene) -> tuple:
    """(min, max) beamforming delay tau_e + tau_r over the grid boundary, so
    traces are long enough for any later beamforming of this scene."""
    g = scene.grid
    bx = np.concatenate([g.x, g.x, np.full(g.nz, g.x0), np.full(g.nz, g.x_max)])
    bz = np.concatenate([np.full(g.nx, g.z0), np.full(g.nx, g.z_max), g.z, g.z])
    elem_x = scene.transducer.element_x
    c = scene.medium.c
    rx = np.hypot(bx[:, None] - elem_x[None, :], bz[:, None]) / c
    t_min, t_max = np.inf, -np.inf
    for theta in scene.sequence.angles:
        te = (bx * math.sin(theta) + bz * math.cos(theta)) / c
        tot = te[:, None] + rx
        t_min = min(t_min, float(tot.min()))
        t_max = max(t_max, float(tot.max()))
    return t_min, t_max


def synthesize_rf(scatterers: ScattererField,
                  aberrator: Optional[AberratorProfile],
                  scene: Scene,
                  n_samples: Optional[int] = None,
                  t0: Optional[float] = None,
                  noise_std: float = 0.0,
                  noise_seed: int = 0,
                  workers: int = 1) -> RfDataset:
    """Simulate per-element receive traces for every transmit tilt.

    Each scatterer contributes ``a_i / sqrt(range) * g(t - t_tx - t_rx)``
    with g the Gaussian-envelope pulse of the scene's transducer. The trace
    window is auto-sized to cover all echoes and all beamforming delays of
    the scene grid unless ``t0``/``n_samples`` are forced, in which case
    echoes falling outside raise :class:`SynthesisError`.

    ``workers`` > 1 parallelizes over transmit angles (disjoint output
    slices; the result does not depend on the worker count).
    """
    tr = scene.transducer
    c = scene.medium.c
    fs = tr.fs
    sigma_t = 1.0 / (2.0 * np.pi * tr.bandwidth_sigma)
    t_win = PULSE_CUTOFF_SIGMAS * sigma_t
    half_w = int(math.ceil(t_win * fs))
    elem_x = tr.element_x

    n_scat = scatterers.count
    if n_scat:
        rx_lo, rx_hi = _element_range_bounds(scatterers, elem_x)
        tx_all = [
            _transmit_times(scatterers, aberrator, th, c)
            for th in scene.sequence.angles
        ]
        echo_lo = min(float(t.min()) for t in tx_all) + rx_lo / c
        echo_hi = max(float(t.max()) for t in tx_all) + rx_hi / c
    else:
        tx_all = [np.zeros(0) for _ in scene.sequence.angles]
        echo_lo, echo_hi = 0.0, 0.0
    grid_lo, grid_hi = _grid_delay_bounds(scene)
    lo = min(echo_lo, grid_lo) - t_win
    hi = max(echo_hi, grid_hi) + t_win

    if t0 is None:
        t0 = lo - 2.0 / fs
    if n_samples is None:
        n_samples = int(math.ceil((hi - t0) * fs)) + 4
    if n_scat and (echo_lo - t_win < t0
                   or echo_hi + t_win > t0 + (n_samples - 1) / fs):
        raise SynthesisError("echo time outside trace window")

    out = np.zeros((scene.sequence.n_angles, tr.n_elements, n_samples))
    x = scatterers.positions[:, 0] if n_scat else np.zeros(0)
    z = scatterers.positions[:, 1] if n_scat else np.zeros(0)
    amp0 = scatterers.reflectivities
    offsets = np.arange(-half_w, half_w + 1)
    two_pi2_s2 = 2.0 * np.pi ** 2 * tr.bandwidth_sigma ** 2
    two_pi_f0 = 2.0 * np.pi * tr.f0

    def fill_angle(ia: int) -> None:
        if not n_scat:
            return
        t_tx = tx_all[ia]
        for ie in range(tr.n_elements):
            rng_e = np.hypot(x - elem_x[ie], z)
            t_tot = t_tx + rng_e / c
            amp = amp0 / np.sqrt(np.maximum(rng_e, 1e-6))
            k0 = np.rint((t_tot - t0) * fs).astype(np.int64)
            idx = k0[:, None] + offsets[None, :]
            if idx.min() < 0 or idx.max() >= n_samples:
                raise SynthesisError("echo time outside trace window")
            u = t0 + idx / fs - t_tot[:, None]
            vals = amp[:, None] * np.exp(-two_pi2_s2 * u * u) * np.cos(two_pi_f0 * u)
            out[ia, ie, :] = np.bincount(idx.ravel(), weights=vals.ravel(),
                                         minlength=n_samples)[:n_samples]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_angle, range(scene.sequence.n_angles)))
    else:
        for ia in range(scene.sequence.n_angles):
            fill_angle(ia)

    if noise_std > 0.0:
        rng = np.random.default_rng(noise_seed)
        out += noise_std * rng.standard_normal(out.shape)

    return RfDataset(out, float(t0), scene)
