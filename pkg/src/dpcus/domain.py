"""Core value types shared by the whole pipeline.

Everything is SI (meters, seconds, hertz, radians). A validated ``Scene``
bundles the transducer, the transmit-angle sequence, the propagation medium,
the reconstruction grid and (optionally) a thin delay screen; it is frozen
after validation and safe to share between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np


class SceneError(ValueError):
    """Raised when a physical parameter violates its constraint."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SceneError(msg)


PARAXIAL_LIMIT_RAD = 0.35  # small-angle regime assumed by the phase model


@dataclass(frozen=True)
class TransducerConfig:
    """Linear array geometry and pulse spectrum.

    ``f0``/``bandwidth_sigma`` describe the Gaussian pulse spectrum (center
    frequency and spectral standard deviation). ``element_x0`` is the x
    position of the first element center; by default the aperture is centered
    on x = 0.
    """

    n_elements: int
    pitch: float
    f0: float
    bandwidth_sigma: float
    fs: float
    element_x0: Optional[float] = None

    def __post_init__(self):
        _require(self.n_elements >= 8, "need >= 8 elements")
        _require(self.pitch > 0, "pitch must be > 0")
        _require(self.f0 > 0, "f0 must be > 0")
        _require(0 < self.bandwidth_sigma < self.f0,
                 "bandwidth_sigma must be in (0, f0)")
        _require(self.fs >= 4.0 * self.f0, "fs must be >= 4*f0")
        if self.element_x0 is None:
            object.__setattr__(
                self, "element_x0", -0.5 * (self.n_elements - 1) * self.pitch)

    @property
    def element_x(self) -> np.ndarray:
        """Element center x positions, shape (n_elements,)."""
        return self.element_x0 + self.pitch * np.arange(self.n_elements)

    @property
    def aperture_width(self) -> float:
        return self.n_elements * self.pitch

    @property
    def aperture_center(self) -> float:
        return self.element_x0 + 0.5 * (self.n_elements - 1) * self.pitch

    def wavelength(self, c: float) -> float:
        """Center wavelength c/f0 for a given medium speed of sound."""
        return c / self.f0


@dataclass(frozen=True)
class SequenceConfig:
    """Transmit tilt sequence: strictly increasing angles and the default
    pair-separation index ``m``."""

    angles: tuple
    m: int = 1

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        _require(len(self.angles) >= 2, "need >= 2 angles")
        _require(all(b > a for a, b in zip(self.angles, self.angles[1:])),
                 "angles must be strictly increasing")
        _require(1 <= self.m <= len(self.angles) - 1,
                 "pair separation m must be in [1, N-1]")

    @property
    def n_angles(self) -> int:
        return len(self.angles)

    def n_pairs(self, m: Optional[int] = None) -> int:
        m = self.m if m is None else m
        _require(1 <= m <= self.n_angles - 1, "pair separation m must be in [1, N-1]")
        return self.n_angles - m

    def theta_c(self, n: int, m: Optional[int] = None) -> float:
        """Midline angle of pair (n, n+m); n is 0-based."""
        m = self.m if m is None else m
        return 0.5 * (self.angles[n] + self.angles[n + m])

    def theta_d(self, n: int, m: Optional[int] = None) -> float:
        """Angular separation of pair (n, n+m), always > 0."""
        m = self.m if m is None else m
        return self.angles[n + m] - self.angles[n]


def make_angles(n: int, max_abs: float, spacing: str = "angle") -> tuple:
    """Symmetric tilt set on [-max_abs, +max_abs] radians.

    ``spacing="angle"`` spaces uniformly in angle; ``"sine"`` spaces
    uniformly in sin(angle).
    """
    _require(n >= 2, "need >= 2 angles")
    _require(max_abs > 0, "max_abs must be > 0")
    if spacing == "angle":
        return tuple(np.linspace(-max_abs, max_abs, n))
    if spacing == "sine":
        return tuple(np.arcsin(np.linspace(-math.sin(max_abs), math.sin(max_abs), n)))
    raise SceneError(f"unknown spacing mode: {spacing!r}")


@dataclass(frozen=True)
class MediumConfig:
    """Homogeneous background medium (no attenuation model)."""

    c: float

    def __post_init__(self):
        _require(self.c > 0, "speed of sound must be > 0")


@dataclass(frozen=True)
class ImageGrid:
    """Uniform x-z pixel grid. Arrays over this grid are indexed [ix, iz]."""

    x0: float
    dx: float
    nx: int
    z0: float
    dz: float
    nz: int

    def __post_init__(self):
        _require(self.dx > 0 and self.dz > 0, "grid spacing must be > 0")
        _require(self.nx >= 2 and self.nz >= 2, "grid must be at least 2x2")
        _require(self.z0 >= 0, "grid z0 must be >= 0")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.nx)

    @property
    def z(self) -> np.ndarray:
        return self.z0 + self.dz * np.arange(self.nz)

    @property
    def x_max(self) -> float:
        return self.x0 + self.dx * (self.nx - 1)

    @property
    def z_max(self) -> float:
        return self.z0 + self.dz * (self.nz - 1)

    @property
    def shape(self) -> tuple:
        return (self.nx, self.nz)


class AberratorProfile:
    """Thin-screen time-delay function tau_a(x) sampled on a uniform x grid.

    ``delays`` are seconds of transmit delay (positive = slower = delayed) at
    the screen plane ``depth``. Evaluation is linear interpolation on the
    sample grid and exactly zero outside it.
    """

    def __init__(self, depth: float, xs, delays, label: str = ""):
        xs = np.asarray(xs, dtype=float)
        delays = np.asarray(delays, dtype=float)
        _require(xs.ndim == 1 and xs.size >= 2, "profile needs >= 2 samples")
        _require(delays.shape == xs.shape, "xs and delays length mismatch")
        _require(depth >= 0, "screen depth must be >= 0")
        steps = np.diff(xs)
        _require(np.all(steps > 0), "profile xs must be strictly increasing")
        _require(np.allclose(steps, steps[0], rtol=1e-9, atol=0.0),
                 "profile xs must be uniformly spaced")
        _require(np.all(np.isfinite(delays)), "profile delays must be finite")
        xs = xs.copy()
        delays = delays.copy()
        xs.setflags(write=False)
        delays.setflags(write=False)
        self.depth = float(depth)
        self.xs = xs
        self.delays = delays
        self.label = label

    @property
    def spacing(self) -> float:
        return float(self.xs[1] - self.xs[0])

    def __call__(self, x) -> np.ndarray:
        """tau_a at arbitrary x (linear interpolation, 0 outside support)."""
        return np.interp(x, self.xs, self.delays, left=0.0, right=0.0)

    def scaled(self, factor: float) -> "AberratorProfile":
        """Same screen with delays multiplied by ``factor``."""
        return AberratorProfile(self.depth, self.xs, self.delays * factor,
                                label=self.label)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AberratorProfile):
            return NotImplemented
        return (self.depth == other.depth
                and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.delays, other.delays)
                and self.label == other.label)

    def __repr__(self) -> str:
        return (f"AberratorProfile(depth={self.depth:.4g}, "
                f"n={self.xs.size}, peak={np.abs(self.delays).max():.3g}s, "
                f"label={self.label!r})")


@dataclass(frozen=True)
class Scene:
    """Validated bundle of acquisition parameters. Construct via
    :func:`validate_scene`, not directly."""

    transducer: TransducerConfig
    sequence: SequenceConfig
    medium: MediumConfig
    grid: ImageGrid
    aberrator: Optional[AberratorProfile] = None

    @property
    def lambda0(self) -> float:
        return self.medium.c / self.transducer.f0


def validate_scene(transducer: TransducerConfig,
                   sequence: SequenceConfig,
                   medium: MediumConfig,
                   grid: ImageGrid,
                   aberrator: Optional[AberratorProfile] = None) -> Scene:
    """Cross-validate the parts of a scene and freeze them together.

    Beyond the per-type invariants (enforced on construction), this rejects
    tilt angles outside the small-angle regime and grids that extend
    laterally beyond twice the aperture width. Idempotent: re-validating the
    components of a valid scene returns an equal scene.
    """
    for a in sequence.angles:
        _require(abs(a) <= PARAXIAL_LIMIT_RAD,
                 f"angle {a:.4f} rad exceeds paraxial limit "
                 f"({PARAXIAL_LIMIT_RAD} rad)")
    w = transducer.aperture_width
    xc = transducer.aperture_center
    _require(grid.x0 >= xc - w and grid.x_max <= xc + w,
             "grid extends laterally beyond 2x aperture width")
    if aberrator is not None:
        lam = transducer.wavelength(medium.c)
        _require(aberrator.spacing <= lam / 4.0 * (1.0 + 1e-9),
                 "aberrator sampling coarser than lambda0/4")
    return Scene(transducer, sequence, medium, grid, aberrator)


def with_aberrator(scene: Scene, aberrator: Optional[AberratorProfile]) -> Scene:
    """Re-validated copy of a scene with the screen swapped out."""
    return validate_scene(scene.transducer, scene.sequence, scene.medium,
                          scene.grid, aberrator)
