"""Desk-scale default configurations.

A shrunk version of the reference probe (128 of 192 elements, same pitch and
center frequency) keeps full-pipeline runs in the tens of seconds while
preserving the acquisition geometry. All builders return validated scenes.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .domain import (AberratorProfile, ImageGrid, MediumConfig, Scene,
                     SequenceConfig, TransducerConfig, make_angles,
                     validate_scene)
from .synth import ScattererField, gen_scatterers

SOUND_SPEED = 1540.0
CENTER_FREQUENCY = 5.3e6
PITCH = 0.23e-3
N_ELEMENTS = 128
N_ANGLES = 7
MAX_TILT_DEG = 12.0
DEFAULT_DENSITY = 8.0e6  # scatterers per m^2, ~1e4 in the default region


def default_transducer(n_elements: int = N_ELEMENTS) -> TransducerConfig:
    f0 = CENTER_FREQUENCY
    return TransducerConfig(n_elements=n_elements, pitch=PITCH, f0=f0,
                            bandwidth_sigma=0.25 * f0, fs=4.0 * f0)


def default_sequence(n_angles: int = N_ANGLES, m: int = 1,
                     max_tilt_deg: float = MAX_TILT_DEG,
                     spacing: str = "angle") -> SequenceConfig:
    return SequenceConfig(make_angles(n_angles, math.radians(max_tilt_deg),
                                      spacing=spacing), m=m)


def default_grid(z_lo: float = 3e-3, z_hi: float = 40e-3,
                 nx: int = 192, nz: int = 256,
                 transducer: Optional[TransducerConfig] = None) -> ImageGrid:
    tr = default_transducer() if transducer is None else transducer
    dx = tr.pitch / 2.0
    x0 = -0.5 * (nx - 1) * dx
    dz = (z_hi - z_lo) / (nz - 1)
    return ImageGrid(x0=x0, dx=dx, nx=nx, z0=z_lo, dz=dz, nz=nz)


def default_scene(aberrator: Optional[AberratorProfile] = None,
                  n_elements: int = N_ELEMENTS,
                  n_angles: int = N_ANGLES,
                  z_lo: float = 3e-3, z_hi: float = 40e-3,
                  nx: int = 192, nz: int = 256) -> Scene:
    tr = default_transducer(n_elements)
    return validate_scene(tr,
                          default_sequence(n_angles),
                          MediumConfig(SOUND_SPEED),
                          default_grid(z_lo, z_hi, nx, nz, tr),
                          aberrator)


def scatter_region(scene: Scene, margin: float = 2e-3) -> tuple:
    """Bounding region for the speckle phantom: the grid dilated laterally by
    ``margin`` (clipped to the aperture footprint) and axially by ``margin``."""
    g = scene.grid
    ex = scene.transducer.element_x
    x_lo = max(g.x0 - margin, float(ex[0]))
    x_hi = min(g.x_max + margin, float(ex[-1]))
    z_lo = max(g.z0 - margin, 0.5e-3)
    z_hi = g.z_max + margin
    return (x_lo, x_hi, z_lo, z_hi)


def default_scatterers(scene: Scene, seed: int,
                       density: float = DEFAULT_DENSITY) -> ScattererField:
    return gen_scatterers(scatter_region(scene), density, seed)


def speckle_density(scene: Scene, per_cell: float = 20.0,
                    f_number: float = 1.5) -> float:
    """Density giving ``per_cell`` scatterers per resolution cell (lateral
    lambda0 * f-number, axial half the envelope FWHM). The fully developed
    speckle regime (~20 per cell) is an order of magnitude above the desk
    default; use it when speckle statistics themselves are under study."""
    lam = scene.lambda0
    lateral = lam * f_number
    sigma_t = 1.0 / (2.0 * math.pi * scene.transducer.bandwidth_sigma)
    axial = 0.5 * scene.medium.c * (2.0 * math.sqrt(2.0 * math.log(2.0)) * sigma_t)
    return per_cell / (lateral * axial)
