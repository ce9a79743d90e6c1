"""Shared pipeline fixtures.

The expensive simulate + beamform runs are session-scoped and reused by both
the unit tests and the acceptance suite. Everything is seeded; reruns are
bit-identical.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

import dpcus
from dpcus import presets

LAM = presets.SOUND_SPEED / presets.CENTER_FREQUENCY
C = presets.SOUND_SPEED
DENSITY = 1.6e7
SEED = 7
SCREEN_RADIUS = 16 * LAM
SCREEN_PEAK_DELAY = 0.2 * LAM / C
GAUSS_WAIST = 16 * LAM
GAUSS_PEAK_DELAY = 2 * LAM / C
FILTER_SIGMA = 2 * LAM  # module default smoothing scale


def run_pipeline(scene, field, screen, workers=1):
    rf = dpcus.synthesize_rf(field, screen, scene, workers=workers)
    return dpcus.das_beamform(rf, scene.grid, workers=workers)


@pytest.fixture(scope="session")
def sphere_bundle():
    """Spherical delay screen at z = 0 plus its sign-flipped and
    aberration-free twins, all from the same scatterer realization."""
    screen = dpcus.sphere_delay_profile(0.0, SCREEN_RADIUS, SCREEN_PEAK_DELAY, 0.0)
    scene = presets.default_scene(aberrator=screen)
    field = presets.default_scatterers(scene, seed=SEED, density=DENSITY)
    t0 = time.time()
    stack_pos = run_pipeline(scene, field, screen)
    t_one_config = time.time() - t0
    stack_null = run_pipeline(scene, field, None)
    stack_neg = run_pipeline(scene, field, screen.scaled(-1.0))
    return {"scene": scene, "field": field, "screen": screen,
            "stack_pos": stack_pos, "stack_null": stack_null,
            "stack_neg": stack_neg, "seconds_per_config": t_one_config}


@pytest.fixture(scope="session")
def null_stack_seed11(sphere_bundle):
    """Second aberration-free realization (independent speckle)."""
    scene = sphere_bundle["scene"]
    field = presets.default_scatterers(scene, seed=11, density=DENSITY)
    return run_pipeline(scene, field, None)


@pytest.fixture(scope="session")
def gauss_bundle():
    """Gaussian delay screen at z = 0: pipeline stack + forward-model image."""
    screen = dpcus.gauss_delay_profile(0.0, GAUSS_WAIST, GAUSS_PEAK_DELAY, 0.0)
    scene = presets.default_scene(aberrator=screen)
    field = presets.default_scatterers(scene, seed=SEED, density=DENSITY)
    stack = run_pipeline(scene, field, screen)
    params = dpcus.params_from_scene(scene, m=1, phi_kappa=0.05)
    forward_img = dpcus.eval_forward_dpc(screen, params, scene.grid)
    return {"scene": scene, "screen": screen, "stack": stack,
            "params": params, "forward": forward_img}


def _focus_bundle(depth, z_hi):
    screen = dpcus.sphere_delay_profile(0.0, SCREEN_RADIUS, SCREEN_PEAK_DELAY, depth)
    scene = presets.default_scene(aberrator=screen, z_hi=z_hi)
    field = presets.default_scatterers(scene, seed=SEED, density=DENSITY)
    stack = run_pipeline(scene, field, screen)
    return {"scene": scene, "depth": depth, "stack": stack}


@pytest.fixture(scope="session")
def focus15_bundle():
    return _focus_bundle(15e-3, 40e-3)


@pytest.fixture(scope="session")
def focus35_bundle():
    return _focus_bundle(35e-3, 48e-3)


@pytest.fixture(scope="session")
def inclusion_stack(sphere_bundle):
    """0.5% faster spherical SoS inclusion at 15 mm depth, same grid and
    scatterers as the sphere bundle (so its null stack doubles as the
    aberration-free reference)."""
    incl = dpcus.inclusion_delay_from_sos((0.0, 15e-3), 5e-3, 0.005,
                                          dpcus.MediumConfig(C))
    scene = dpcus.with_aberrator(sphere_bundle["scene"], incl)
    return run_pipeline(scene, sphere_bundle["field"], incl)


@pytest.fixture(scope="session")
def point_bundle():
    """Single scatterer at (0, 20 mm) with a grid node exactly on it."""
    scene = presets.default_scene()
    tr = scene.transducer
    dx = tr.pitch / 2.0
    nx = 191  # odd: node exactly at x = 0
    grid = dpcus.ImageGrid(x0=-(nx // 2) * dx, dx=dx, nx=nx,
                           z0=17e-3, dz=LAM / 4, nz=84)
    # put a node exactly on z = 20 mm
    iz = round((20e-3 - grid.z0) / grid.dz)
    grid = dpcus.ImageGrid(x0=grid.x0, dx=dx, nx=nx,
                           z0=20e-3 - iz * grid.dz, dz=grid.dz, nz=84)
    scene = dpcus.validate_scene(tr, scene.sequence, scene.medium, grid, None)
    field = dpcus.ScattererField(np.array([[0.0, 20e-3]]), np.array([1.0]),
                                 (-1e-3, 1e-3, 19e-3, 21e-3))
    rf = dpcus.synthesize_rf(field, None, scene)
    stack = dpcus.das_beamform(rf, scene.grid)
    return {"scene": scene, "field": field, "rf": rf, "stack": stack}


CMODE_RADIUS = 4e-3
CMODE_DEPTH = 15e-3
CMODE_YS = tuple(np.arange(-3e-3, 3.5e-3, 1e-3))


def _cmode_rows(dc_sign, seed0):
    rows = []
    grid = None
    for i, y in enumerate(CMODE_YS):
        r_xz = float(np.sqrt(max(CMODE_RADIUS ** 2 - y ** 2, 0.0)))
        scene = presets.default_scene(nx=128, z_lo=3e-3, z_hi=28e-3, nz=176)
        screen = None
        if r_xz > 0.2e-3:
            screen = dpcus.inclusion_delay_from_sos(
                (0.0, CMODE_DEPTH), r_xz, dc_sign * 0.01, dpcus.MediumConfig(C))
            scene = dpcus.with_aberrator(scene, screen)
        field = presets.default_scatterers(scene, seed=seed0 + i, density=1.2e7)
        stack = run_pipeline(scene, field, screen)
        img = dpcus.gaussian_filter(dpcus.compound_dpc(stack, 1, CMODE_DEPTH),
                                    FILTER_SIGMA)
        rows.append((float(y), (img.values * img.valid).sum(axis=1) * scene.grid.dz))
        grid = scene.grid
    return rows, grid


@pytest.fixture(scope="session")
def cmode_bundle():
    """Slow and fast spherical inclusions scanned in y, one projected row per
    slice (independent speckle per slice)."""
    rows_slow, grid = _cmode_rows(-1.0, 100)   # slower SoS: positive delays
    rows_fast, _ = _cmode_rows(+1.0, 200)
    return {"rows_slow": rows_slow, "rows_fast": rows_fast, "grid": grid,
            "radius": CMODE_RADIUS, "ys": CMODE_YS}
