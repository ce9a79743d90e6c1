import numpy as np
import pytest

import dpcus
from dpcus import presets
from dpcus.beamform import BeamformedStack, ScalarImage
from dpcus.dpc import DpcImage, PhasePairMap

from conftest import FILTER_SIGMA, LAM


def tiny_grid(nx=32, nz=24):
    return dpcus.ImageGrid(x0=-1e-3, dx=0.1e-3, nx=nx, z0=1e-3, dz=0.2e-3, nz=nz)


def tiny_scene(nx=32, nz=24, n_angles=4):
    tr = dpcus.TransducerConfig(n_elements=64, pitch=0.23e-3, f0=5.3e6,
                                bandwidth_sigma=1.325e6, fs=21.2e6)
    seq = dpcus.SequenceConfig(dpcus.make_angles(n_angles, 0.2))
    return dpcus.validate_scene(tr, seq, dpcus.MediumConfig(1540.0),
                                tiny_grid(nx, nz))


def random_stack(seed=0, nx=32, nz=24, n_angles=4):
    scene = tiny_scene(nx, nz, n_angles)
    rng = np.random.default_rng(seed)
    im = rng.standard_normal((n_angles, nx, nz)) \
        + 1j * rng.standard_normal((n_angles, nx, nz))
    return BeamformedStack(im, scene.grid, scene)


# ---------------------------------------------------------------------------
# pair_phase
# ---------------------------------------------------------------------------

def test_pair_phase_identical_images_zero():
    stack = random_stack()
    im = stack.images.copy()
    im[1] = im[0]
    stack = BeamformedStack(im, stack.grid, stack.scene)
    pm = dpcus.pair_phase(stack, 0, 1)
    assert np.abs(pm.values).max() <= 1e-12


def test_pair_phase_constant_factor():
    stack = random_stack()
    im = stack.images.copy()
    im[1] = im[0] * np.exp(1j * np.pi / 3)
    stack = BeamformedStack(im, stack.grid, stack.scene)
    pm = dpcus.pair_phase(stack, 0, 1)
    assert np.allclose(pm.values, -np.pi / 3, atol=1e-12)


def test_pair_phase_wrapping():
    stack = random_stack()
    im = stack.images.copy()
    im[1] = im[0] * np.exp(1j * 3 * np.pi / 2)
    stack = BeamformedStack(im, stack.grid, stack.scene)
    pm = dpcus.pair_phase(stack, 0, 1)
    assert np.allclose(pm.values, np.pi / 2, atol=1e-12)


def test_pair_phase_range_half_open():
    stack = random_stack(5)
    pm = dpcus.pair_phase(stack, 1, 2)
    assert pm.values.min() > -np.pi
    assert pm.values.max() <= np.pi
    assert pm.theta_c == stack.scene.sequence.theta_c(1, 2)
    assert pm.theta_d == stack.scene.sequence.theta_d(1, 2)


def test_pair_phase_index_errors():
    stack = random_stack()
    with pytest.raises(dpcus.SceneError):
        dpcus.pair_phase(stack, 3, 1)
    with pytest.raises(dpcus.SceneError):
        dpcus.pair_phase(stack, 0, 4)


def test_pair_phase_antisymmetry():
    stack = random_stack(7)
    fwd = dpcus.pair_phase(stack, 0, 2).values
    im = stack.images.copy()
    im[[0, 2]] = im[[2, 0]]
    swapped = dpcus.pair_phase(BeamformedStack(im, stack.grid, stack.scene),
                               0, 2).values
    interior = np.abs(fwd) < np.pi - 1e-6
    assert np.allclose(swapped[interior], -fwd[interior], atol=1e-9)


def test_pair_phase_common_phase_invariance():
    stack = random_stack(11)
    rng = np.random.default_rng(13)
    shared = np.exp(1j * rng.uniform(-np.pi, np.pi, stack.grid.shape))
    im2 = stack.images * shared[None, :, :]
    stack2 = BeamformedStack(im2, stack.grid, stack.scene)
    for n in range(3):
        a = dpcus.pair_phase(stack, n, 1).values
        b = dpcus.pair_phase(stack2, n, 1).values
        assert np.abs(np.angle(np.exp(1j * (a - b)))).max() <= 1e-9


def test_pair_phase_arg_zero_is_zero():
    stack = random_stack()
    im = np.zeros_like(stack.images)
    pm = dpcus.pair_phase(BeamformedStack(im, stack.grid, stack.scene), 0, 1)
    assert np.all(pm.values == 0.0)


# ---------------------------------------------------------------------------
# shear_untilt
# ---------------------------------------------------------------------------

def scalar_img(values, grid):
    return ScalarImage(values, grid)


def test_shear_zero_is_identity():
    g = tiny_grid()
    rng = np.random.default_rng(0)
    img = scalar_img(rng.standard_normal(g.shape), g)
    out = dpcus.shear_untilt(img, 0.0, 2e-3)
    assert np.array_equal(out.values, img.values)
    assert out.valid.all()


def test_shear_pivot_row_exact():
    g = tiny_grid()
    rng = np.random.default_rng(1)
    img = scalar_img(rng.standard_normal(g.shape), g)
    z_s = float(g.z[10])  # pivot exactly on a grid row
    out = dpcus.shear_untilt(img, 0.31, z_s)
    assert np.array_equal(out.values[:, 10], img.values[:, 10])


def test_shear_impulse_displacement():
    # unit impulse 10 mm below the pivot, theta_c = 0.06: mass moves to
    # x = -0.6 mm (sampling at x + theta_c (z - z_s))
    g = dpcus.ImageGrid(x0=-2e-3, dx=0.1e-3, nx=41, z0=1e-3, dz=0.5e-3, nz=40)
    z_s = 1e-3
    iz = int(round((z_s + 10e-3 - g.z0) / g.dz))
    assert g.z[iz] == pytest.approx(z_s + 10e-3)
    v = np.zeros(g.shape)
    ix0 = 20
    assert g.x[ix0] == pytest.approx(0.0)
    v[ix0, iz] = 1.0
    out = dpcus.shear_untilt(scalar_img(v, g), 0.06, z_s)
    row = out.values[:, iz]
    centroid = float((g.x * row).sum() / row.sum())
    assert centroid == pytest.approx(-0.6e-3, abs=g.dx)


def test_shear_inverse_within_interp_bound():
    g = tiny_grid(nx=64, nz=32)
    x = g.x[:, None]
    z = g.z[None, :]
    vals = np.sin(x / 0.5e-3) * np.cos(z / 1e-3)
    img = scalar_img(vals, g)
    theta = 0.2
    there = dpcus.shear_untilt(img, theta, 3e-3)
    back = dpcus.shear_untilt(there, -theta, 3e-3)
    grad = np.abs(np.diff(vals, axis=0)).max() / g.dx
    bound = grad * g.dx
    err = np.abs(back.values - vals)[back.valid]
    assert err.max() <= bound


def test_shear_marks_out_of_bounds():
    g = tiny_grid()
    img = scalar_img(np.ones(g.shape), g)
    out = dpcus.shear_untilt(img, 0.3, g.z0)
    assert not out.valid.all()
    assert np.all(out.values[~out.valid] == 0.0)
    assert out.valid[:, 0].all()  # pivot row reads in bounds


def test_shear_angle_limit():
    g = tiny_grid()
    with pytest.raises(dpcus.SceneError):
        dpcus.shear_untilt(scalar_img(np.ones(g.shape), g), 0.4, 0.0)


# ---------------------------------------------------------------------------
# compound_dpc
# ---------------------------------------------------------------------------

def test_compound_two_angles_equals_single_pair():
    stack = random_stack(3, n_angles=2)
    z_s = 2e-3
    comp = dpcus.compound_dpc(stack, 1, z_s)
    pm = dpcus.pair_phase(stack, 0, 1)
    single = dpcus.shear_untilt(pm, pm.theta_c, z_s)
    assert np.array_equal(comp.values, single.values)
    assert np.array_equal(comp.valid, single.valid)


def test_compound_zero_stack_zero_image():
    stack = random_stack()
    zero = BeamformedStack(np.zeros_like(stack.images), stack.grid, stack.scene)
    comp = dpcus.compound_dpc(zero, 1, 2e-3)
    assert np.all(comp.values == 0.0)


def test_compound_range_bound():
    stack = random_stack(17, n_angles=5)
    for m in (1, 2, 4):
        comp = dpcus.compound_dpc(stack, m, 2e-3)
        n_pairs = stack.n_angles - m
        assert np.abs(comp.values).max() <= n_pairs * np.pi + 1e-12
        assert comp.m == m


def test_compound_m_validation():
    stack = random_stack()
    with pytest.raises(dpcus.SceneError):
        dpcus.compound_dpc(stack, 0, 0.0)
    with pytest.raises(dpcus.SceneError):
        dpcus.compound_dpc(stack, 4, 0.0)


# ---------------------------------------------------------------------------
# gaussian_filter
# ---------------------------------------------------------------------------

def test_filter_sigma_zero_identity():
    g = tiny_grid()
    img = scalar_img(np.random.default_rng(2).standard_normal(g.shape), g)
    out = dpcus.gaussian_filter(img, 0.0)
    assert np.array_equal(out.values, img.values)


def test_filter_constant_preserved():
    g = tiny_grid()
    img = scalar_img(np.full(g.shape, 3.25), g)
    out = dpcus.gaussian_filter(img, 0.4e-3)
    assert np.abs(out.values - 3.25).max() <= 1e-6 * 3.25


def test_filter_impulse_matches_dense_convolution():
    g = tiny_grid(nx=33, nz=25)
    v = np.zeros(g.shape)
    v[16, 12] = 1.0
    sigma = 2 * g.dx  # 2 px along x, 1 px along z
    out = dpcus.gaussian_filter(scalar_img(v, g), sigma)

    # oracle: dense 2D convolution with the renormalized truncated kernel
    def kern(sig_px, n):
        r = int(np.ceil(3 * sig_px))
        k = np.exp(-0.5 * (np.arange(-r, r + 1) / sig_px) ** 2)
        return k / k.sum()
    kx = kern(sigma / g.dx, g.nx)
    kz = kern(sigma / g.dz, g.nz)
    k2d = np.outer(kx, kz)
    dense = np.zeros(g.shape)
    norm = np.zeros(g.shape)
    rx, rz = len(kx) // 2, len(kz) // 2
    for i in range(g.nx):
        for j in range(g.nz):
            acc = w = 0.0
            for a in range(-rx, rx + 1):
                for b in range(-rz, rz + 1):
                    ii, jj = i + a, j + b
                    kv = k2d[a + rx, b + rz]
                    if 0 <= ii < g.nx and 0 <= jj < g.nz:
                        acc += kv * v[ii, jj]
                        w += kv
            dense[i, j] = acc / w
    assert np.abs(out.values - dense).max() <= 1e-6


def test_filter_negative_sigma_rejected():
    g = tiny_grid()
    with pytest.raises(dpcus.SceneError):
        dpcus.gaussian_filter(scalar_img(np.zeros(g.shape), g), -1e-3)


# ---------------------------------------------------------------------------
# subtract_reference
# ---------------------------------------------------------------------------

def dpc_img(values, grid, z_s=1e-3, m=1):
    return DpcImage(values, grid, z_s, m)


def test_subtract_self_is_zero():
    g = tiny_grid()
    img = dpc_img(np.random.default_rng(3).standard_normal(g.shape), g)
    out = dpcus.subtract_reference(img, img)
    assert np.all(out.values == 0.0)
    assert out.provenance == "reference-corrected"


def test_subtract_zero_reference_identity():
    g = tiny_grid()
    img = dpc_img(np.random.default_rng(4).standard_normal(g.shape), g)
    out = dpcus.subtract_reference(img, dpc_img(np.zeros(g.shape), g))
    assert np.array_equal(out.values, img.values)


def test_subtract_mismatch_errors():
    g = tiny_grid()
    img = dpc_img(np.zeros(g.shape), g)
    with pytest.raises(dpcus.SceneError):
        dpcus.subtract_reference(img, dpc_img(np.zeros(g.shape), g, z_s=2e-3))
    with pytest.raises(dpcus.SceneError):
        dpcus.subtract_reference(img, dpc_img(np.zeros(g.shape), g, m=2))
    g2 = tiny_grid(nx=30)
    with pytest.raises(dpcus.SceneError):
        dpcus.subtract_reference(img, dpc_img(np.zeros(g2.shape), g2))


def test_two_seed_reference_subtraction(sphere_bundle, null_stack_seed11):
    # an aberration-free image minus an independently regenerated reference
    # stays at the speckle floor: no structure appears
    z_s, m = 0.0, 1
    a = dpcus.gaussian_filter(
        dpcus.compound_dpc(sphere_bundle["stack_null"], m, z_s), FILTER_SIGMA)
    b = dpcus.gaussian_filter(
        dpcus.compound_dpc(null_stack_seed11, m, z_s), FILTER_SIGMA)
    diff = dpcus.subtract_reference(a, b)
    sl = dpcus.roi_slices(a.grid, (-8e-3, 8e-3, 8e-3, 30e-3))
    mask = diff.valid[sl[0], sl[1]]
    d = np.abs(diff.values[sl[0], sl[1]][mask])
    n = np.abs(a.values[sl[0], sl[1]][mask])
    assert d.max() <= 2.0 * n.max()
    assert d.mean() <= 2.0 * n.mean()


# ---------------------------------------------------------------------------
# enhance_integrate
# ---------------------------------------------------------------------------

def test_enhance_zero_image():
    g = tiny_grid()
    out = dpcus.enhance_integrate(dpc_img(np.zeros(g.shape), g), 3)
    assert np.all(out.values == 0.0)


def test_enhance_odd_power_sign():
    g = tiny_grid()
    v = np.zeros(g.shape)
    v[5, 7] = -2.0
    out = dpcus.enhance_integrate(dpc_img(v, g), 3)
    # cumulative integral along x jumps by (-2)^3 * dx at the pixel
    assert out.values[5, 7] == pytest.approx(-8.0 * g.dx)
    assert out.values[4, 7] == 0.0
    assert out.values[6, 7] == pytest.approx(-8.0 * g.dx)


def test_enhance_antisymmetric_lobes_form_bump():
    g = dpcus.ImageGrid(x0=0.0, dx=1e-4, nx=60, z0=1e-3, dz=1e-4, nz=4)
    v = np.zeros(g.shape)
    v[10:20, :] = 1.0   # +A lobe
    v[20:30, :] = -1.0  # -A lobe
    out = dpcus.enhance_integrate(dpc_img(v, g), 3)
    prof = out.values[:, 0]
    # oracle: direct cumulative sum
    expected = np.cumsum(v[:, 0] ** 3) * g.dx
    assert np.allclose(prof, expected)
    assert prof[:10].max() == 0.0
    assert prof[15] > 0.0
    assert prof[30:].max() == pytest.approx(0.0, abs=1e-12)
    assert prof.max() == pytest.approx(10 * g.dx)


def test_enhance_power_validation():
    g = tiny_grid()
    img = dpc_img(np.zeros(g.shape), g)
    for bad in (0, 2, -3):
        with pytest.raises(dpcus.SceneError):
            dpcus.enhance_integrate(img, bad)


# ---------------------------------------------------------------------------
# focus_map / sharpness
# ---------------------------------------------------------------------------

def test_focus_map_shapes_and_validation():
    stack = random_stack(19)
    g = stack.grid
    fmap = dpcus.focus_map(stack, 1, [g.z0])
    assert fmap.rows.shape == (1, g.nx)
    with pytest.raises(dpcus.SceneError):
        dpcus.focus_map(stack, 1, [g.z0 + g.nz * g.dz + 1e-3])
    with pytest.raises(dpcus.SceneError):
        dpcus.focus_map(stack, 1, [])


def test_focus_map_row_is_depth_projection():
    stack = random_stack(23)
    g = stack.grid
    z_s = float(g.z[5])
    fmap = dpcus.focus_map(stack, 1, [z_s])
    img = dpcus.compound_dpc(stack, 1, z_s)
    assert np.allclose(fmap.rows[0], img.values.sum(axis=1) * g.dz)
    amap = dpcus.focus_map(stack, 1, [z_s], signed=False)
    assert np.allclose(amap.rows[0], np.abs(img.values).sum(axis=1) * g.dz)


def test_focus_sharpness_metrics():
    g = tiny_grid()
    rows = np.zeros((3, g.nx))
    rows[1, 5] = 2.0
    rows[2, :] = 0.5
    fmap = dpcus.FocusMap(rows, np.array([1e-3, 2e-3, 3e-3]), g)
    s = dpcus.focus_sharpness(fmap, "max_abs")
    assert np.argmax(s) == 1
    assert dpcus.localize_depth(fmap) == pytest.approx(2e-3)
    sg = dpcus.focus_sharpness(fmap, "grad_energy")
    assert sg[1] > sg[2]
    with pytest.raises(dpcus.SceneError):
        dpcus.focus_sharpness(fmap, "sparkle")


def test_focus_map_flat_without_aberrator(sphere_bundle):
    stack = sphere_bundle["stack_null"]
    g = stack.grid
    zs = np.linspace(5e-3, 35e-3, 7)
    fmap = dpcus.focus_map(stack, 1, zs)
    span = g.z_max - g.z0
    # depth-averaged |phase| per row stays at the speckle level
    assert np.abs(fmap.rows).max() / span < 0.45


# ---------------------------------------------------------------------------
# cmode_assemble
# ---------------------------------------------------------------------------

def test_cmode_single_slice():
    img = dpcus.cmode_assemble([(0.0, np.arange(5.0))], 1e-3)
    assert img.values.shape == (1, 5)
    assert img.z_s == 1e-3


def test_cmode_duplicate_y_rejected():
    rows = [(0.0, np.zeros(4)), (0.0, np.ones(4))]
    with pytest.raises(dpcus.SceneError, match="duplicate"):
        dpcus.cmode_assemble(rows, 0.0)
    with pytest.raises(dpcus.SceneError, match="increasing"):
        dpcus.cmode_assemble([(1e-3, np.zeros(4)), (0.0, np.zeros(4))], 0.0)


def test_cmode_lobe_extent_tracks_chord(cmode_bundle):
    g = cmode_bundle["grid"]
    r3d = cmode_bundle["radius"]
    for y, row in cmode_bundle["rows_slow"]:
        chord = 2 * np.sqrt(max(r3d ** 2 - y ** 2, 0.0))
        if chord < 4e-3:
            continue
        extent = abs(g.x[int(np.argmax(row))] - g.x[int(np.argmin(row))])
        assert abs(extent - chord) <= 0.3 * chord


def test_cmode_sign_reversal(cmode_bundle):
    cm_slow = dpcus.cmode_assemble(cmode_bundle["rows_slow"], 15e-3)
    cm_fast = dpcus.cmode_assemble(cmode_bundle["rows_fast"], 15e-3)
    x = cmode_bundle["grid"].x
    m_slow = cm_slow.values @ x
    m_fast = cm_fast.values @ x
    assert np.all(m_slow > 0.0)
    assert np.all(m_fast < 0.0)


# ---------------------------------------------------------------------------
# ROI helpers
# ---------------------------------------------------------------------------

def test_roi_slices_and_mean():
    g = tiny_grid()
    v = np.ones(g.shape)
    img = scalar_img(v, g)
    sx, sz = dpcus.roi_slices(g, (g.x0, g.x0 + 5 * g.dx, g.z0, g.z0 + 3 * g.dz))
    assert (sx.stop - sx.start, sz.stop - sz.start) == (6, 4)
    assert dpcus.roi_mean_abs(img, (g.x0, g.x_max, g.z0, g.z_max)) == 1.0
    with pytest.raises(dpcus.SceneError):
        dpcus.roi_slices(g, (1.0, 2.0, 1.0, 2.0))
