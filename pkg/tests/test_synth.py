import numpy as np
import pytest

import dpcus
from dpcus import presets
from dpcus.synth import SynthesisError

from conftest import C, LAM


def test_gen_scatterers_zero_density_empty():
    f = dpcus.gen_scatterers((-1e-3, 1e-3, 0.0, 1e-3), 0.0, 3)
    assert f.count == 0


def test_gen_scatterers_deterministic():
    region = (-20e-3, 20e-3, 0.0, 50e-3)
    a = dpcus.gen_scatterers(region, 5e6, 42)
    b = dpcus.gen_scatterers(region, 5e6, 42)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.reflectivities, b.reflectivities)
    c = dpcus.gen_scatterers(region, 5e6, 43)
    assert not np.array_equal(a.positions, c.positions)


def test_gen_scatterers_poisson_count():
    # 40 mm x 50 mm at 5e6 / m^2: expected 1e4, Poisson sigma = 100
    f = dpcus.gen_scatterers((-20e-3, 20e-3, 0.0, 50e-3), 5e6, 7)
    assert abs(f.count - 10_000) <= 4 * 100


def test_gen_scatterers_resource_guard():
    with pytest.raises(dpcus.SceneError, match="resource guard"):
        dpcus.gen_scatterers((-0.5, 0.5, 0.0, 1.0), 1e9, 0)


def test_gen_scatterers_positions_inside_region():
    region = (-5e-3, 5e-3, 1e-3, 9e-3)
    f = dpcus.gen_scatterers(region, 2e7, 5)
    assert f.positions[:, 0].min() >= region[0]
    assert f.positions[:, 0].max() <= region[1]
    assert f.positions[:, 1].min() >= region[2]
    assert f.positions[:, 1].max() <= region[3]


# ---------------------------------------------------------------------------
# Delay profiles
# ---------------------------------------------------------------------------

def test_sphere_profile_shape():
    peak = 0.2 * LAM / C
    p = dpcus.sphere_delay_profile(1e-3, 16 * LAM, peak, 0.0)
    assert p(1e-3) == pytest.approx(peak, rel=1e-12)
    assert p(1e-3 + 16 * LAM) == pytest.approx(0.0, abs=1e-20)
    # frozen arithmetic: 0.2 * lambda0 / c with lambda0 = 1540 / 5.3e6
    assert peak == pytest.approx(3.7736e-8, rel=1e-4)


def test_gauss_profile_shape():
    peak = 2 * LAM / C
    w = 16 * LAM
    p = dpcus.gauss_delay_profile(0.0, w, peak, 0.0)
    assert p(0.0) == pytest.approx(peak, rel=1e-9)
    assert p(w) == pytest.approx(peak / np.e, rel=1e-6)
    assert peak == pytest.approx(3.7736e-7, rel=1e-4)
    # truncated support: zero beyond 4 waists
    assert p(4.5 * w) == 0.0


def test_inclusion_profile():
    med = dpcus.MediumConfig(1540.0)
    zero = dpcus.inclusion_delay_from_sos((0.0, 10e-3), 5e-3, 0.0, med)
    assert np.all(zero.delays == 0.0)
    p = dpcus.inclusion_delay_from_sos((0.0, 10e-3), 5e-3, 0.005, med)
    assert p(0.0) == pytest.approx(-0.005 * 2 * 5e-3 / 1540.0, rel=1e-12)
    assert p(0.0) == pytest.approx(-3.247e-8, rel=1e-3)
    assert p.depth == 10e-3
    n = dpcus.inclusion_delay_from_sos((0.0, 10e-3), 5e-3, -0.005, med)
    assert np.allclose(n.delays, -p.delays, rtol=0, atol=1e-25)
    with pytest.raises(dpcus.SceneError):
        dpcus.inclusion_delay_from_sos((0.0, 10e-3), 5e-3, 0.2, med)


# ---------------------------------------------------------------------------
# RF synthesis
# ---------------------------------------------------------------------------

def small_scene(**kw):
    return presets.default_scene(n_elements=32, z_lo=5e-3, z_hi=25e-3,
                                 nx=48, nz=64, **kw)


def test_empty_field_zero_rf():
    scene = small_scene()
    f = dpcus.ScattererField(np.zeros((0, 2)), np.zeros(0), (0, 1e-3, 0, 1e-3))
    rf = dpcus.synthesize_rf(f, None, scene)
    assert np.all(rf.samples == 0.0)


def test_single_scatterer_two_way_time(point_bundle):
    rf = point_bundle["rf"]
    scene = point_bundle["scene"]
    fs = scene.transducer.fs
    elem_x = scene.transducer.element_x
    ie = int(np.argmin(np.abs(elem_x)))
    ia = scene.sequence.n_angles // 2  # zero-tilt transmit
    assert scene.sequence.angles[ia] == pytest.approx(0.0, abs=1e-12)
    trace = rf.samples[ia, ie]
    peak_t = rf.t0 + np.argmax(np.abs(trace)) / fs
    assert peak_t == pytest.approx(2 * 20e-3 / C, abs=1.0 / fs)


def test_constant_screen_shifts_peak(point_bundle):
    scene = point_bundle["scene"]
    field = point_bundle["field"]
    fs = scene.transducer.fs
    ie = int(np.argmin(np.abs(scene.transducer.element_x)))
    ia = scene.sequence.n_angles // 2
    screen = dpcus.constant_delay_profile(-16e-3, 16e-3, 100e-9, 0.0, LAM / 8)
    rf0 = point_bundle["rf"]
    rf1 = dpcus.synthesize_rf(field, screen, scene,
                              t0=rf0.t0, n_samples=rf0.n_samples)
    t_0 = rf0.t0 + np.argmax(np.abs(rf0.samples[ia, ie])) / fs
    t_1 = rf1.t0 + np.argmax(np.abs(rf1.samples[ia, ie])) / fs
    assert t_1 - t_0 == pytest.approx(100e-9, abs=1.0 / fs)


def test_linearity_of_union():
    scene = small_scene()
    rng = np.random.default_rng(3)
    region = (-3e-3, 3e-3, 8e-3, 20e-3)
    def rand_field(seed):
        r = np.random.default_rng(seed)
        n = 40
        pos = np.column_stack([r.uniform(region[0], region[1], n),
                               r.uniform(region[2], region[3], n)])
        return dpcus.ScattererField(pos, r.standard_normal(n), region)
    fa, fb = rand_field(1), rand_field(2)
    both = dpcus.merge_fields(fa, fb)
    rf_ab = dpcus.synthesize_rf(both, None, scene)
    rf_a = dpcus.synthesize_rf(fa, None, scene, t0=rf_ab.t0, n_samples=rf_ab.n_samples)
    rf_b = dpcus.synthesize_rf(fb, None, scene, t0=rf_ab.t0, n_samples=rf_ab.n_samples)
    lhs = rf_ab.samples
    rhs = rf_a.samples + rf_b.samples
    assert np.abs(lhs - rhs).max() <= 1e-6 * np.abs(lhs).max()


def test_reproducibility_bit_identical():
    scene = small_scene()
    field = presets.default_scatterers(scene, seed=9, density=2e6)
    screen = dpcus.gauss_delay_profile(0.0, 8 * LAM, 1e-7, 0.0)
    a = dpcus.synthesize_rf(field, screen, scene)
    b = dpcus.synthesize_rf(field, screen, scene)
    assert np.array_equal(a.samples, b.samples)
    assert a.t0 == b.t0


def test_workers_do_not_change_result():
    scene = small_scene()
    field = presets.default_scatterers(scene, seed=9, density=2e6)
    a = dpcus.synthesize_rf(field, None, scene, workers=1)
    b = dpcus.synthesize_rf(field, None, scene, workers=3)
    assert np.array_equal(a.samples, b.samples)


def test_receive_path_never_sees_screen():
    # a screen strictly below every scatterer cannot touch the data:
    # transmit delays apply only beyond the screen depth, receive never
    scene = small_scene()
    field = presets.default_scatterers(scene, seed=4, density=2e6)
    deep_screen = dpcus.constant_delay_profile(-16e-3, 16e-3, 2e-7, 24.9e-3, LAM / 8)
    keep = field.positions[:, 1] < 24e-3
    field = dpcus.ScattererField(field.positions[keep], field.reflectivities[keep],
                                 field.region)
    rf_screen = dpcus.synthesize_rf(field, deep_screen, scene)
    rf_none = dpcus.synthesize_rf(field, None, scene,
                                  t0=rf_screen.t0, n_samples=rf_screen.n_samples)
    assert np.array_equal(rf_screen.samples, rf_none.samples)


def test_trace_window_error():
    scene = small_scene()
    field = dpcus.ScattererField(np.array([[0.0, 20e-3]]), np.array([1.0]),
                                 (-1e-3, 1e-3, 19e-3, 21e-3))
    with pytest.raises(SynthesisError):
        dpcus.synthesize_rf(field, None, scene, t0=0.0, n_samples=64)


def test_noise_flag_reproducible():
    scene = small_scene()
    field = presets.default_scatterers(scene, seed=5, density=1e6)
    a = dpcus.synthesize_rf(field, None, scene, noise_std=0.01, noise_seed=2)
    b = dpcus.synthesize_rf(field, None, scene, noise_std=0.01, noise_seed=2)
    assert np.array_equal(a.samples, b.samples)
    c = dpcus.synthesize_rf(field, None, scene, noise_std=0.0)
    assert not np.array_equal(a.samples, c.samples)
