import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from channel.channel_model import (bs_ris_channel, build_channels, capacity, cascade_matrix,
                                   channel_gain, channel_gain_db, composite_channel,
                                   direct_channel, effective_aperture, mrt_weights,
                                   ris_ue_channel)
from channel.phases import PhaseConfig, phase_candidates
from scene.geometry import (SPEED_OF_LIGHT, ApertureModel, PropagationVariant, SceneConfig,
                            build_geometry, planar_array)
from utils.errors import ConfigurationError, DegenerateGeometryError


def test_direct_channel_free_space():

    bs = planar_array((0, 0, 0), (1, 1), 0.005, (0, 1, 0))
    lam = 0.01
    h = direct_channel(bs, (0.0, 50.0, 0.0), lam)
    assert_allclose(abs(h[0]), lam / (4 * math.pi * 50.0))
    assert_allclose(h[0], lam / (4 * math.pi * 50.0) * np.exp(-2j * math.pi * 50.0 / lam))


def test_propagation_variants():

    ris = planar_array((2.0, 50.0, 0.0), (1, 1), 0.005, (-1, 0, 0))
    ue = (0.0, 50.0, 0.0)
    friis = ris_ue_channel(ris, ue, 0.01, PropagationVariant.FRIIS_SQUARED, ApertureModel.FLAT)
    printed = ris_ue_channel(ris, ue, 0.01, PropagationVariant.PAPER_PRINTED, ApertureModel.FLAT)
    assert_allclose(abs(friis[0]), math.sqrt(0.005 ** 2 / (4 * math.pi * 4.0)))
    assert_allclose(abs(printed[0]) / abs(friis[0]), math.sqrt(2.0))


def test_effective_aperture():

    normal = np.array([-1.0, 0.0, 0.0])
    assert effective_aperture(normal, 2.0, [-1.0, 0.0, 0.0], "flat") == 2.0
    assert_allclose(effective_aperture(normal, 2.0, [-0.6, 0.8, 0.0], "cosine_projected"), 1.2)
    # behind the panel
    assert effective_aperture(normal, 2.0, [1.0, 0.0, 0.0], "cosine_projected") == 0.0


def test_bs_ris_channel_shape(small_scene):

    bs, ris, _ = build_geometry(small_scene)
    G = bs_ris_channel(bs, ris, small_scene.wavelength)
    assert G.shape == (small_scene.n_ris, small_scene.n_bs)
    assert np.all(np.isfinite(G))


def test_build_channels_nlos_has_no_direct_path(small_scene, small_los_scene):

    nlos = build_channels(small_scene)
    assert_array_equal(nlos.h_d, 0.0)
    assert_allclose(nlos.V, nlos.f[:, None] * nlos.G)
    los = build_channels(small_los_scene)
    assert np.all(np.abs(los.h_d) > 0)
    assert_allclose(los.V, nlos.V)


def test_composite_channel(channel_instance):

    inst = channel_instance(5)
    phases = PhaseConfig(level=4, indices=[0, 1, 2, 3, 1])
    expected = inst.h_d.copy()
    for n, phi in enumerate(phases.coefficients):
        expected += np.conj(phi) * inst.V[n]
    assert_allclose(composite_channel(inst.h_d, inst.V, phases), expected)
    with pytest.raises(ConfigurationError):
        composite_channel(inst.h_d, inst.V, np.ones(4))


def test_mrt_and_capacity(channel_instance):

    inst = channel_instance(3)
    h = composite_channel(inst.h_d, inst.V, np.ones(3))
    w = mrt_weights(h)
    assert_allclose(np.linalg.norm(w), 1.0)
    assert_allclose(h @ w, np.linalg.norm(h))
    assert_allclose(capacity(h, w, 1e-2), math.log2(1 + channel_gain(h) / 1e-2))
    with pytest.raises(DegenerateGeometryError):
        mrt_weights(np.zeros(4))
    with pytest.raises(ConfigurationError):
        capacity(h, w, 0.0)


def test_gain_db_of_zero_channel():

    assert channel_gain_db(np.zeros(3)) == -math.inf


def test_coincident_points_raise():

    bs = planar_array((0, 0, 0), (1, 1), 0.005, (0, 1, 0))
    with pytest.raises(DegenerateGeometryError):
        direct_channel(bs, (0.0, 0.0, 0.0), 0.01)


def test_phase_candidates_and_nearest():

    for level in (2, 4):
        assert_allclose(np.abs(phase_candidates(level)), 1.0)
    quaternary = PhaseConfig(level=4, indices=[0, 1, 2, 3])
    assert_allclose(quaternary.theta, [math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4,
                                       7 * math.pi / 4])
    assert_allclose(quaternary.coefficients, np.exp(1j * quaternary.theta))
    nearest = PhaseConfig.nearest(np.exp(1j * np.array([0.1, 3.0, -0.2])), 2)
    assert_array_equal(nearest.indices, [0, 1, 0])
    assert_array_equal(PhaseConfig.zeros(3).indices, 0)
    with pytest.raises(ConfigurationError):
        PhaseConfig(level=2, indices=[0, 2])
    with pytest.raises(ConfigurationError):
        PhaseConfig(level=3, indices=[0])


WAVELENGTH_28GHZ = SPEED_OF_LIGHT / 28e9


def test_direct_channel_at_28ghz():

    single = planar_array((0, 0, 0), (1, 1), WAVELENGTH_28GHZ / 2, (0, 1, 0))
    h = direct_channel(single, (0.0, 50.0, 0.0), WAVELENGTH_28GHZ)
    assert_allclose(abs(h[0]), 1.7041e-5, rtol=1e-4)
    assert channel_gain_db(h) == pytest.approx(-95.37, abs=0.01)

    bs, _, ue = build_geometry(SceneConfig(los_enabled=True))
    h = direct_channel(bs, ue, WAVELENGTH_28GHZ)
    assert h.size == 64
    assert_allclose(channel_gain(h), 1.86e-8, rtol=5e-3)
    assert channel_gain_db(h) == pytest.approx(-77.3, abs=0.05)


def test_direct_channel_loses_6db_per_doubling():

    bs = planar_array((0, 0, 0), (1, 1), WAVELENGTH_28GHZ / 2, (0, 1, 0))
    near = channel_gain_db(direct_channel(bs, (0.0, 25.0, 0.0), WAVELENGTH_28GHZ))
    far = channel_gain_db(direct_channel(bs, (0.0, 50.0, 0.0), WAVELENGTH_28GHZ))
    assert near - far == pytest.approx(20 * math.log10(2), abs=1e-9)
    assert near - far == pytest.approx(6.02, abs=0.005)


@pytest.mark.parametrize("variant, expected", [
    (PropagationVariant.FRIIS_SQUARED, 7.56e-4),
    (PropagationVariant.PAPER_PRINTED, 1.069e-3),
])
def test_bs_ris_amplitude_at_two_meters(variant, expected):

    spacing = WAVELENGTH_28GHZ / 2
    bs = planar_array((0, 0, 0), (1, 1), spacing, (0, 1, 0))
    ris = planar_array((0, 2, 0), (1, 1), spacing, (0, -1, 0))
    G = bs_ris_channel(bs, ris, WAVELENGTH_28GHZ, variant, ApertureModel.FLAT)
    assert_allclose(abs(G[0, 0]), expected, rtol=2e-3)


def test_ris_ue_amplitude_at_fifty_meters():

    ris = planar_array((50, 0, 0), (1, 1), WAVELENGTH_28GHZ / 2, (-1, 0, 0))
    f = ris_ue_channel(ris, (0.0, 0.0, 0.0), WAVELENGTH_28GHZ, PropagationVariant.FRIIS_SQUARED,
                       ApertureModel.FLAT)
    assert_allclose(abs(f[0]), 3.02e-5, rtol=2e-3)


def test_composite_channel_is_per_element_sum(small_los_scene, rng):

    channels = build_channels(small_los_scene)
    assert_allclose(cascade_matrix(channels.f, channels.G), channels.V)
    phases = PhaseConfig(level=4, indices=rng.integers(0, 4, size=small_los_scene.n_ris))
    h = composite_channel(channels.h_d, channels.V, phases)
    for k in range(small_los_scene.n_bs):
        expected = channels.h_d[k]
        for n, phi in enumerate(phases.coefficients):
            expected += np.conj(phi) * channels.f[n] * channels.G[n, k]
        assert_allclose(h[k], expected, rtol=1e-12)


def test_composite_channel_ignores_element_order(channel_instance, rng):

    inst = channel_instance(9)
    phases = PhaseConfig(level=4, indices=rng.integers(0, 4, size=9))
    order = rng.permutation(9)
    swapped = PhaseConfig(level=4, indices=phases.indices[order])
    assert_allclose(composite_channel(inst.h_d, inst.V[order], swapped),
                    composite_channel(inst.h_d, inst.V, phases), rtol=1e-12)
