import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from ising.hardware import (AuxiliaryNormalizer, absorb_field_aux_spin, coupling_step,
                            quantize_couplings)
from ising.ising_model import build_binary_ising, energy, from_raw_couplings
from ising.model_io import read_model, write_model
from utils.errors import ConfigurationError, NumericalError


def test_auxiliary_spin_preserves_energy(channel_instance):

    inst = channel_instance(5)
    model = build_binary_ising(inst.h_d, inst.V)
    aug, normalizer = absorb_field_aux_spin(model)
    assert aug.size == 6
    assert_array_equal(aug.lam, 0.0)
    assert_allclose(aug.J[0, 1:], model.lam / 2)
    for spins in itertools.product((1, -1), repeat=5):
        s = np.array(spins)
        up = np.concatenate([[1], s])
        assert_allclose(energy(aug, up), energy(model, s), rtol=1e-12)
        # global flip symmetry
        assert_allclose(energy(aug, -up), energy(model, s), rtol=1e-12)
        assert_array_equal(normalizer(-up), s)
        assert_array_equal(normalizer(up), s)


def test_auxiliary_normalizer():

    normalizer = AuxiliaryNormalizer(n_spins=3)
    assert_array_equal(normalizer([1, -1, 1, 1]), [-1, 1, 1])
    assert_array_equal(normalizer([-1, -1, 1, 1]), [1, -1, -1])
    assert normalizer([1, -1, 1, 1]).dtype == np.int8
    with pytest.raises(ConfigurationError):
        normalizer([1, -1, 1])
    assert AuxiliaryNormalizer(n_spins=0)([-1]).size == 0


def test_auxiliary_spin_size_guard(channel_instance):

    model = channel_instance(5).model(2)
    with pytest.raises(NumericalError):
        absorb_field_aux_spin(model, max_spins=5)


def test_quantize_couplings(rng):

    raw = rng.standard_normal((6, 6))
    model = from_raw_couplings(raw, rng.standard_normal(6))
    step = coupling_step(model, 8)
    quantized = quantize_couplings(model, 8)
    assert_allclose(step, np.abs(model.J).max() / 127)
    levels = quantized.J / step
    assert_allclose(levels, np.round(levels), atol=1e-9)
    assert np.abs(levels).max() <= 127 + 1e-9
    assert_allclose(np.abs(quantized.J).max(), np.abs(model.J).max())
    assert np.abs(quantized.J - model.J).max() <= step / 2 + 1e-12
    assert quantized.offset == model.offset


def test_quantize_edge_cases(rng):

    empty = from_raw_couplings(np.zeros((3, 3)), rng.standard_normal(3))
    assert quantize_couplings(empty, 8) is empty
    model = from_raw_couplings(rng.standard_normal((3, 3)), np.zeros(3))
    with pytest.raises(ConfigurationError):
        quantize_couplings(model, 1)
    with pytest.raises(NumericalError):
        quantize_couplings(model, 8, max_spins=2)


def test_model_dump_reloads_exactly(channel_instance, tmp_path, rng):

    model = channel_instance(6).model(2)
    path = write_model(model, tmp_path / "model.txt")
    assert path.read_text().startswith("# ris-ising model\nN 6\nencoding binary\n")
    loaded = read_model(path)
    assert_array_equal(loaded.J, model.J)
    assert_array_equal(loaded.lam, model.lam)
    s = rng.choice([-1, 1], size=6)
    assert energy(loaded, s) == energy(model, s)


def test_model_dump_rejects_garbage(tmp_path):

    bad = tmp_path / "bad.txt"
    bad.write_text("N 2\n")
    with pytest.raises(ConfigurationError):
        read_model(bad)
    truncated = tmp_path / "truncated.txt"
    truncated.write_text("# ris-ising model\nN 2\nencoding binary\nn_ris 2\noffset 0\nJ\n0\n")
    with pytest.raises(ConfigurationError):
        read_model(truncated)
