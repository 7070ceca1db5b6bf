from dataclasses import replace

import numpy as np
import pytest

from harness.bench import random_instance
from scene.geometry import ApertureModel, SceneConfig

SMALL_SCENARIO = """
[bs]
center = 0, 0, 0
grid = 2, 2
spacing = lambda/2
normal = 0, 1, 0

[ris]
center = 2, 50, 0
grid = 2, 3
normal = -1, 0, 0

[ue]
position = 0, 50, 0

[model]
carrier_frequency = 28e9
propagation_variant = friis_squared
aperture_model = flat
los_enabled = {los}
"""


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_scene():
    return SceneConfig(bs_grid=(2, 2), ris_grid=(2, 3), aperture_model=ApertureModel.FLAT,
                       name="small").validate()


@pytest.fixture
def small_los_scene(small_scene):
    return replace(small_scene, los_enabled=True, name="small_los")


@pytest.fixture
def scenario_file(tmp_path):
    """Writes the small scenario to disk and returns its path."""
    def _write(los: bool = False, name: str = "small.scn"):
        path = tmp_path / name
        path.write_text(SMALL_SCENARIO.format(los=str(los).lower()))
        return path
    return _write


@pytest.fixture
def channel_instance(rng):
    """Factory of random (h_d, V) instances."""
    def _make(n_ris: int, n_bs: int = 4, los: bool = True):
        return random_instance(rng, n_ris, n_bs, los)
    return _make
