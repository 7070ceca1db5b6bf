"""Full-size scenes; excluded by default, run with `pytest -m slow`."""
import pytest

from harness.pipeline import optimize, run_reduction_experiment, run_size_comparison
from harness.scenario import load_scenario

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def scene_5476():
    return load_scenario("paper_5476")


def test_absolute_gains(scene_5476):

    assert optimize(scene_5476, "cim-sa", 2).gain_db == pytest.approx(-63.70, abs=0.5)
    assert optimize(scene_5476, "continuous").gain_db == pytest.approx(-59.85, abs=0.5)


def test_binary_gap_to_continuous(scene_5476):

    binary = optimize(scene_5476, "cim-sa", 2)
    continuous = optimize(scene_5476, "continuous")
    assert continuous.gain_db - binary.gain_db == pytest.approx(3.9, abs=0.6)


def test_quaternary_beats_binary(scene_5476):

    binary = optimize(scene_5476, "cim-sa", 2)
    quaternary = optimize(scene_5476, "cim-sa", 4)
    assert quaternary.gain_db - binary.gain_db >= 2.4


def test_annealing_beats_passive(scene_5476):

    annealed = optimize(scene_5476, "cim-sa", 2).gain_db
    assert optimize(scene_5476, "passive", 2).gain_db < annealed


def test_quaternary_gain_at_largest_surface():

    scene = load_scenario("paper_22201")
    binary = optimize(scene, "cim-sa", 2).gain_db
    quaternary = optimize(scene, "cim-sa", 4).gain_db
    assert quaternary - binary == pytest.approx(2.9, abs=0.5)


def test_gain_grows_with_aperture():

    scenes = [load_scenario(name) for name in ("paper_5476", "paper_12544", "paper_22201")]
    frame = run_size_comparison(scenes, "cim-sa", 2)
    for delta, predicted in zip(frame["delta_db"], frame["predicted_delta_db"]):
        assert delta == pytest.approx(predicted, abs=0.5)


def test_reduction_preserves_gain_at_full_size():

    experiment = run_reduction_experiment(load_scenario("paper_22201_los"), 2, "cim-sa")
    assert 0.08 <= experiment.removal_fraction <= 0.18
    assert experiment.spins_kept < experiment.spins_total
    assert abs(experiment.gain_difference_db) <= 0.1
