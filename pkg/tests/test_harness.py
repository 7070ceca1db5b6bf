import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from channel.channel_model import build_channels, channel_gain_db, composite_channel
from harness.bench import quantization_robustness, random_instances, run_bench
from harness.emitters import (emit_csv, emit_svg, read_csv, read_mask, render_svg, write_mask,
                              write_report, write_trace)
from harness.pipeline import (OptimizeParams, optimize, run_reduction_experiment,
                              run_size_comparison)
from harness.scenario import load_scenario, parse_scenario
from harness.sweep import SweepResult, run_sweep, sweep_distances
from scene.geometry import ApertureModel, PropagationVariant
from utils.errors import ConfigurationError, NumericalError
from utils.utilities import GAIN_SENTINEL_DB


def _params(**overrides):
    return OptimizeParams.from_config(**overrides)


# scenario files

def test_parse_scenario(scenario_file):

    scene = load_scenario(scenario_file(los=True))
    assert scene.n_ris == 6 and scene.n_bs == 4
    assert scene.los_enabled
    assert scene.aperture_model is ApertureModel.FLAT
    assert scene.propagation_variant is PropagationVariant.FRIIS_SQUARED
    assert_allclose(scene.bs_element_spacing, scene.wavelength / 2)
    assert scene.name == "small"


def test_side_length_and_defaults():

    scene = parse_scenario("[ris]\nside_length = 0.4\n[model]\nnoise_power = 1e-13\n")
    assert scene.ris_grid == (74, 74)
    assert scene.noise_power == 1e-13
    assert scene.carrier_frequency == 28e9
    assert scene.bs_grid == (8, 8)


@pytest.mark.parametrize("text", [
    "[ris]\ncolour = red\n",
    "[antenna]\ngrid = 2, 2\n",
    "[ris]\ngrid = 2, 2\nside_length = 0.4\n",
    "[ris]\ngrid = 2.5, 2\n",
    "[ue]\nposition = 0, 50\n",
    "[model]\npropagation_variant = two_ray\n",
    "[model]\ncarrier_frequency = 0\n",
    "[bs]\nspacing = lambda*2\n",
    "[model]\nlos_enabled = perhaps\n",
    "no section header\n",
])
def test_parse_scenario_rejects(text):

    with pytest.raises(ConfigurationError):
        parse_scenario(text)


@pytest.mark.parametrize("name", ["paper_printed", "sqrt_distance"])
def test_printed_variant_spellings(name):

    scene = parse_scenario(f"[model]\npropagation_variant = {name}\n")
    assert scene.propagation_variant is PropagationVariant.PAPER_PRINTED
    assert scene.describe()["propagation_variant"] == "paper_printed"


def test_missing_scenario(tmp_path):

    with pytest.raises(ConfigurationError):
        load_scenario(tmp_path / "absent.scn")


@pytest.mark.parametrize("preset, n_ris, los", [
    ("paper_5476", 5476, False),
    ("paper_12544", 12544, False),
    ("paper_22201_los", 22201, True),
])
def test_shipped_presets(preset, n_ris, los):

    scene = load_scenario(preset)
    assert scene.n_ris == n_ris
    assert scene.n_bs == 64
    assert scene.carrier_frequency == 28e9
    assert scene.los_enabled is los
    assert scene.ris_center == (2.0, 50.0, 0.0)
    assert scene.ue_position == (0.0, 50.0, 0.0)


# optimization pipeline

@pytest.mark.parametrize("level", [2, 4])
def test_sa_matches_exhaustive_on_small_scene(small_los_scene, level):

    params = _params(seed=3)
    exact = optimize(small_los_scene, "exhaustive", level, params)
    annealed = optimize(small_los_scene, "cim-sa", level, params)
    assert_allclose(annealed.report.best_energy, exact.report.best_energy, rtol=1e-9)
    assert_allclose(annealed.gain_db, exact.gain_db, atol=1e-9)


def test_optimize_gain_is_physical(small_los_scene):

    result = optimize(small_los_scene, "cim-sa", 2, _params(seed=0))
    channels = build_channels(small_los_scene)
    assert_allclose(result.gain_db,
                    channel_gain_db(composite_channel(channels.h_d, channels.V, result.phases)))
    # energy and gain describe the same configuration
    assert_allclose(result.gain_db, result.report.gain_db, atol=1e-9)
    summary = result.summary()
    assert summary["method"] == "cim-sa" and summary["n_ris"] == 6
    assert_allclose(summary["theoretical_quantization_loss_db"], 3.92, atol=0.01)


@pytest.mark.parametrize("method", ["successive", "fresnel", "passive", "continuous",
                                    "cim-bif"])
def test_every_method_runs(small_scene, method):

    result = optimize(small_scene, method, 2, _params(seed=1))
    assert math.isfinite(result.gain_db)
    assert_allclose(np.abs(result.coefficients), 1.0)
    if method == "continuous":
        assert result.phases is None
    else:
        assert result.phases.n_ris == 6


def test_continuous_is_an_upper_reference(small_scene):

    exact = optimize(small_scene, "exhaustive", 2, _params())
    continuous = optimize(small_scene, "continuous", 2, _params())
    assert continuous.gain_db >= exact.gain_db - 1e-9


def test_method_level_mismatch(small_scene):

    with pytest.raises(ConfigurationError):
        optimize(small_scene, "fresnel", 4)
    with pytest.raises(ConfigurationError):
        optimize(small_scene, "annealing", 2)
    with pytest.raises(ConfigurationError):
        optimize(small_scene, "cim-sa", 3)


def test_exhaustive_size_guard(small_scene):

    large = replace(small_scene, ris_grid=(5, 5))
    with pytest.raises(NumericalError):
        optimize(large, "exhaustive", 2, _params())


def test_quantized_pipeline(small_los_scene):

    exact = optimize(small_los_scene, "exhaustive", 2, _params())
    quantized = optimize(small_los_scene, "exhaustive", 2, _params(quantize_bits=8))
    assert quantized.report.extras["quantize_bits"] == 8
    assert quantized.gain_db <= exact.gain_db + 1e-9
    assert quantized.gain_db >= exact.gain_db - 0.2


def test_reduced_pipeline_never_beats_full_optimum(small_los_scene):

    exact = optimize(small_los_scene, "exhaustive", 2, _params())
    reduced = optimize(small_los_scene, "exhaustive", 2, _params(reduce=True))
    assert reduced.reduction is not None
    assert reduced.gain_db <= exact.gain_db + 1e-9
    assert "reduction" in reduced.summary()


def test_shipped_reduction_threshold():

    assert _params().reduce_threshold_scale == pytest.approx(0.96)
    assert _params(reduce_threshold_scale=1.0).reduce_threshold_scale == 1.0


def test_fully_reduced_solve_keeps_a_trace_row(small_los_scene):

    params = _params(reduce=True, reduce_threshold_scale=0.0)
    result = optimize(small_los_scene, "cim-sa", 4, params)
    assert result.reduction.kept_indices.size == 0
    frame = result.report.trace_frame()
    assert list(frame.columns) == ["step", "best_energy"]
    assert len(frame) == 1
    assert_allclose(frame["best_energy"].iloc[0], result.report.best_energy, rtol=1e-9)


def test_reduction_experiment_nlos_removes_nothing(small_scene):

    experiment = run_reduction_experiment(small_scene, 2, "exhaustive", _params())
    assert experiment.removal_fraction == 0.0
    assert experiment.spins_kept == experiment.spins_total == 6
    assert_allclose(experiment.gain_difference_db, 0.0, atol=1e-9)


def test_capacity_reported_with_noise_power(small_los_scene):

    scene = replace(small_los_scene, noise_power=1e-12)
    result = optimize(scene, "exhaustive", 2, _params())
    expected = math.log2(1 + 10 ** (result.gain_db / 10) / 1e-12)
    assert_allclose(result.capacity, expected, rtol=1e-9)
    assert optimize(small_los_scene, "passive", 2, _params()).capacity is None


def test_size_comparison(small_scene):

    scenes = [small_scene, replace(small_scene, ris_grid=(2, 4), name="bigger")]
    frame = run_size_comparison(scenes, "exhaustive", 2, _params())
    assert list(frame["n_ris"]) == [6, 8]
    assert frame["delta_db"].iloc[0] == 0.0
    assert_allclose(frame["predicted_delta_db"].iloc[1], 20 * math.log10(8 / 6))


# sweeps

def test_sweep_distances():

    d = sweep_distances(0.0, 100.0, 0.25)
    assert d.size == 401
    assert d[0] == 0.0 and d[-1] == 100.0
    assert sweep_distances(5.0, 5.0, 1.0).tolist() == [5.0]
    with pytest.raises(ConfigurationError):
        sweep_distances(10.0, 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        sweep_distances(0.0, 10.0, 0.0)


def test_sweep_reproduces_design_point(small_los_scene):

    result = optimize(small_los_scene, "cim-sa", 2, _params(seed=0))
    sweep = run_sweep(small_los_scene, {"cim-sa": result.phases}, 40.0, 60.0, 0.5, n_jobs=2)
    assert sweep.distances.size == 41
    at_design = sweep.gains["cim-sa"][np.flatnonzero(sweep.distances == 50.0)[0]]
    assert at_design == result.gain_db


def test_sweep_passive_nlos_is_finite(small_scene):

    sweep = run_sweep(small_scene, {"passive": np.ones(6)}, 0.0, 100.0, 5.0, n_jobs=1)
    assert np.all(np.isfinite(sweep.gains["passive"]))


def test_sweep_on_an_element_gives_sentinel(small_los_scene, tmp_path):

    scene = replace(small_los_scene, bs_grid=(1, 1))
    sweep = run_sweep(scene, {"passive": np.ones(6)}, 0.0, 1.0, 1.0, n_jobs=1)
    assert sweep.gains["passive"][0] == -math.inf
    frame = sweep.to_frame()
    assert frame["passive_db"].iloc[0] == GAIN_SENTINEL_DB
    emit_svg(sweep, tmp_path / "gap.svg")


def test_sweep_column_order_follows_masks(small_scene):

    masks = {"b": np.ones(6), "a": -np.ones(6)}
    sweep = run_sweep(small_scene, masks, 45.0, 55.0, 5.0, n_jobs=1)
    swapped = run_sweep(small_scene, {"a": -np.ones(6), "b": np.ones(6)}, 45.0, 55.0, 5.0,
                        n_jobs=1)
    assert sweep.methods == ["b", "a"]
    assert list(sweep.to_frame().columns) == ["d_m", "b_db", "a_db"]
    assert_array_equal(sweep.gains["a"], swapped.gains["a"])


def test_sweep_validation(small_scene):

    with pytest.raises(ConfigurationError):
        run_sweep(small_scene, {}, 0.0, 1.0, 1.0)
    with pytest.raises(ConfigurationError):
        SweepResult(distances=[0.0, 1.0], gains={"x": [1.0, np.nan]})


# emitters

def _sweep():
    return SweepResult(distances=[0.0, 0.25, 0.5],
                       gains={"cim-sa": [-60.1234567, -61.0, -math.inf],
                              "passive": [-70.0, -70.5, -71.0]},
                       metadata={"seed": 0})


def test_emit_csv(tmp_path):

    path = emit_csv(_sweep(), tmp_path / "out" / "sweep.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "d_m,cim-sa_db,passive_db"
    assert lines[1] == "0.000000,-60.123457,-70.000000"
    assert lines[3] == "0.500000,-1000000000.000000,-71.000000"
    frame = read_csv(path)
    assert_allclose(frame["passive_db"], [-70.0, -70.5, -71.0])
    again = emit_csv(_sweep(), tmp_path / "again.csv")
    assert again.read_bytes() == path.read_bytes()


def test_emit_csv_single_row(tmp_path):

    sweep = SweepResult(distances=[50.0], gains={"passive": [-65.0]})
    path = emit_csv(sweep, tmp_path / "one.csv")
    assert path.read_text() == "d_m,passive_db\n50.000000,-65.000000\n"


def test_emit_svg_is_deterministic(tmp_path):

    first = emit_svg(_sweep(), tmp_path / "a.svg").read_bytes()
    second = emit_svg(_sweep(), tmp_path / "b.svg").read_bytes()
    assert first == second
    text = first.decode()
    assert text.startswith("<svg")
    assert text.count("<polyline") == 2
    assert "cim-sa" in text and "passive" in text
    single = render_svg(SweepResult(distances=[50.0], gains={"passive": [-65.0]}))
    assert single.endswith("</svg>\n")


def test_unwritable_path(tmp_path):

    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ConfigurationError):
        emit_csv(_sweep(), blocker / "sweep.csv")


def test_mask_trace_and_report_files(small_los_scene, tmp_path):

    result = optimize(small_los_scene, "cim-sa", 4, _params(seed=2))
    mask_path = write_mask(result.phases, tmp_path / "mask.csv")
    assert mask_path.read_text().splitlines()[0] == "element,index,theta_rad"
    assert_array_equal(read_mask(mask_path, 4).indices, result.phases.indices)
    trace_path = write_trace(result.report, tmp_path / "trace.csv")
    assert trace_path.read_text().startswith("step,best_energy\n")
    report_path = write_report({"scene": "small", **result.summary()}, tmp_path / "report.yml")
    text = report_path.read_text()
    assert text.startswith("scene: small\n")
    assert "gain_db:" in text


# benchmarks

def test_quantization_robustness():

    stats = quantization_robustness(random_instances(100, seed=1, n_max=12), bits=8)
    assert stats["instances"] == 100
    assert stats["within_tolerance"] >= 90


def test_run_bench_table():

    table = run_bench(count=3, seed=0)
    assert list(table.columns) == ["benchmark", "passed", "total", "detail"]
    assert len(table) == 4
    assert (table["total"] == 3).all()
    assert (table["passed"] <= table["total"]).all()
