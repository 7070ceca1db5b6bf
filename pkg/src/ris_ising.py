"""
Command-line entry point.

    python src/ris_ising.py optimize --scenario paper_5476 --method cim-sa --level 2
    python src/ris_ising.py sweep --scenario paper_5476 --method cim-sa,successive,fresnel
    python src/ris_ising.py reduce --scenario paper_22201_los
    python src/ris_ising.py bench --instances 100

Exit codes: 0 on success, 2 on configuration or geometry errors, 3 on numerical failures.
"""
import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from harness.bench import run_bench
from harness.emitters import emit_csv, emit_svg, write_mask, write_report, write_trace
from harness.pipeline import METHODS, OptimizeParams, optimize, run_reduction_experiment
from harness.scenario import load_scenario
from harness.sweep import run_sweep
from load_config import LoadDirectoriesConfig, LoadSolverConfig
from scene.geometry import VARIANT_NAMES, PropagationVariant, SceneConfig
from utils.errors import ConfigurationError, DegenerateGeometryError, NumericalError
from utils.utilities import setup_logging

logger = logging.getLogger("ris_ising")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", default="paper_5476",
                        help="scenario file or shipped preset name")
    parser.add_argument("--level", type=int, choices=(2, 4), default=2,
                        help="phase levels: 2 (binary) or 4 (quaternary)")
    parser.add_argument("--seed", type=int, default=None, help="seed of the stochastic solvers")
    parser.add_argument("--variant", choices=VARIANT_NAMES,
                        default=None, help="distance law of the RIS links")
    link = parser.add_mutually_exclusive_group()
    link.add_argument("--los", dest="los", action="store_true", default=None,
                      help="include the direct BS-UE path")
    link.add_argument("--nlos", dest="los", action="store_false",
                      help="drop the direct BS-UE path")
    parser.add_argument("--reduce", action="store_true", help="fix field-dominated spins first")
    parser.add_argument("--reduce-threshold-scale", type=float, default=None)
    parser.add_argument("--quantize-bits", type=int, default=None,
                        help="solve a fixed-point copy of the couplings with this many bits")
    parser.add_argument("--unnormalized-quaternary", action="store_true",
                        help="build the quaternary model over {+-1 +-j} without 1/sqrt(2)")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--log-level", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-ising",
        description="RIS discrete phase optimization through Ising-model annealing.")
    sub = parser.add_subparsers(dest="command", required=True)

    opt = sub.add_parser("optimize", help="optimize the mask at the design point")
    _add_common(opt)
    opt.add_argument("--method", choices=METHODS, default="cim-sa")
    opt.add_argument("--trace", action="store_true", help="write the solver energy trace")

    sweep = sub.add_parser("sweep", help="optimize masks, then sweep the UE distance")
    _add_common(sweep)
    sweep.add_argument("--method", default="cim-sa,successive,fresnel,passive",
                       help="comma-separated methods, one CSV column each")
    sweep.add_argument("--d-start", type=float, default=None)
    sweep.add_argument("--d-stop", type=float, default=None)
    sweep.add_argument("--d-step", type=float, default=None)

    red = sub.add_parser("reduce", help="compare full and spin-reduced solves")
    _add_common(red)
    red.add_argument("--method", choices=("cim-sa", "cim-bif", "exhaustive"), default="cim-sa")

    bench = sub.add_parser("bench", help="oracle benchmarks on random small instances")
    bench.add_argument("--instances", type=int, default=100)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--quantize-bits", type=int, default=None)
    bench.add_argument("--out", default=None)
    bench.add_argument("--log-level", default=None)
    return parser


def _scene(args) -> SceneConfig:
    scene = load_scenario(args.scenario)
    if args.variant is not None:
        scene = replace(scene, propagation_variant=PropagationVariant(args.variant))
    if args.los is not None:
        scene = replace(scene, los_enabled=args.los)
    return scene.validate()


def _params(args) -> OptimizeParams:
    return OptimizeParams.from_config(
        seed=args.seed,
        reduce=args.reduce or None,
        reduce_threshold_scale=args.reduce_threshold_scale,
        quantize_bits=args.quantize_bits,
        quaternary_normalized=False if args.unnormalized_quaternary else None,
    )


def _out_dir(args, label: str) -> Path:
    if args.out is not None:
        return Path(args.out)
    return Path(LoadDirectoriesConfig().results_dir) / label


def cmd_optimize(args) -> str:
    scene = _scene(args)
    result = optimize(scene, args.method, args.level, _params(args))
    out = _out_dir(args, f"{scene.name}_{args.method}_L{args.level}")
    if result.phases is not None:
        write_mask(result.phases, out / "mask.csv")
    if args.trace:
        write_trace(result.report, out / "trace.csv")
    write_report({"scene": scene.name, **result.summary()}, out / "report.yml")
    return f"{scene.name} {args.method} L={args.level}: gain {result.gain_db:.3f} dB -> {out}"


def cmd_sweep(args) -> str:
    scene = _scene(args)
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    if not methods:
        raise ConfigurationError("--method needs at least one method")
    params = _params(args)
    masks, design = {}, {}
    for method in methods:
        result = optimize(scene, method, args.level, params)
        masks[method] = result.coefficients
        design[method] = result.summary()
    sweep = run_sweep(scene, masks, args.d_start, args.d_stop, args.d_step,
                      metadata={"level": args.level, "seed": args.seed})
    out = _out_dir(args, f"{scene.name}_sweep_L{args.level}")
    emit_csv(sweep, out / "sweep.csv")
    emit_svg(sweep, out / "sweep.svg")
    write_report({"scene": scene.name, "sweep": sweep.metadata, "design_point": design},
                 out / "report.yml")
    gains = ", ".join(f"{m} {design[m]['gain_db']:.2f} dB" for m in methods)
    return f"{scene.name} sweep of {len(sweep.distances)} points ({gains}) -> {out}"


def cmd_reduce(args) -> str:
    scene = _scene(args)
    experiment = run_reduction_experiment(scene, args.level, args.method, _params(args))
    out = _out_dir(args, f"{scene.name}_reduce_L{args.level}")
    write_report({"scene": scene.name, "method": args.method, "level": args.level,
                  **experiment.summary()}, out / "report.yml")
    return (f"{scene.name}: full {experiment.gain_full_db:.3f} dB, reduced "
            f"{experiment.gain_reduced_db:.3f} dB, {experiment.spins_kept}/"
            f"{experiment.spins_total} spins kept -> {out}")


def cmd_bench(args) -> str:
    bits = args.quantize_bits or LoadSolverConfig().quantize_bits
    table = run_bench(args.instances, args.seed, bits)
    out = _out_dir(args, "bench")
    out.mkdir(parents=True, exist_ok=True)
    table.to_csv(out / "bench.csv", index=False, lineterminator="\n")
    return table.to_string(index=False)


COMMANDS = {"optimize": cmd_optimize, "sweep": cmd_sweep, "reduce": cmd_reduce,
            "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        print(COMMANDS[args.command](args))
    except (ConfigurationError, DegenerateGeometryError) as exc:
        logger.error("%s", exc)
        return 2
    except NumericalError as exc:
        logger.error("numerical failure: %s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
