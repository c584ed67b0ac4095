"""=== impulse-sim command line =====================================================================================
    impulse-sim run MODEL SPIKES [-o OUT] [--vmem-trace CSV] [--report CSV] [--oracle-check] [--trace-db DB] ...
    impulse-sim sweep [--grid 0,0.25,...] [--at 0.85] [--out CSV]
    impulse-sim map MODEL
    impulse-sim selftest

Exit codes: 0 ok, 1 oracle divergence / failed selftest / simulator error, 2 schema or shape error,
3 capacity error, 4 I/O error. Summaries go to stdout, logging to stderr.
==================================================================================================================="""

import argparse
import logging
import os
import sys
from typing import Optional
from imp_config import conf
from imp_energy.accounting import account, write_cost_csv
from imp_energy.sweep import DEFAULT_GRID, edp_sweep, write_sweep_csv
from imp_energy.table import resolve_energy_table
from imp_macro.exhaustive import check_adder_exhaustive, check_comparator_exhaustive
from imp_mapper.mapping import format_mapping_report, map_network
from imp_messages.errors import CapacityError, ImpulseError, ModelSchemaError, ShapeMismatchError
from imp_oracle.reference import RefNetwork, compare, ref_run
from imp_runtime.archive import archive_run
from imp_runtime.engine import compile_network, run_inference
from imp_runtime.spikes import SpikeTrain, compute_sparsity, read_spike_file, write_spike_file, write_vtrace_csv
from imp_cli.model_file import load_model_file
from log_tools.log_setup import setup_logger

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_SCHEMA = 2
EXIT_CAPACITY = 3
EXIT_IO = 4


def _neuron_ref(text: str) -> tuple:
    try:
        layer, neuron = text.split(":")
        return int(layer), int(neuron)
    except ValueError:
        raise argparse.ArgumentTypeError("expected LAYER:NEURON, got '{}'".format(text))


def parse_grid(text: str) -> list:
    """'0,0.25,0.5' -> [0.0, 0.25, 0.5]; raises ValueError on an empty or out of range grid."""
    points = [float(p) for p in text.split(",") if p.strip()]
    if not points:
        raise ValueError("empty sparsity grid")
    for p in points:
        if not 0.0 <= p <= 1.0:
            raise ValueError("sparsity {} outside [0, 1]".format(p))
    return points


# COMMANDS                                                                                  cmds    - START -

def cmd_run(args) -> int:
    model = load_model_file(args.model)
    strict = args.strict or model.strict_mode or conf.STRICT_MODE
    saturate = args.saturate or model.saturate or conf.SATURATE
    timesteps = args.timesteps or model.timesteps
    network = compile_network(model.layers, strict=strict, saturate=saturate,
                              cycles_per_instruction=conf.CYCLES_PER_INSTRUCTION)
    given = read_spike_file(args.spikes, {args.input_layer: network.input_width}, timesteps)
    train = SpikeTrain({0: given.spikes[args.input_layer]})
    result = run_inference(network, train, args.trace_neuron or None)

    write_spike_file(args.spikes_out, result.spikes)
    if args.vmem_trace:
        write_vtrace_csv(args.vmem_trace, result.vtrace)
    table = resolve_energy_table(model.energy_table, base_dir=os.path.dirname(os.path.abspath(args.model)))
    report = account(result.trace, table)
    if args.report:
        write_cost_csv(args.report, report)

    sparsity = compute_sparsity(result.stats)
    print("macros: {}".format(network.n_macros))
    print("timesteps: {}".format(timesteps))
    for layer in sorted(sparsity.per_layer):
        print("layer {} sparsity: {:.4f}".format(layer, sparsity.layer_mean(layer)))
    print("overall sparsity: {:.4f}".format(sparsity.overall))
    for kind, n in sorted(result.stats.instruction_counts.items()):
        print("{}: {}".format(kind, n))
    print("overflow events: {}".format(result.stats.overflow_events))
    print("cost: {}".format(report.summary()))

    if args.trace_db:
        run_id = archive_run(args.trace_db, args.model, result, report, network.n_macros)
        print("archived run: {}".format(run_id))
    if args.oracle_check:
        comparison = compare(result, ref_run(RefNetwork.from_specs(model.layers, saturate), train))
        print("oracle: {}".format(comparison))
        if not comparison.equal:
            lg.error("diverged  : {}".format(comparison))
            return EXIT_FAILED
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = parse_grid(args.grid)
    at = parse_grid(args.at) if args.at else []
    table = resolve_energy_table(args.energy_table)
    curve = edp_sweep(grid + at, table, seed=args.seed)
    grid_curve, at_curve = curve[:len(grid)], curve[len(grid):]
    if args.out:
        write_sweep_csv(args.out, grid_curve)
    else:
        print("sparsity,edp_pj_ns,reduction_pct")
        for p in grid_curve:
            print("{:.4f},{:.4f},{:.4f}".format(p.sparsity, p.edp_per_neuron, p.reduction_pct))
    for p in at_curve:
        print("reduction at {:.2f}: {:.2f}%".format(p.sparsity, p.reduction_pct))
    return EXIT_OK


def cmd_map(args) -> int:
    model = load_model_file(args.model)
    print(format_mapping_report(map_network(model.layers)))
    return EXIT_OK


def cmd_selftest(args) -> int:
    adder = check_adder_exhaustive()
    print("adder: {} mismatch(es)".format(adder))
    comparator = check_comparator_exhaustive()
    print("comparator: {} mismatch(es)".format(comparator))
    return EXIT_OK if adder == 0 and comparator == 0 else EXIT_FAILED

# COMMANDS                                                                                  cmds    - ENDED -


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="impulse-sim", description="Bit-accurate CIM SRAM macro SNN simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run inference of a model on a spike train")
    run.add_argument("model", help="JSON model file")
    run.add_argument("spikes", help="input spike train, t<TAB>layer<TAB>neuron lines")
    run.add_argument("-o", "--spikes-out", default="spikes_out.tsv", help="output spike train")
    run.add_argument("--vmem-trace", help="V trace CSV (t,layer,neuron,v_value)")
    run.add_argument("--trace-neuron", type=_neuron_ref, action="append",
                     help="LAYER:NEURON to trace; repeatable, default all neurons of the last layer")
    run.add_argument("--report", help="energy report CSV (kind,count,energy_pj,cycles)")
    run.add_argument("--oracle-check", action="store_true", help="compare against the reference model")
    run.add_argument("--trace-db", help="SQLite file to archive the run and its trace into")
    run.add_argument("--strict", action="store_true", help="strict mapping / spike buffer checks")
    run.add_argument("--saturate", action="store_true", help="saturating instead of wrapping V arithmetic")
    run.add_argument("--timesteps", type=int, help="override the model's timesteps")
    run.add_argument("--input-layer", type=int, default=0, help="layer of the spike file used as input")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="EDP per neuron versus input sparsity")
    sweep.add_argument("--grid", default=",".join(str(s) for s in DEFAULT_GRID), help="comma separated sparsities")
    sweep.add_argument("--at", help="comma separated sparsities to report the EDP reduction at")
    sweep.add_argument("--out", help="sweep CSV (sparsity,edp_pj_ns,reduction_pct), stdout if omitted")
    sweep.add_argument("--energy-table", help="JSON energy table")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.set_defaults(func=cmd_sweep)

    mapping = sub.add_parser("map", help="print the mapping report of a model")
    mapping.add_argument("model")
    mapping.set_defaults(func=cmd_map)

    selftest = sub.add_parser("selftest", help="exhaustive adder and comparator checks")
    selftest.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[list] = None) -> int:
    """=== Function name: main ========================================================================================
    Parses argv, runs the subcommand and maps the error classes onto exit codes.
    ==================================================================================================================="""
    args = build_parser().parse_args(argv)
    setup_logger(conf)
    try:
        return args.func(args)
    except (ModelSchemaError, ShapeMismatchError) as e:
        lg.error("rejected  : {}".format(e))
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_SCHEMA
    except CapacityError as e:
        lg.error("capacity  : {} (required macros: {})".format(e, e.required_macros))
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_CAPACITY
    except OSError as e:
        lg.error("io        : {}".format(e))
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_IO
    except ImpulseError as e:
        lg.error("failed    : {}".format(e))
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_FAILED
    except ValueError as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
