"""Command line front end.

Subcommands::

    convstream run      --model m.json --csv trace.csv [--mode streaming|batch]
    convstream simulate --model m.json [--profile p.json] [--mode both|...]
                        [--samples N] [--timeline out.csv] [--histogram out.csv]
    convstream plan     --model m.json [--samples N] [--report]
    convstream gen      --layers SPEC --out m.json [--seed S]

Exit codes: 0 success, 2 malformed input (JSON, config, unreadable file),
3 data that parses but has the wrong shape (short trace, column mismatch).
Reports go to stdout as JSON; diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import gen, modelio, sim
from .errors import (
    ConfigError,
    ConvstreamError,
    IncompleteSequenceError,
    ParseError,
    SequenceOverrunError,
    ShapeError,
    ValidationError,
)
from .network import batch_infer, stream_infer

_USAGE_ERRORS = (ParseError, ValidationError, ConfigError)
_DATA_ERRORS = (ShapeError, IncompleteSequenceError, SequenceOverrunError)


def _read_csv(path, channels):
    """Read a sample trace: one row per sample, one column per channel.
    Blank lines and '#' comments are skipped; a single leading header row
    is tolerated."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        raw = [
            row for row in csv.reader(fh)
            if row and not row[0].lstrip().startswith("#") and any(c.strip() for c in row)
        ]
    if raw and not _is_numeric_row(raw[0]):
        raw = raw[1:]
    rows = []
    for i, row in enumerate(raw, start=1):
        if len(row) != channels:
            raise ShapeError(
                f"{path}: row {i}: expected {channels} column(s), got {len(row)}"
            )
        try:
            rows.append([float(cell) for cell in row])
        except ValueError:
            bad = next(c for c in row if not _is_number(c))
            raise ParseError(
                f"{path}: row {i}: not a number: {bad.strip()!r}"
            ) from None
    return rows


def _is_number(cell):
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _is_numeric_row(row):
    return all(_is_number(cell) for cell in row)


def _load_trace(path, model):
    rows = _read_csv(path, model.input_channels)
    need = model.input_length
    if len(rows) < need:
        raise ShapeError(f"{path}: expected {need} samples, got {len(rows)}")
    return rows[:need]  # extra rows beyond one sequence are ignored


def _emit(doc):
    print(json.dumps(doc, indent=2))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_run(args):
    model = modelio.load_model_file(args.model)
    x = _load_trace(args.csv, model)
    report = {
        "model": {
            "params": modelio.param_count(model),
            "weight_bytes": modelio.weight_storage_bytes(model),
        },
        "mode": args.mode,
        "feature_dim": model.feature_dim,
        "memory": {
            "streaming_total_bytes":
                modelio.plan_memory(model, modelio.STREAMING).total_bytes,
            "batch_total_bytes":
                modelio.plan_memory(model, modelio.BATCH).total_bytes,
        },
    }
    if args.mode == "streaming":
        probs, reports = stream_infer(model, x)
        macs = [r.macs for r in reports]
        report["step_macs"] = {
            "min": min(macs),
            "mean": sum(macs) / len(macs),
            "max": max(macs),
        }
    else:
        probs = batch_infer(model, x)
    report["probabilities"] = [float(p) for p in probs]
    report["argmax"] = int(probs.argmax())
    report["exit_status"] = 0
    _emit(report)
    return 0


def _cmd_simulate(args):
    model = modelio.load_model_file(args.model)
    profile = (sim.load_profile_file(args.profile) if args.profile
               else sim.TaskProfile())
    n = args.samples
    report = {"samples": n if n is not None else model.input_length}
    modes = ([args.mode] if args.mode != "both"
             else [modelio.STREAMING, modelio.BATCH])
    traces = {}
    for mode in modes:
        traces[mode] = sim.simulate(model, profile, mode, n=n)
        report[mode] = sim.trace_summary(traces[mode])
    if args.mode == "both":
        report["comparison"] = sim.compare_modes(model, profile, n=n)
    if modelio.STREAMING in traces:
        rt = sim.check_realtime(model, profile, n=n)
        report["realtime"] = {
            "feasible": rt.feasible,
            "max_step_cost_ms": rt.max_step_cost_ms,
            "interval_budget_ms": rt.interval_budget_ms,
            "deadline_misses": rt.deadline_misses,
        }
        if args.timeline:
            with open(args.timeline, "w", encoding="utf-8") as fh:
                fh.write(sim.timeline_csv(traces[modelio.STREAMING]))
        if args.histogram:
            with open(args.histogram, "w", encoding="utf-8") as fh:
                fh.write(sim.histogram_csv(traces[modelio.STREAMING]))
    elif args.timeline or args.histogram:
        raise ConfigError("--timeline/--histogram need the streaming mode")
    _emit(report)
    return 0


def _plan_dict(plan):
    return {
        "entries": [
            {"owner": e.owner, "channels": e.channels,
             "capacity": e.capacity, "bytes": e.bytes}
            for e in plan.entries
        ],
        "input_bytes": plan.input_bytes,
        "activation_bytes": plan.activation_bytes,
        "collector_bytes": plan.collector_bytes,
        "head_scratch_bytes": plan.head_scratch_bytes,
        "weight_bytes": plan.weight_bytes,
        "total_bytes": plan.total_bytes,
    }


def _cmd_plan(args):
    model = modelio.load_model_file(args.model)
    plans = {
        mode: modelio.plan_memory(model, mode, n=args.samples)
        for mode in (modelio.STREAMING, modelio.BATCH)
    }
    if args.report:
        _emit({mode: _plan_dict(p) for mode, p in plans.items()})
        return 0
    for mode, plan in plans.items():
        print(f"[{mode}]")
        for e in plan.entries:
            print(f"  {e.owner}: {e.channels} ch x {e.capacity} = {e.bytes} B")
        if plan.collector_bytes:
            print(f"  collector: {plan.collector_bytes} B")
        print(f"  head scratch: {plan.head_scratch_bytes} B")
        print(f"  total (runtime): {plan.total_bytes} B")
        print(f"  weights (flash): {plan.weight_bytes} B")
    return 0


def _cmd_gen(args):
    model = gen.model_from_spec(args.layers, seed=args.seed)
    modelio.save_model_file(model, args.out)
    print(f"wrote {args.out}: {modelio.param_count(model)} params, "
          f"{modelio.weight_storage_bytes(model)} weight bytes",
          file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="convstream",
        description="streaming 1D-CNN inference, planning, and scheduling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="classify one CSV trace")
    p.add_argument("--model", required=True)
    p.add_argument("--csv", required=True)
    p.add_argument("--mode", choices=["streaming", "batch"], default="streaming")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("simulate", help="schedule simulation and latency")
    p.add_argument("--model", required=True)
    p.add_argument("--profile", help="task profile JSON (defaults built in)")
    p.add_argument("--mode", choices=["streaming", "batch", "both"],
                   default="both")
    p.add_argument("--samples", type=int)
    p.add_argument("--timeline", help="write per-interval CSV here")
    p.add_argument("--histogram", help="write step-cost histogram CSV here")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("plan", help="static memory plan for both modes")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", type=int, help="batch-mode sequence length")
    p.add_argument("--report", action="store_true", help="JSON instead of table")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("gen", help="generate a random model from a layer spec")
    p.add_argument("--layers", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConvstreamError as exc:  # anything else of ours is a usage bug
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
