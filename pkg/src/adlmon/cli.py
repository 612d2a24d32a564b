"""Command-line entry point: ``adlmon <subcommand> ...``.

Exit codes: 0 success, 2 invalid input or arguments, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import activity_model as am
from .dataset import ColumnMapping, load_csv, make_synthetic_records, save_csv
from .edscca import KnowledgeBase, classify_trace, dump_traces, load_traces, observe
from .evaluation import format_confusion, save_confusion, table_columns, table_to_csv, table_to_text
from .features import BEHAVIOR_FEATURES, EMERGENCY_FEATURES
from .pipelines import eval_behavior, eval_emergency
from .trace_sim import SimConfig, generate
from .zones import ZoneMap, load_zone_map, save_zone_map, zones_from_dataset

log = logging.getLogger("adlmon")

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 2, 3


def _write(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _echo_config(args, out_dir):
    if out_dir is None:
        return
    cfg = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()
           if k not in ("func",)}
    _write(Path(out_dir) / "config.json", _json(cfg))


def _definitions(paths):
    if not paths:
        return [am.eating_lunch()]
    defs = []
    for p in paths:
        defs.extend(am.load_definitions(p))
    return defs


# -- subcommands --------------------------------------------------------------

def cmd_enumerate(args):
    definition = _definitions([args.defs] if args.defs else None)[0]
    summary = am.instance_counts(definition)
    print(summary)
    print(f"threshold_weight={am.threshold_weight(definition):.6g}")
    if args.dump:
        rows = ["index,performed,weight,goal_reached"]
        for i, inst in enumerate(am.enumerate_instances(definition)):
            rows.append(f"{i},{' '.join(inst.performed)},{inst.instance_weight:.6g},"
                        f"{str(inst.goal_reached).lower()}")
        _write(args.dump, "\n".join(rows) + "\n")
    return EXIT_OK


def _load_records(args):
    mapping = ColumnMapping.from_file(args.columns) if args.columns else ColumnMapping()
    records = load_csv(args.data, mapping)
    log.info("loaded %d records from %s", len(records), args.data)
    return records


def _report_eval(result, args):
    text = (f"records: {result.n_input} loaded, {result.n_clean} after outlier removal, "
            f"{result.n_train} train / {result.n_test} test\n"
            f"model: {json.dumps(result.model, sort_keys=True)}\n")
    text += format_confusion(result.matrix) if result.n_test else "accuracy: undefined (empty test set)\n"
    print(text, end="")
    if args.out:
        out = Path(args.out)
        cols = table_columns(result.classes, result.label_name)
        _write(out / "report.txt", text)
        _write(out / "predictions.csv", table_to_csv(result.table, cols))
        _write(out / "predictions.txt", table_to_text(result.table, cols))
        save_confusion(result.matrix, out / "confusion.json")
        _write(out / "metrics.json", _json({
            **(result.report.to_dict() if result.report else {"accuracy": None}),
            "model": result.model,
            "counts": {"input": result.n_input, "clean": result.n_clean,
                       "train": result.n_train, "test": result.n_test},
        }))
        _echo_config(args, out)


def cmd_eval_behavior(args):
    result = eval_behavior(
        _load_records(args), k=args.k or 11, vote=args.vote, train_fraction=args.train_fraction,
        seed=args.seed, outlier_z=args.outlier_z, features=args.features or BEHAVIOR_FEATURES,
        scale=args.scale, test_on_train=args.test_on_train)
    _report_eval(result, args)
    return EXIT_OK


def cmd_eval_emergency(args):
    result = eval_emergency(
        _load_records(args), k=args.k or 5, vote=args.vote, train_fraction=args.train_fraction,
        seed=args.seed, outlier_z=args.outlier_z, features=args.features or EMERGENCY_FEATURES,
        scale=args.scale, test_on_train=args.test_on_train)
    _report_eval(result, args)
    return EXIT_OK


def cmd_detect(args):
    traces = load_traces(args.traces)
    defs = _definitions(args.defs)
    kb = KnowledgeBase.from_definitions(defs)
    zmap = load_zone_map(args.zones) if args.zones else ZoneMap.default()
    if args.lie_duration:
        zmap = zmap.with_min_lie_duration(args.lie_duration)
    verdicts = []
    for trace in traces:
        v = classify_trace(kb, zmap, trace, require_all_start=not args.any_start)
        verdicts.append({"trace": trace.name, **v.to_dict()})
        kb = observe(kb, trace, defs)
    summary = {
        "traces": len(verdicts),
        "Emergency": sum(v["outcome"] == "Emergency" for v in verdicts),
        "NonEmergency": sum(v["outcome"] == "NonEmergency" for v in verdicts),
        "branches": {b: sum(v["branch"] == b for v in verdicts)
                     for b in sorted({v["branch"] for v in verdicts})},
    }
    doc = _json({"verdicts": verdicts, "summary": summary})
    if args.out:
        _write(Path(args.out) / "verdicts.json", doc)
        _echo_config(args, args.out)
    else:
        sys.stdout.write(doc)
    print(f"{summary['traces']} traces: {summary['Emergency']} Emergency, "
          f"{summary['NonEmergency']} NonEmergency", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args):
    definition = _definitions([args.defs] if args.defs else None)[0]
    config = SimConfig(seed=args.seed, subset_policy=args.policy, n=args.n,
                       behavior_tail=None if args.tail == "none" else args.tail,
                       mismatch_rate=args.mismatch_rate, event_behavior=args.event_behavior)
    traces = generate(definition, config)
    doc = dump_traces(traces)
    if args.out:
        _write(args.out, doc)
        print(f"wrote {len(traces)} traces to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(doc)
    return EXIT_OK


def cmd_zones(args):
    zmap = zones_from_dataset(_load_records(args), min_lie_duration=args.lie_duration)
    if args.out:
        save_zone_map(zmap, args.out)
    else:
        sys.stdout.write(_json(zmap.to_dict()))
    return EXIT_OK


def cmd_synth(args):
    records = make_synthetic_records(args.n_per_class, args.seed, args.separation, args.noise)
    save_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="adlmon", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="instance counts for an activity definition")
    e.add_argument("--defs", help="definition JSON (default: bundled eating-lunch)")
    e.add_argument("--dump", help="write every instance to this CSV file")
    e.set_defaults(func=cmd_enumerate)

    for name, func, k_default in (("eval-behavior", cmd_eval_behavior, 11),
                                  ("eval-emergency", cmd_eval_emergency, 5)):
        s = sub.add_parser(name, help=f"k-NN evaluation (default k={k_default})")
        s.add_argument("--data", required=True, help="sensor CSV")
        s.add_argument("--columns", help="column-mapping JSON")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--train-fraction", type=float, default=0.75)
        s.add_argument("--k", type=int, default=k_default)
        s.add_argument("--vote", choices=("uniform", "inverse"), default="inverse")
        s.add_argument("--features", help="comma-separated feature names")
        s.add_argument("--outlier-z", type=float, default=3.0, help="0 disables outlier removal")
        s.add_argument("--scale", action="store_true", help="min-max scale features")
        s.add_argument("--test-on-train", action="store_true", help="score on the training split")
        s.add_argument("--out", help="output directory")
        s.set_defaults(func=func)

    d = sub.add_parser("detect", help="classify activity traces as emergency or not")
    d.add_argument("--traces", required=True)
    d.add_argument("--defs", action="append", help="definition JSON (repeatable)")
    d.add_argument("--zones", help="zone-map JSON (default: kitchen/bedroom/office/toilet)")
    d.add_argument("--lie-duration", type=float, default=0.0)
    d.add_argument("--any-start", action="store_true", help="one start pair suffices")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", help="output directory")
    d.set_defaults(func=cmd_detect)

    s = sub.add_parser("simulate", help="generate traces from a definition")
    s.add_argument("--defs")
    s.add_argument("--policy", choices=("all", "random"), default="all")
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tail", default="lying", help="behaviour appended to each trace, or 'none'")
    s.add_argument("--event-behavior", default="standing")
    s.add_argument("--mismatch-rate", type=float, default=0.0)
    s.add_argument("--out", help="trace JSON file")
    s.set_defaults(func=cmd_simulate)

    z = sub.add_parser("zones", help="infer and dump the zone map of a dataset")
    z.add_argument("--data", required=True)
    z.add_argument("--columns")
    z.add_argument("--lie-duration", type=float, default=0.0)
    z.add_argument("--out")
    z.set_defaults(func=cmd_zones)

    y = sub.add_parser("synth", help="write a synthetic labelled sensor CSV")
    y.add_argument("--out", required=True)
    y.add_argument("--n-per-class", type=int, default=60)
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--separation", type=float, default=10.0)
    y.add_argument("--noise", type=float, default=1.0)
    y.set_defaults(func=cmd_synth)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValueError as exc:
        # ValidationError, JSONDecodeError and sklearn input checks
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
