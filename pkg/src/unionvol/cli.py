"""Command line benchmark driver.

Subcommands:
    gen     write a workload (JSON lines) from one of the named generators
    run     execute a workload with one estimator; CSV records + JSON summary
    sweep   run the same workload across many estimator seeds
    verify  score a CSV of records against a tolerance gate

The default seed comes from --seed, falling back to the UNIONVOL_SEED
environment variable, falling back to 0.
"""

import argparse
import csv
import os
import sys

from . import harness, serialize, workloads
from .sampling import make_rng

_GEN_KINDS = ("mixed-boxes", "mixed-shapes", "insert-delete",
              "sliding-window", "volume-ramp")


def _default_seed(args):
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("UNIONVOL_SEED", "0"))


def _volume_window(n, eps):
    """Safely inside the admissible window [(3n/eps)^2, (3n/eps)^4]."""
    base = 3.0 * n / eps
    return base ** 2 * 1.05, base ** 4 * 0.95


def _cmd_gen(args):
    seed = _default_seed(args)
    rng = make_rng(seed)
    vol_lo, vol_hi = _volume_window(args.n, args.eps)
    kinds = {"mixed-boxes": ("box",),
             "mixed-shapes": ("box", "triangle"),
             "insert-delete": ("box",),
             "sliding-window": ("box",),
             "volume-ramp": ("box",)}[args.kind]

    if args.kind == "volume-ramp":
        objs = workloads.volume_ramp(rng, args.objects, args.d, vol_lo,
                                     args.ramp_ratio, kinds=kinds)
    else:
        objs = workloads.random_objects(rng, args.objects, args.d,
                                        vol_lo, vol_hi, kinds=kinds)

    if args.kind == "sliding-window":
        ops = workloads.sliding_window(objs, args.window)
    elif args.kind == "insert-delete":
        ops = workloads.insert_all_delete_all(objs)
    else:
        ops = workloads.mixed_dynamic(rng, objs, args.ops)

    docs = []
    for op, payload in ops:
        if op in ("insert", "delete"):
            docs.append({"op": op, "object": serialize.object_to_json(payload)})
        elif op == "suffix":
            docs.append({"op": "estimate", "s": int(payload)})
        else:
            docs.append({"op": "estimate"})
    serialize.write_workload(args.out, docs)
    print(f"wrote {len(docs)} ops to {args.out}")
    return 0


class _FileWorkload:
    """Rebuilds fresh object handles per call so estimator runs are isolated;
    picklable, which is what lets sweeps cross process boundaries."""

    def __init__(self, path, suffix_mode):
        self.docs = serialize.read_workload(path)
        self.suffix_mode = suffix_mode

    def __call__(self, seed=None):
        ops = []
        live = {}
        t = 0
        for doc in self.docs:
            op = doc["op"]
            if op == "insert":
                t += 1
                obj = serialize.object_from_json(doc["object"])
                live.setdefault(serialize.canonical_key(doc["object"]),
                                []).append(obj)
                ops.append(("insert", obj))
            elif op == "delete":
                t += 1
                key = serialize.canonical_key(doc["object"])
                stack = live.get(key)
                if not stack:
                    raise ValueError(f"delete with no matching insert: {key}")
                ops.append(("delete", stack.pop()))
            elif "s" in doc:
                ops.append(("suffix", int(doc["s"])))
            else:
                ops.append(("estimate", None))
        return ops


def _n_for(ops, explicit):
    if explicit is not None:
        return explicit
    return len(ops) + 1


def _cmd_run(args):
    seed = _default_seed(args)
    suffix_mode = args.estimator in ("suffix", "ranged-suffix")
    ops = _FileWorkload(args.workload, suffix_mode)()
    n = _n_for(ops, args.n)
    records = harness.run_workload(args.estimator, ops, n, args.eps, seed)
    return _emit(args, records)


def _cmd_sweep(args):
    seed = _default_seed(args)
    suffix_mode = args.estimator in ("suffix", "ranged-suffix")
    make_workload = _FileWorkload(args.workload, suffix_mode)
    ops = make_workload()
    n = _n_for(ops, args.n)
    seeds = range(seed, seed + args.seeds)
    records, summary = harness.sweep(args.estimator, make_workload, n,
                                     args.eps, seeds, jobs=args.jobs)
    return _emit(args, records, summary)


def _emit(args, records, summary=None):
    tol = getattr(args, "tol", None)
    if summary is None:
        summary = harness.summarize(records, eps_tol=tol)
    elif tol is not None:
        summary.update(harness.summarize(records, eps_tol=tol))
    if args.csv:
        harness.write_records_csv(args.csv, records)
    if args.summary:
        harness.write_summary_json(args.summary, summary)
    for key in sorted(summary):
        print(f"{key}: {summary[key]}")
    return 0


def _cmd_verify(args):
    records = []
    with open(args.csv_in) as fh:
        for row in csv.DictReader(fh):
            records.append(harness.Record(
                seed=int(row["seed"]), t=int(row["t"]), op=row["op"],
                estimate=float(row["estimate"]), truth=float(row["truth"]),
                rel_err=float(row["rel_err"]),
                oracle_calls=int(row["oracle_calls"])))
    stats = harness.verify(records, args.tol, args.min_rate)
    for key in sorted(stats):
        print(f"{key}: {stats[key]}")
    print("PASS" if stats["passed"] else "FAIL")
    return 0 if stats["passed"] else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="unionvol",
        description="dynamic union-volume estimation benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a workload file")
    p.add_argument("--kind", choices=_GEN_KINDS, default="mixed-boxes")
    p.add_argument("--objects", type=int, default=64)
    p.add_argument("--ops", type=int, default=200)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--window", type=int, default=16)
    p.add_argument("--ramp-ratio", type=float, default=1e6)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    for name, fn in (("run", _cmd_run), ("sweep", _cmd_sweep)):
        p = sub.add_parser(name, help=f"{name} a workload")
        p.add_argument("--estimator", choices=harness._KINDS, default="dynamic")
        p.add_argument("--workload", required=True)
        p.add_argument("--n", type=int, default=None,
                       help="stream bound (default: ops + 1)")
        p.add_argument("--eps", type=float, default=0.25)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--csv", default=None)
        p.add_argument("--summary", default=None)
        if name == "sweep":
            p.add_argument("--seeds", type=int, default=10)
            p.add_argument("--jobs", type=int, default=1)
        p.set_defaults(func=fn)

    p = sub.add_parser("verify", help="score a records CSV against a gate")
    p.add_argument("--csv-in", required=True)
    p.add_argument("--tol", type=float, required=True)
    p.add_argument("--min-rate", type=float, required=True)
    p.set_defaults(func=_cmd_verify)

    args = parser.parse_args(argv)
    if getattr(args, "eps", None) is not None and not (0 < args.eps < 1):
        parser.error("--eps must be in (0, 1)")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
