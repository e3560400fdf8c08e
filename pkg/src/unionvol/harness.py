"""Benchmark harness: run workloads through an estimator, score against truth.

Per estimate the harness emits one record (seed, op index, op kind, estimate,
truth, relative error, cumulative oracle calls); truth comes from the exact
union oracles where the geometry allows and seeded Monte Carlo elsewhere.
Sweeps fan the same workload factory across seeds (optionally across
processes) and merge records deterministically in seed order.
"""

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from .dynamic import DynamicUnionEstimator
from .ranges import RangeReduction
from .sampling import make_rng
from .suffix import SuffixStreamEstimator
from .truth import union_truth

_KINDS = ("dynamic", "ranged-dynamic", "suffix", "ranged-suffix")

_TRUTH_SEED_OFFSET = 0x5EED  # decouples truth sampling from estimator noise


@dataclass
class Record:
    seed: int
    t: int
    op: str
    estimate: float
    truth: float
    rel_err: float
    oracle_calls: int


def _relative_error(estimate, truth):
    if truth > 0:
        return abs(estimate - truth) / truth
    if estimate == 0 or (isinstance(estimate, float) and math.isnan(estimate)):
        return 0.0 if estimate == 0 else float("nan")
    return float("inf")


def make_estimator(kind, n, eps, seed):
    """Estimator instances the harness knows how to drive."""
    if kind == "dynamic":
        return DynamicUnionEstimator(n, eps, seed=seed)
    if kind == "suffix":
        return SuffixStreamEstimator(n, eps, seed=seed)
    if kind == "ranged-dynamic":
        def factory(inner_n, inner_eps, vol_bounds, rng):
            return DynamicUnionEstimator(inner_n, inner_eps, rng=rng,
                                         vol_bounds=vol_bounds)
        return RangeReduction(factory, n, eps, seed=seed)
    if kind == "ranged-suffix":
        def factory(inner_n, inner_eps, vol_bounds, rng):
            return SuffixStreamEstimator(inner_n, inner_eps, rng=rng,
                                         vol_bounds=vol_bounds)
        return RangeReduction(factory, n, eps, seed=seed)
    raise ValueError(f"unknown estimator kind {kind!r}; pick from {_KINDS}")


def run_workload(kind, ops, n, eps, seed):
    """Execute one op sequence; returns the list of estimate records.

    ops is a sequence of (op, payload) pairs: ("insert", obj),
    ("delete", obj), ("estimate", None), or ("suffix", s).
    """
    est = make_estimator(kind, n, eps, seed)
    truth_rng = make_rng(None if seed is None else seed + _TRUTH_SEED_OFFSET)
    suffix_mode = kind in ("suffix", "ranged-suffix")

    live = []
    inserted = []
    seen = []
    records = []
    for t, (op, payload) in enumerate(ops, start=1):
        if op == "insert":
            est.insert(payload)
            live.append(payload)
            inserted.append(payload)
            if all(payload is not o for o in seen):
                seen.append(payload)
        elif op == "delete":
            est.delete(payload)
            for i, o in enumerate(live):
                if o is payload:
                    del live[i]
                    break
            else:
                raise KeyError("workload deletes an object that is not live")
        elif op == "estimate":
            value = est.estimate()
            truth, _ = union_truth(live, rng=truth_rng)
            records.append(Record(
                seed=-1 if seed is None else seed, t=t, op=op,
                estimate=float(value), truth=float(truth),
                rel_err=_relative_error(value, truth),
                oracle_calls=sum(o.stats.total() for o in seen)))
        elif op == "suffix":
            if not suffix_mode:
                raise ValueError("suffix query against a non-suffix estimator")
            s = int(payload)
            value = (est.estimate_suffix(s) if hasattr(est, "estimate_suffix")
                     else est.estimate(s))
            truth, _ = union_truth(inserted[max(s, 1) - 1:], rng=truth_rng)
            records.append(Record(
                seed=-1 if seed is None else seed, t=t, op=op,
                estimate=float(value), truth=float(truth),
                rel_err=_relative_error(value, truth),
                oracle_calls=sum(o.stats.total() for o in seen)))
        else:
            raise ValueError(f"unknown op {op!r}")
    return records


def _sweep_one(args):
    kind, make_workload, n, eps, seed = args
    ops = make_workload(seed)
    return run_workload(kind, ops, n, eps, seed)


def sweep(kind, make_workload, n, eps, seeds, jobs=1):
    """Run make_workload(seed) for every seed; records merged in seed order.

    jobs > 1 fans seeds across processes (make_workload must be picklable);
    the merge order is identical either way.
    """
    t0 = time.monotonic()
    tasks = [(kind, make_workload, n, eps, int(s)) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_seed = list(pool.map(_sweep_one, tasks))
    else:
        per_seed = [_sweep_one(t) for t in tasks]
    records = [r for batch in per_seed for r in batch]
    return records, summarize(records, elapsed=time.monotonic() - t0)


def summarize(records, eps_tol=None, elapsed=None):
    """Aggregate stats; when eps_tol is given, scores the (1 +- tol) window."""
    out = {"queries": len(records)}
    if elapsed is not None:
        out["elapsed_sec"] = elapsed
    if not records:
        return out
    errs = [r.rel_err for r in records if not math.isnan(r.rel_err)]
    out["nan_queries"] = sum(1 for r in records if math.isnan(r.rel_err))
    if errs:
        out["mean_rel_err"] = sum(errs) / len(errs)
        out["max_rel_err"] = max(errs)
    if eps_tol is not None:
        ok = sum(1 for r in records
                 if not math.isnan(r.rel_err) and r.rel_err <= eps_tol)
        out["tolerance"] = eps_tol
        out["within_tolerance"] = ok / len(records)
    out["oracle_calls"] = max(r.oracle_calls for r in records)
    return out


def verify(records, eps_tol, min_rate):
    """Pass/fail gate: the fraction of queries within (1 +- eps_tol) of truth
    must reach min_rate.  NaN estimates count as failures."""
    stats = summarize(records, eps_tol=eps_tol)
    rate = stats.get("within_tolerance", 0.0)
    stats["required_rate"] = min_rate
    stats["passed"] = bool(records) and rate >= min_rate
    return stats


def write_records_csv(path, records):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["seed", "t", "op", "estimate", "truth",
                            "rel_err", "oracle_calls"])
        writer.writeheader()
        for r in records:
            writer.writerow(asdict(r))


def write_summary_json(path, summary):
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
