import csv
import json
import math

import numpy as np
import pytest

from unionvol import cli, harness, workloads
from unionvol.serialize import read_workload
from unionvol.truth import union_truth

N, EPS = 16, 0.5  # admissible volumes for these parameters sit in [9216, 8.5e7]
VOL_LO, VOL_HI = 1e4, 1e6


def _boxes(seed, count):
    rng = np.random.default_rng(seed)
    return workloads.random_objects(rng, count, 2, VOL_LO, VOL_HI)


class TestWorkloadGenerators:
    def test_box_volume_window(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            box = workloads.random_box(rng, 3, VOL_LO, VOL_HI)
            assert VOL_LO * 0.999 <= box.size() <= VOL_HI * 1.001

    def test_triangle_area_window(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            tri = workloads.random_triangle(rng, VOL_LO, VOL_HI)
            assert VOL_LO * 0.999 <= tri.size() <= VOL_HI * 1.001

    def test_ball_volume_window(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            ball = workloads.random_ball(rng, 2, VOL_LO, VOL_HI)
            assert VOL_LO * 0.999 <= ball.size() <= VOL_HI * 1.001

    def test_mixed_kinds_and_validation(self):
        rng = np.random.default_rng(3)
        objs = workloads.random_objects(rng, 40, 2, VOL_LO, VOL_HI,
                                        kinds=("box", "triangle", "ball"))
        assert len(objs) == 40
        assert len({type(o).__name__ for o in objs}) == 3
        with pytest.raises(ValueError):
            workloads.random_objects(rng, 1, 2, VOL_LO, VOL_HI, kinds=("cone",))
        with pytest.raises(ValueError):
            workloads.random_objects(rng, 1, 3, VOL_LO, VOL_HI,
                                     kinds=("triangle",))

    def test_mixed_dynamic_is_replayable(self):
        rng = np.random.default_rng(4)
        ops = workloads.mixed_dynamic(rng, _boxes(4, 10), 60)
        assert len(ops) == 60
        live = []
        for op, payload in ops:
            if op == "insert":
                live.append(payload)
            elif op == "delete":
                assert any(payload is o for o in live)
                live.remove(payload)
            else:
                assert op == "estimate" and payload is None

    def test_mixed_dynamic_falls_back_to_estimates(self):
        rng = np.random.default_rng(5)
        ops = workloads.mixed_dynamic(rng, _boxes(5, 4), 20,
                                      p_insert=0.0, p_delete=1.0)
        assert all(op == "estimate" for op, _ in ops)

    def test_insert_all_delete_all_shape(self):
        objs = _boxes(6, 5)
        ops = workloads.insert_all_delete_all(objs)
        assert len(ops) == 4 * len(objs)
        assert ops[-1] == ("estimate", None)
        assert ops[-2][0] == "delete" and ops[-2][1] is objs[0]
        live = 0
        for op, _ in ops:
            live += {"insert": 1, "delete": -1, "estimate": 0}[op]
        assert live == 0

    def test_sliding_window_queries(self):
        objs = _boxes(7, 8)
        ops = workloads.sliding_window(objs, window=4)
        queries = [(t_op, s) for t_op, s in ops if t_op == "suffix"]
        assert len(queries) == len(objs) - 4 + 1
        inserts_seen = 0
        for op, payload in ops:
            if op == "insert":
                inserts_seen += 1
            else:
                assert payload == inserts_seen - 4 + 1

    def test_volume_ramp_sweeps_scales(self):
        rng = np.random.default_rng(8)
        objs = workloads.volume_ramp(rng, 12, 2, 10.0, 1e6)
        assert len(objs) == 12
        sizes = sorted(o.size() for o in objs)
        np.testing.assert_allclose(sizes, np.geomspace(10.0, 1e7, num=12),
                                   rtol=1e-5)


class TestRunWorkload:
    def test_dynamic_records_score_against_truth(self):
        objs = _boxes(10, 6)
        ops = []
        for o in objs[:4]:
            ops.append(("insert", o))
            ops.append(("estimate", None))
        ops.append(("delete", objs[1]))
        ops.append(("estimate", None))
        records = harness.run_workload("dynamic", ops, N, EPS, seed=0)
        assert len(records) == 5
        live = []
        ridx = 0
        for t, (op, payload) in enumerate(ops, start=1):
            if op == "insert":
                live.append(payload)
            elif op == "delete":
                live.remove(payload)
            else:
                rec = records[ridx]
                ridx += 1
                assert (rec.seed, rec.t, rec.op) == (0, t, "estimate")
                truth, err = union_truth(live)
                assert err == 0.0  # all boxes: exact truth route
                assert rec.truth == truth
                assert rec.rel_err == abs(rec.estimate - truth) / truth
                assert rec.rel_err <= EPS
        calls = [r.oracle_calls for r in records]
        assert calls == sorted(calls) and calls[0] > 0

    def test_estimate_of_nothing(self):
        records = harness.run_workload("dynamic", [("estimate", None)],
                                       N, EPS, seed=1)
        assert records[0].estimate == 0.0
        assert records[0].truth == 0.0
        assert records[0].rel_err == 0.0

    def test_suffix_records(self):
        objs = _boxes(11, 7)
        ops = workloads.sliding_window(objs, window=3)
        records = harness.run_workload("suffix", ops, N, EPS, seed=2)
        assert len(records) == 5
        queries = [p for op, p in ops if op == "suffix"]
        for rec, s in zip(records, queries):
            truth, err = union_truth(objs[s - 1:s + 2])
            assert err == 0.0
            assert rec.truth == truth
            assert rec.op == "suffix"
            assert rec.rel_err <= EPS

    def test_suffix_query_needs_suffix_estimator(self):
        with pytest.raises(ValueError):
            harness.run_workload("dynamic", [("suffix", 1)], N, EPS, seed=0)

    def test_delete_of_dead_object_rejected(self):
        box = _boxes(12, 1)[0]
        with pytest.raises(KeyError):
            harness.run_workload("dynamic", [("delete", box)], N, EPS, seed=0)

    def test_unknown_op_rejected(self):
        with pytest.raises(ValueError):
            harness.run_workload("dynamic", [("peek", None)], N, EPS, seed=0)

    def test_unknown_estimator_rejected(self):
        with pytest.raises(ValueError):
            harness.make_estimator("static", N, EPS, seed=0)

    def test_ranged_dynamic_handles_wide_volumes(self):
        rng = np.random.default_rng(13)
        objs = [workloads.random_box(rng, 2, 10.0 ** k, 10.0 ** (k + 0.2))
                for k in range(1, 6)]
        ops = []
        for o in objs:
            ops.append(("insert", o))
            ops.append(("estimate", None))
        ops.append(("delete", objs[-1]))
        ops.append(("estimate", None))
        records = harness.run_workload("ranged-dynamic", ops, 32, 0.6, seed=3)
        assert all(r.rel_err <= 0.6 for r in records)

    def test_ranged_suffix_handles_wide_volumes(self):
        rng = np.random.default_rng(14)
        objs = [workloads.random_box(rng, 2, 10.0 ** k, 10.0 ** (k + 0.2))
                for k in (5, 1, 2, 4, 3)]
        ops = workloads.sliding_window(objs, window=2)
        records = harness.run_workload("ranged-suffix", ops, 32, 0.6, seed=4)
        assert records and all(r.rel_err <= 0.6 for r in records)


class TestSweepAndScores:
    def test_sweep_merges_in_seed_order(self):
        def make_workload(seed):
            # fresh handles per call: oracle-call counters stay per-run
            rng = np.random.default_rng(seed)
            return workloads.mixed_dynamic(rng, _boxes(20, 5), 12)

        records, summary = harness.sweep("dynamic", make_workload, N, EPS,
                                         seeds=[3, 1, 2])
        assert [r.seed for r in records] == sorted(
            [r.seed for r in records], key=[3, 1, 2].index)
        assert summary["queries"] == len(records)
        assert "elapsed_sec" in summary
        again, _ = harness.sweep("dynamic", make_workload, N, EPS,
                                 seeds=[3, 1, 2])
        assert again == records

    def test_summarize_known_records(self):
        recs = [
            harness.Record(0, 1, "estimate", 1.1, 1.0, 0.1, 5),
            harness.Record(0, 2, "estimate", 0.7, 1.0, 0.3, 9),
            harness.Record(1, 1, "estimate", float("nan"), 1.0,
                           float("nan"), 4),
        ]
        out = harness.summarize(recs, eps_tol=0.25)
        assert out["queries"] == 3
        assert out["nan_queries"] == 1
        assert out["mean_rel_err"] == pytest.approx(0.2)
        assert out["max_rel_err"] == pytest.approx(0.3)
        assert out["within_tolerance"] == pytest.approx(1 / 3)
        assert out["oracle_calls"] == 9
        assert harness.summarize([]) == {"queries": 0}

    def test_verify_gate(self):
        recs = [harness.Record(0, t, "estimate", 1.0, 1.0, e, 1)
                for t, e in enumerate([0.05, 0.10, 0.40])]
        assert harness.verify(recs, 0.25, 0.6)["passed"]
        assert not harness.verify(recs, 0.25, 0.7)["passed"]
        assert not harness.verify([], 0.25, 0.0)["passed"]

    def test_record_csv_round_trip(self, tmp_path):
        recs = [harness.Record(0, 1, "estimate", 1.25, 1.0, 0.25, 7),
                harness.Record(2, 9, "suffix", 3.5, 4.0, 0.125, 11)]
        path = tmp_path / "records.csv"
        harness.write_records_csv(path, recs)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        back = [harness.Record(int(r["seed"]), int(r["t"]), r["op"],
                               float(r["estimate"]), float(r["truth"]),
                               float(r["rel_err"]), int(r["oracle_calls"]))
                for r in rows]
        assert back == recs

    def test_summary_json_round_trip(self, tmp_path):
        summary = {"queries": 4, "mean_rel_err": 0.125, "passed": True}
        path = tmp_path / "summary.json"
        harness.write_summary_json(path, summary)
        assert json.loads(path.read_text()) == summary


class TestCli:
    def _gen(self, tmp_path, *extra):
        out = tmp_path / "wl.jsonl"
        rc = cli.main(["gen", "--out", str(out), "--objects", "8",
                       "--ops", "30", "--n", "64", "--eps", "0.5",
                       "--seed", "3", *extra])
        assert rc == 0
        return out

    def test_gen_writes_parsable_workload(self, tmp_path, capsys):
        out = self._gen(tmp_path)
        docs = read_workload(out)
        assert len(docs) == 30
        assert {d["op"] for d in docs} <= {"insert", "delete", "estimate"}
        assert f"wrote {len(docs)} ops" in capsys.readouterr().out

    def test_gen_seed_env_fallback(self, tmp_path, monkeypatch, capsys):
        a = tmp_path / "a.jsonl"
        b = tmp_path / "b.jsonl"
        cli.main(["gen", "--out", str(a), "--objects", "4", "--seed", "7"])
        monkeypatch.setenv("UNIONVOL_SEED", "7")
        cli.main(["gen", "--out", str(b), "--objects", "4"])
        assert a.read_text() == b.read_text()

    def test_run_and_verify_round_trip(self, tmp_path, capsys):
        wl = self._gen(tmp_path)
        records_csv = tmp_path / "records.csv"
        summary_json = tmp_path / "summary.json"
        rc = cli.main(["run", "--workload", str(wl), "--n", "64",
                       "--eps", "0.5", "--seed", "0", "--tol", "0.5",
                       "--csv", str(records_csv),
                       "--summary", str(summary_json)])
        assert rc == 0
        summary = json.loads(summary_json.read_text())
        assert summary["tolerance"] == 0.5
        assert summary["within_tolerance"] == 1.0
        with open(records_csv) as fh:
            assert len(list(csv.DictReader(fh))) == summary["queries"]
        capsys.readouterr()

        assert cli.main(["verify", "--csv-in", str(records_csv),
                         "--tol", "0.5", "--min-rate", "0.9"]) == 0
        assert "PASS" in capsys.readouterr().out
        assert cli.main(["verify", "--csv-in", str(records_csv),
                         "--tol", "0.5", "--min-rate", "1.01"]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_sliding_window_sweep_across_processes(self, tmp_path, capsys):
        wl = tmp_path / "wl.jsonl"
        cli.main(["gen", "--kind", "sliding-window", "--objects", "10",
                  "--window", "4", "--n", "64", "--eps", "0.5",
                  "--seed", "5", "--out", str(wl)])
        summary_json = tmp_path / "summary.json"
        rc = cli.main(["sweep", "--estimator", "suffix", "--workload",
                       str(wl), "--n", "64", "--eps", "0.5", "--seed", "0",
                       "--seeds", "2", "--jobs", "2", "--tol", "0.5",
                       "--summary", str(summary_json)])
        assert rc == 0
        summary = json.loads(summary_json.read_text())
        assert summary["queries"] == 2 * 7
        assert summary["within_tolerance"] >= 0.9
        capsys.readouterr()

    def test_volume_ramp_with_ranged_estimator(self, tmp_path, capsys):
        wl = tmp_path / "ramp.jsonl"
        cli.main(["gen", "--kind", "volume-ramp", "--objects", "6",
                  "--ops", "20", "--ramp-ratio", "10000.0", "--n", "16",
                  "--eps", "0.5", "--seed", "9", "--out", str(wl)])
        rc = cli.main(["run", "--estimator", "ranged-dynamic", "--workload",
                       str(wl), "--n", "32", "--eps", "0.6", "--seed", "1",
                       "--tol", "0.6"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "within_tolerance: 1.0" in out

    def test_bad_eps_rejected(self, tmp_path):
        with pytest.raises(SystemExit):
            cli.main(["run", "--workload", str(tmp_path / "x"),
                      "--eps", "1.5"])
