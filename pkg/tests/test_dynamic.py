import numpy as np
import pytest

from unionvol.dynamic import DynamicUnionEstimator
from unionvol.geometry import AxisBox, Simplex
from unionvol.truth import union_truth

# n=32 keeps eps_bin = 0.5/6 and per-bin samples around 16k-32k points.
N, EPS = 32, 0.5


def _boxes(rng, count):
    # volumes inside the default admissible window [192^2, 192^4]
    out = []
    for _ in range(count):
        side = rng.uniform(200, 600, size=2)
        lo = rng.uniform(0, 400, size=2)
        out.append(AxisBox(lo, lo + side))
    return out


def _mixed(rng, count):
    out = []
    for _ in range(count):
        if rng.random() < 0.5:
            side = rng.uniform(200, 600, size=2)
            lo = rng.uniform(0, 400, size=2)
            out.append(AxisBox(lo, lo + side))
        else:
            base = rng.uniform(300, 700)
            apex = rng.uniform(300, 700)
            lo = rng.uniform(0, 400, size=2)
            out.append(Simplex([lo, lo + [base, 0.0], lo + [0.0, apex]]))
    return out


class TestValidation:
    def test_bad_params(self):
        with pytest.raises(ValueError):
            DynamicUnionEstimator(1, 0.5)
        with pytest.raises(ValueError):
            DynamicUnionEstimator(16, 0.0)
        with pytest.raises(ValueError):
            DynamicUnionEstimator(16, 2.0)

    def test_inadmissible_volume(self):
        est = DynamicUnionEstimator(N, EPS, seed=0)
        with pytest.raises(ValueError):
            est.insert(AxisBox([0, 0], [1, 1]))

    def test_budget_exhaustion(self):
        est = DynamicUnionEstimator(4, 0.5, seed=0, vol_bounds=(0.5, 10.0))
        box = AxisBox([0, 0], [1, 1])
        est.insert(box)
        est.estimate()
        est.delete(box)
        est.estimate()
        with pytest.raises(ValueError):
            est.estimate()

    def test_delete_unknown_raises(self):
        est = DynamicUnionEstimator(N, EPS, seed=0)
        with pytest.raises(KeyError):
            est.delete(AxisBox([0, 0], [300, 300]))


class TestAccuracy:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_inserts_track_truth(self, seed):
        objs = _boxes(np.random.default_rng(500 + seed), 8)
        est = DynamicUnionEstimator(N, EPS, seed=seed)
        live = []
        for obj in objs:
            est.insert(obj)
            live.append(obj)
            truth, _ = union_truth(live)
            assert abs(est._estimate_value() - truth) <= EPS * truth

    def test_mixed_shapes_and_deletes(self):
        rng = np.random.default_rng(600)
        objs = _mixed(rng, 8)
        est = DynamicUnionEstimator(N, EPS, seed=3)
        for obj in objs:
            est.insert(obj)
        live = list(objs)
        while len(live) > 1:
            est.delete(live.pop(rng.integers(len(live))))
            truth, _ = union_truth(live)
            assert abs(est._estimate_value() - truth) <= EPS * truth

    def test_insert_all_delete_all_exact_zero(self):
        objs = _boxes(np.random.default_rng(700), 6)
        est = DynamicUnionEstimator(N, EPS, seed=4)
        for obj in objs:
            est.insert(obj)
        for obj in objs:
            est.delete(obj)
        assert est._estimate_value() == 0.0
        assert est.live_count() == 0

    def test_duplicate_handles(self):
        box = _boxes(np.random.default_rng(701), 1)[0]
        est = DynamicUnionEstimator(N, EPS, seed=5)
        est.insert(box)
        est.insert(box)
        assert est.live_count() == 2
        est.delete(box)
        assert abs(est._estimate_value() - box.size()) <= EPS * box.size()
        est.delete(box)
        assert est._estimate_value() == 0.0


class TestInvariants:
    def _occupancy_ok(self, est):
        # each bin is initialised with at most 2^j objects and only shrinks
        return all(len(digest.objects) <= 2 ** j
                   for j, digest in enumerate(est.bins))

    def test_counters_and_occupancy_through_mixed_ops(self):
        rng = np.random.default_rng(800)
        pool = _mixed(rng, 12)
        est = DynamicUnionEstimator(N, EPS, seed=6)
        live = []
        for _ in range(24):
            if live and rng.random() < 0.4:
                est.delete(live.pop(rng.integers(len(live))))
            elif pool:
                obj = pool.pop()
                est.insert(obj)
                live.append(obj)
            else:
                break
            assert est.check_nx()
            assert self._occupancy_ok(est)

    def test_ops_counter(self):
        est = DynamicUnionEstimator(N, EPS, seed=7)
        box = _boxes(np.random.default_rng(801), 1)[0]
        est.insert(box)
        est.estimate()
        est.delete(box)
        assert est.ops_done == 3


class TestDeterminism:
    def test_bitwise_replay(self):
        objs = _boxes(np.random.default_rng(900), 6)

        def run(seed):
            est = DynamicUnionEstimator(N, EPS, seed=seed)
            trace = []
            for obj in objs:
                est.insert(obj)
                trace.append(est._estimate_value())
            for obj in objs:
                est.delete(obj)
                trace.append(est._estimate_value())
            return trace

        assert run(42) == run(42)
        assert run(42) != run(43)
