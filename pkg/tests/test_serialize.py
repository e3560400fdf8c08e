import numpy as np
import pytest

from unionvol.geometry import (AxisBox, Ball, DiscretePointSet,
                               HalfspacePolytope, ObjectOracle, Simplex)
from unionvol.serialize import (canonical_key, object_from_json,
                                object_to_json, read_workload, write_workload)


def _sample_objects():
    eye = np.eye(2)
    return [
        AxisBox([0.5, -1.0], [2.5, 3.0]),
        Simplex([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]]),
        Ball([1.0, 1.0], 0.75),
        HalfspacePolytope(np.vstack([eye, -eye]), [2.0, 2.0, 0.0, 0.0],
                          [1.0, 1.0], 1.0, 3.0),
        DiscretePointSet([[0, 0], [3, 1], [5, 5]]),
    ]


class TestObjectCodec:
    @pytest.mark.parametrize("obj", _sample_objects(),
                             ids=lambda o: type(o).__name__)
    def test_round_trip_preserves_behaviour(self, obj):
        back = object_from_json(object_to_json(obj))
        assert type(back) is type(obj)
        assert back.size() == pytest.approx(obj.size(), rel=1e-12)
        assert back.dim == obj.dim
        pts = np.random.default_rng(0).uniform(-2, 6, size=(200, obj.dim))
        np.testing.assert_array_equal(back.contains_many(pts),
                                      obj.contains_many(pts))

    def test_round_trip_is_idempotent(self):
        for obj in _sample_objects():
            doc = object_to_json(obj)
            assert object_to_json(object_from_json(doc)) == doc

    def test_unknown_type_rejected(self):
        class Odd(ObjectOracle):
            dim = 1

            def size(self):
                return 1.0

        with pytest.raises(TypeError):
            object_to_json(Odd())

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            object_from_json({"kind": "torus"})
        with pytest.raises(ValueError):
            object_from_json({})


class TestCanonicalKey:
    def test_key_ignores_field_order(self):
        a = {"kind": "box", "lo": [0.0], "hi": [1.0]}
        b = {"hi": [1.0], "lo": [0.0], "kind": "box"}
        assert canonical_key(a) == canonical_key(b)

    def test_key_distinguishes_values(self):
        a = object_to_json(AxisBox([0.0], [1.0]))
        b = object_to_json(AxisBox([0.0], [1.5]))
        assert canonical_key(a) != canonical_key(b)

    def test_round_trip_keeps_key_stable(self):
        for obj in _sample_objects():
            doc = object_to_json(obj)
            again = object_to_json(object_from_json(doc))
            assert canonical_key(doc) == canonical_key(again)


class TestWorkloadIO:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "ops.jsonl"
        ops = [
            {"op": "insert", "object": object_to_json(AxisBox([0.0], [2.0]))},
            {"op": "estimate"},
            {"op": "estimate", "s": 1},
            {"op": "delete", "object": object_to_json(AxisBox([0.0], [2.0]))},
        ]
        write_workload(path, ops)
        assert read_workload(path) == ops

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "ops.jsonl"
        path.write_text('{"op": "estimate"}\n\n  \n{"op": "estimate"}\n')
        assert read_workload(path) == [{"op": "estimate"}, {"op": "estimate"}]

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / "ops.jsonl"
        path.write_text('{"op": "estimate"}\n{"op": oops}\n')
        with pytest.raises(ValueError, match=":2:"):
            read_workload(path)

    def test_unknown_op_rejected(self, tmp_path):
        path = tmp_path / "ops.jsonl"
        path.write_text('{"op": "upsert"}\n')
        with pytest.raises(ValueError, match="unknown op"):
            read_workload(path)
