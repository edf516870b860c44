"""In-process binding: validation, shapes, and fixture values."""

import numpy as np
import pytest

from rankseg_bridge import BridgeConfig, bridge_eval, bridge_predict


def _rng(*key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))


class TestConfig:
    def test_defaults_valid(self):
        BridgeConfig()

    @pytest.mark.parametrize("kwargs", [
        {"gamma": -1.0},
        {"algorithm": "magic"},
        {"epsilon": 0.0},
        {"d_cap": 0},
        {"zero_over_zero": "nan"},
        {"metric": "f1"},
    ])
    def test_rejects_bad_settings(self, kwargs):
        with pytest.raises(ValueError):
            BridgeConfig(**kwargs)


class TestPredict:
    def test_two_pixel_counterexample(self):
        mask, meta = bridge_predict(np.array([0.45, 0.44]))
        np.testing.assert_array_equal(mask, [1, 1])
        assert meta["tau_hat"] == 2
        assert meta["algorithm_used"] == "exact"

    def test_single_class_wrapper_equals_unbatched(self):
        q = _rng(501).random(40)
        plain, _ = bridge_predict(q)
        wrapped, metas = bridge_predict(q.reshape(1, -1).copy(),
                                        BridgeConfig(multi=True))
        np.testing.assert_array_equal(wrapped[0], plain)
        assert isinstance(metas, list) and len(metas) == 1

    def test_image_shape_preserved(self):
        p = _rng(503).random((5, 6))
        mask, meta = bridge_predict(p)
        assert mask.shape == (5, 6)
        assert isinstance(meta, dict)

    def test_class_stack(self):
        p = _rng(505).random((3, 4, 4))
        mask, metas = bridge_predict(p)
        assert mask.shape == (3, 4, 4)
        assert len(metas) == 3

    def test_iou_metric(self):
        mask, _ = bridge_predict(np.array([0.9, 0.05]), BridgeConfig(metric="iou"))
        np.testing.assert_array_equal(mask, [1, 0])

    def test_sigmoid_ingestion(self):
        logits = np.array([3.0, -3.0])
        mask, _ = bridge_predict(logits, BridgeConfig(activation="sigmoid"))
        np.testing.assert_array_equal(mask, [1, 0])

    def test_non_contiguous_rejected_without_copy(self):
        q = _rng(507).random((4, 40))[:, ::2]
        assert not q.flags["C_CONTIGUOUS"]
        with pytest.raises(ValueError, match="contiguous"):
            bridge_predict(q)

    def test_bad_dtype_and_type_rejected(self):
        with pytest.raises(TypeError, match="dtype"):
            bridge_predict(np.zeros(4, dtype=np.int32))
        with pytest.raises(TypeError):
            bridge_predict([0.5, 0.5])

    def test_rank_4_rejected(self):
        with pytest.raises(ValueError):
            bridge_predict(np.zeros((2, 2, 2, 2)))


class TestEval:
    def test_identical_masks_score_one(self):
        m = (_rng(509).random((3, 10)) > 0.5).astype(np.uint8)
        recs = bridge_eval(m, m)
        assert recs[0]["mean"] == 1.0
        assert recs[1]["mean"] == 1.0
        assert recs[1]["mode"] == "pooled (biased)"

    def test_heterogeneous_fixture(self):
        # Instance A perfect on 1 pixel, instance B misses 4 of 4 positives:
        # instance mean (1 + 0)/2 = 0.5; pooled 2*1 / (2*1 + 4) = 1/3.
        gt = np.zeros((2, 5), dtype=np.uint8)
        gt[0, 0] = 1
        gt[1, :4] = 1
        pred = np.zeros((2, 5), dtype=np.uint8)
        pred[0, 0] = 1
        recs = bridge_eval(pred, gt)
        assert recs[0]["mean"] == pytest.approx(0.5)
        assert recs[1]["mean"] == pytest.approx(1.0 / 3.0)

    def test_multi_class_weighted_record(self):
        gt = np.zeros((2, 3, 4), dtype=np.uint8)
        gt[0, 0, :2] = 1
        recs = bridge_eval(gt, gt, BridgeConfig(multi=True))
        assert len(recs) == 1
        assert recs[0]["mode"] == "instance (class-weighted)"
        assert recs[0]["mean"] == 1.0

    def test_empty_batch_rejected(self):
        empty = np.zeros((0, 4), dtype=np.uint8)
        with pytest.raises(ValueError):
            bridge_eval(empty, empty)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            bridge_eval(np.zeros(3, dtype=np.uint8), np.zeros(4, dtype=np.uint8))
