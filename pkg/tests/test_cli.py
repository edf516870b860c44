"""Command-line interface: predict, eval, simulate, bench."""

import json

import numpy as np
import pytest

from rankseg.cli import main
from rankseg.rankdice import RankSegConfig, predict_dice
from rankseg.tensorio import read_npy, write_npy


def _rng(*key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))


def _write_probs(path, arr):
    write_npy(path, np.asarray(arr, dtype="<f8"))
    return str(path)


class TestPredict:
    def test_vector_input(self, tmp_path, capsys):
        inp = _write_probs(tmp_path / "p.npy", [0.45, 0.44, 0.1])
        out = tmp_path / "mask.npy"
        assert main(["predict", inp, "--out", str(out)]) == 0
        mask = read_npy(out)
        np.testing.assert_array_equal(mask, [1, 1, 0])
        meta = json.loads((tmp_path / "mask.npy.json").read_text())
        assert meta["tau_hat"] == 2
        assert meta["algorithm_used"] == "exact"
        assert "millis" in meta and "sigma2" in meta

    def test_image_input_keeps_shape(self, tmp_path):
        p = _rng(401).random((6, 7))
        inp = _write_probs(tmp_path / "img.npy", p)
        out = tmp_path / "mask.npy"
        assert main(["predict", inp, "--out", str(out)]) == 0
        mask = read_npy(out)
        assert mask.shape == (6, 7)
        want, _ = predict_dice(p.ravel())
        np.testing.assert_array_equal(mask.ravel(), want)

    def test_multi_treats_rows_as_classes(self, tmp_path):
        p = _rng(403).random((3, 20))
        inp = _write_probs(tmp_path / "classes.npy", p)
        out = tmp_path / "mask.npy"
        assert main(["predict", inp, "--out", str(out), "--multi"]) == 0
        mask = read_npy(out)
        for k in range(3):
            want, _ = predict_dice(p[k])
            np.testing.assert_array_equal(mask[k], want)
        metas = json.loads((tmp_path / "mask.npy.json").read_text())
        assert isinstance(metas, list) and len(metas) == 3

    def test_sigmoid_ingestion(self, tmp_path):
        logits = np.array([3.0, -3.0, 0.2])
        inp = _write_probs(tmp_path / "z.npy", logits)
        out = tmp_path / "mask.npy"
        assert main(["predict", inp, "--out", str(out),
                     "--activation", "sigmoid", "--temperature", "2.0"]) == 0
        probs = 1 / (1 + np.exp(-logits / 2.0))
        want, _ = predict_dice(probs)
        np.testing.assert_array_equal(read_npy(out), want)

    def test_iou_metric(self, tmp_path):
        inp = _write_probs(tmp_path / "p.npy", [0.9, 0.05])
        out = tmp_path / "mask.npy"
        assert main(["predict", inp, "--out", str(out), "--metric", "iou"]) == 0
        np.testing.assert_array_equal(read_npy(out), [1, 0])

    def test_default_output_name(self, tmp_path):
        inp = _write_probs(tmp_path / "probs.npy", [0.9, 0.1])
        assert main(["predict", inp]) == 0
        assert (tmp_path / "probs_mask.npy").exists()

    def test_bad_input_exits_nonzero(self, tmp_path, capsys):
        bad = tmp_path / "bad.npy"
        bad.write_bytes(b"nope")
        assert main(["predict", str(bad)]) == 1
        assert "error:" in capsys.readouterr().err


class TestEval:
    def test_instance_and_pooled_lines(self, tmp_path, capsys):
        gt = np.stack([[1, 1, 0, 0], [1, 0, 0, 0]]).astype("|u1")
        pred = np.stack([[1, 0, 0, 0], [1, 0, 0, 0]]).astype("|u1")
        g = _write_probs(tmp_path / "gt.npy", gt)
        p = _write_probs(tmp_path / "pred.npy", pred)
        outj = tmp_path / "report.json"
        assert main(["eval", "--pred", p, "--gt", g, "--out", str(outj)]) == 0
        text = capsys.readouterr().out
        assert "instance" in text and "pooled (biased)" in text
        recs = json.loads(outj.read_text())
        assert recs[0]["mean"] == pytest.approx((2 / 3 + 1.0) / 2)
        assert recs[1]["mean"] == pytest.approx(4 / 5)  # TP=2, FN=1 pooled

    def test_multi_class_weighting(self, tmp_path, capsys):
        gt = np.zeros((2, 3, 4), dtype="|u1")
        gt[0, 0, :2] = 1
        pred = gt.copy()
        g = _write_probs(tmp_path / "gt.npy", gt)
        p = _write_probs(tmp_path / "pred.npy", pred)
        assert main(["eval", "--pred", p, "--gt", g, "--multi"]) == 0
        assert "instance (class-weighted)" in capsys.readouterr().out

    def test_shape_mismatch_fails(self, tmp_path, capsys):
        g = _write_probs(tmp_path / "gt.npy", np.zeros(3))
        p = _write_probs(tmp_path / "pred.npy", np.zeros(4))
        assert main(["eval", "--pred", p, "--gt", g]) == 1


class TestSimulate:
    def test_example1_csv(self, tmp_path):
        out = tmp_path / "sim.csv"
        assert main(["simulate", "example1", "--decay", "step", "--beta", "0.5",
                     "--rho", "0.1", "--reps", "4", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("method,decay,beta,rho")
        assert len(lines) == 3

    def test_example2_writes_threshold_sidecar(self, tmp_path):
        out = tmp_path / "sim2.csv"
        assert main(["simulate", "example2", "--n", "10",
                     "--thresholds", "0.3,0.6", "--out", str(out)]) == 0
        extra = tmp_path / "sim2_optimal_thresholds.csv"
        lines = extra.read_text().splitlines()
        assert lines[0] == "rho,optimal_threshold"
        assert len(lines) == 11

    def test_stdout_when_no_out(self, capsys):
        assert main(["simulate", "example1", "--decay", "linear",
                     "--beta", "1.0", "--reps", "2"]) == 0
        assert "rankdice" in capsys.readouterr().out


class TestBench:
    def test_csv_columns(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert main(["bench", "--sizes", "256", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "algo,d,d0,sigma2,millis"
        assert all(len(line.split(",")) == 5 for line in lines[1:])
        assert len(lines) > 1


class TestDeterminism:
    def _strip_millis(self, meta):
        if isinstance(meta, list):
            return [self._strip_millis(m) for m in meta]
        return {k: v for k, v in meta.items() if k != "millis"}

    def test_predict_thread_invariant(self, tmp_path):
        p = _rng(409).random((5, 40))
        inp = _write_probs(tmp_path / "p.npy", p)
        outs = []
        for threads in ("1", "8"):
            out = tmp_path / f"mask{threads}.npy"
            assert main(["predict", inp, "--out", str(out), "--multi",
                         "--threads", threads]) == 0
            meta = json.loads((tmp_path / f"mask{threads}.npy.json").read_text())
            outs.append((out.read_bytes(), self._strip_millis(meta)))
        assert outs[0] == outs[1]

    def test_simulate_thread_invariant(self, tmp_path):
        files = []
        for threads in ("1", "8"):
            out = tmp_path / f"sim{threads}.csv"
            assert main(["simulate", "example1", "--decay", "exponential",
                         "--beta", "1.05", "--reps", "6", "--seed", "7",
                         "--threads", threads, "--out", str(out)]) == 0
            files.append(out.read_bytes())
        assert files[0] == files[1]

    def test_repeat_run_identical(self, tmp_path):
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / f"sim_{tag}.csv"
            assert main(["simulate", "example2", "--n", "8", "--seed", "11",
                         "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
