"""Bit-for-bit parity between the in-process binding and the command line."""

import json

import numpy as np
import pytest

from rankseg.cli import main
from rankseg.tensorio import write_npy
from rankseg_bridge import BridgeConfig, bridge_eval, bridge_predict


def _rng(*key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))


def _strip_millis(meta):
    if isinstance(meta, list):
        return [_strip_millis(m) for m in meta]
    return {k: v for k, v in meta.items() if k != "millis"}


def _random_case(i: int):
    """One seeded input: shape family, metric, gamma and dtype all vary."""
    rng = _rng(9000, i)
    kind = i % 4
    if kind == 0:
        arr = rng.random(int(rng.integers(2, 120)))
    elif kind == 1:
        arr = rng.random((int(rng.integers(2, 12)), int(rng.integers(2, 12))))
    elif kind == 2:
        arr = rng.random((int(rng.integers(1, 4)), int(rng.integers(2, 60))))
    else:
        arr = rng.random((int(rng.integers(1, 4)),
                          int(rng.integers(2, 8)), int(rng.integers(2, 8))))
    if i % 3 == 0:
        arr = arr.astype(np.float32)
    multi = kind == 2
    metric = "iou" if i % 2 else "dice"
    gamma = 1.0 if i % 5 == 0 else 0.0
    return np.ascontiguousarray(arr), multi, metric, gamma


class TestPredictParity:
    def test_100_seeded_inputs_match_cli_bit_for_bit(self, tmp_path):
        for i in range(100):
            arr, multi, metric, gamma = _random_case(i)
            inp = tmp_path / f"in_{i}.npy"
            cli_out = tmp_path / f"cli_{i}.npy"
            write_npy(inp, arr)
            argv = ["predict", str(inp), "--out", str(cli_out),
                    "--metric", metric, "--gamma", str(gamma)]
            if multi:
                argv.append("--multi")
            assert main(argv) == 0

            cfg = BridgeConfig(metric=metric, gamma=gamma, multi=multi)
            mask, meta = bridge_predict(arr, cfg)

            bridge_out = tmp_path / f"bridge_{i}.npy"
            write_npy(bridge_out, mask)
            assert bridge_out.read_bytes() == cli_out.read_bytes(), f"case {i}"

            cli_meta = json.loads((tmp_path / f"cli_{i}.npy.json").read_text())
            assert _strip_millis(meta) == _strip_millis(cli_meta), f"case {i}"


class TestEvalParity:
    @pytest.mark.parametrize("multi", [False, True])
    def test_records_match_cli_json(self, tmp_path, multi):
        rng = _rng(9500, int(multi))
        gt = (rng.random((4, 5, 6)) > 0.6).astype(np.uint8)
        pred = (rng.random((4, 5, 6)) > 0.6).astype(np.uint8)
        g, p = tmp_path / "gt.npy", tmp_path / "pred.npy"
        write_npy(g, gt)
        write_npy(p, pred)
        out = tmp_path / "report.json"
        argv = ["eval", "--pred", str(p), "--gt", str(g), "--out", str(out)]
        if multi:
            argv.append("--multi")
        assert main(argv) == 0
        cli_records = json.loads(out.read_text())
        bridge_records = json.loads(
            json.dumps(bridge_eval(pred, gt, BridgeConfig(multi=multi))))
        assert bridge_records == cli_records
