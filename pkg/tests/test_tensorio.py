"""NPY tensor I/O restrictions and logit-to-probability ingestion."""

import numpy as np
import pytest

from rankseg.tensorio import TensorFormatError, apply_temperature, read_npy, write_npy


class TestRoundTrip:
    @pytest.mark.parametrize("dtype", ["<f4", "<f8", "|u1"])
    def test_supported_dtypes(self, tmp_path, dtype):
        arr = (np.arange(12).reshape(3, 4) % 2).astype(dtype)
        path = tmp_path / "t.npy"
        write_npy(path, arr)
        back = read_npy(path)
        np.testing.assert_array_equal(back, arr)
        assert back.dtype == np.dtype(dtype)

    def test_written_file_is_version_1_0(self, tmp_path):
        path = tmp_path / "t.npy"
        write_npy(path, np.zeros(4, dtype="<f8"))
        assert path.read_bytes()[6:8] == b"\x01\x00"

    def test_numpy_can_read_output(self, tmp_path):
        path = tmp_path / "t.npy"
        arr = np.random.default_rng(0).random((5, 5))
        write_npy(path, arr)
        np.testing.assert_array_equal(np.load(path), arr)


class TestRejection:
    def test_not_an_npy_file(self, tmp_path):
        path = tmp_path / "bad.npy"
        path.write_bytes(b"definitely not a tensor")
        with pytest.raises(TensorFormatError):
            read_npy(path)

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "v2.npy"
        with open(path, "wb") as fh:
            np.lib.format.write_array(fh, np.zeros(3), version=(2, 0))
        with pytest.raises(TensorFormatError, match="version"):
            read_npy(path)

    def test_unsupported_dtype(self, tmp_path):
        path = tmp_path / "i8.npy"
        np.save(path, np.zeros(3, dtype=np.int64))
        with pytest.raises(TensorFormatError, match="dtype"):
            read_npy(path)
        with pytest.raises(TensorFormatError):
            write_npy(tmp_path / "out.npy", np.zeros(3, dtype=np.int64))

    def test_fortran_order(self, tmp_path):
        path = tmp_path / "f.npy"
        arr = np.asfortranarray(np.random.default_rng(1).random((4, 5)))
        np.save(path, arr)
        with pytest.raises(TensorFormatError, match="Fortran"):
            read_npy(path)

    def test_truncated_data(self, tmp_path):
        path = tmp_path / "trunc.npy"
        np.save(path, np.zeros(100))
        data = path.read_bytes()
        path.write_bytes(data[:-32])
        with pytest.raises(TensorFormatError, match="truncated"):
            read_npy(path)


class TestTemperature:
    def test_none_validates_range(self):
        np.testing.assert_array_equal(apply_temperature([0.0, 0.5, 1.0]),
                                      [0.0, 0.5, 1.0])
        with pytest.raises(ValueError):
            apply_temperature([-0.5, 2.0])

    def test_sigmoid(self):
        out = apply_temperature([0.0, 2.0], activation="sigmoid")
        np.testing.assert_allclose(out, [0.5, 1 / (1 + np.exp(-2.0))])

    def test_sigmoid_temperature_flattens(self):
        hot = apply_temperature([4.0], temperature=1.0, activation="sigmoid")
        cool = apply_temperature([4.0], temperature=4.0, activation="sigmoid")
        assert cool[0] < hot[0]
        np.testing.assert_allclose(cool, 1 / (1 + np.exp(-1.0)))

    def test_softmax_normalizes_class_axis(self):
        z = np.array([[1.0, 5.0], [3.0, 5.0]])
        out = apply_temperature(z, activation="softmax")
        np.testing.assert_allclose(out.sum(axis=0), [1.0, 1.0])
        assert out[1, 0] > out[0, 0]

    def test_softmax_is_shift_stable(self):
        z = np.array([[1000.0, -1000.0], [1001.0, -999.0]])
        out = apply_temperature(z, activation="softmax")
        assert np.all(np.isfinite(out))
        np.testing.assert_allclose(out.sum(axis=0), [1.0, 1.0])

    def test_softmax_needs_class_axis(self):
        with pytest.raises(ValueError):
            apply_temperature([1.0, 2.0], activation="softmax")

    def test_bad_settings(self):
        with pytest.raises(ValueError):
            apply_temperature([0.5], temperature=0.0)
        with pytest.raises(ValueError):
            apply_temperature([0.5], activation="relu")
