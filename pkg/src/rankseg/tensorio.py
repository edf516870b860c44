"""NPY tensor I/O and probability ingestion.

Files are NPY version 1.0, restricted to little-endian float32/float64 and
uint8 in C order; anything else is rejected on read.  Logit inputs are
turned into probabilities by temperature scaling before prediction.
"""

from __future__ import annotations

import numpy as np
from numpy.lib import format as npy_format

ALLOWED_DTYPES = {np.dtype("<f4"), np.dtype("<f8"), np.dtype("|u1")}

ACTIVATIONS = ("none", "sigmoid", "softmax")


class TensorFormatError(ValueError):
    """Unsupported or malformed tensor file."""


def read_npy(path) -> np.ndarray:
    """Read an NPY v1.0 tensor, restricted to <f4, <f8 or |u1 in C order."""
    with open(path, "rb") as fh:
        try:
            version = npy_format.read_magic(fh)
        except ValueError as exc:
            raise TensorFormatError(f"{path}: not an NPY file ({exc})") from exc
        if version != (1, 0):
            raise TensorFormatError(f"{path}: unsupported NPY version {version}")
        shape, fortran_order, dtype = npy_format.read_array_header_1_0(fh)
        if fortran_order:
            raise TensorFormatError(f"{path}: Fortran-order tensors not supported")
        if dtype not in ALLOWED_DTYPES:
            raise TensorFormatError(
                f"{path}: dtype {dtype} not supported (expected <f4, <f8 or |u1)")
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        data = np.fromfile(fh, dtype=dtype, count=count)
        if data.size != count:
            raise TensorFormatError(f"{path}: truncated tensor data")
        return data.reshape(shape)


def write_npy(path, arr: np.ndarray) -> None:
    """Write a C-contiguous tensor as NPY v1.0."""
    arr = np.ascontiguousarray(arr)
    if arr.dtype not in ALLOWED_DTYPES:
        raise TensorFormatError(f"dtype {arr.dtype} not supported for output")
    with open(path, "wb") as fh:
        npy_format.write_array(fh, arr, version=(1, 0))


def apply_temperature(logits, temperature: float = 1.0,
                      activation: str = "none") -> np.ndarray:
    """Convert logits (or validate probabilities) into a probability tensor.

    sigmoid applies 1/(1 + e^(-z/T)) elementwise; softmax divides by T and
    normalizes across the leading class axis with max-subtraction for
    stability; none passes values through after checking they are in [0, 1].
    """
    z = np.asarray(logits, dtype=np.float64)
    if temperature <= 0.0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}")
    if activation == "none":
        if z.size and (not np.all(np.isfinite(z)) or z.min() < 0.0 or z.max() > 1.0):
            raise ValueError(
                "input values outside [0, 1]; pass --activation sigmoid/softmax "
                "if they are logits")
        return z
    z = z / temperature
    if activation == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    if z.ndim < 2:
        raise ValueError("softmax needs a leading class axis")
    z = z - z.max(axis=0, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=0, keepdims=True)
