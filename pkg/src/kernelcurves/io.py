"""Matrix input/output.

Two on-disk formats are supported:

- headerless CSV of decimal floats, one sample per row;
- a raw binary format: magic bytes "HEAM", u32 version (=1), u64 rows,
  u64 cols, then rows*cols little-endian float64 values in row-major order.
"""

import struct

import numpy as np

MAGIC = b"HEAM"
VERSION = 1

_HEADER = struct.Struct("<4sIQQ")


class FormatError(ValueError):
    pass


def save_csv(path, matrix):
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    np.savetxt(path, matrix, delimiter=",", fmt="%.17g")


def load_csv(path):
    matrix = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    if not np.all(np.isfinite(matrix)):
        raise FormatError(f"non-finite entries in {path}")
    return matrix


def save_binary(path, matrix):
    matrix = np.ascontiguousarray(np.atleast_2d(matrix), dtype=np.float64)
    rows, cols = matrix.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, rows, cols))
        fh.write(matrix.astype("<f8", copy=False).tobytes())


def load_binary(path):
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise FormatError(f"{path}: truncated header")
        magic, version, rows, cols = _HEADER.unpack(header)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        if version != VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        payload = fh.read(8 * rows * cols)
    if len(payload) != 8 * rows * cols:
        raise FormatError(f"{path}: truncated payload")
    matrix = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    matrix = matrix.reshape(rows, cols)
    if not np.all(np.isfinite(matrix)):
        raise FormatError(f"non-finite entries in {path}")
    return matrix


def load_matrix(path, fmt=None):
    """Load a matrix, sniffing the format from the magic bytes if fmt is None."""
    if fmt is None:
        with open(path, "rb") as fh:
            fmt = "binary" if fh.read(4) == MAGIC else "csv"
    if fmt == "csv":
        return load_csv(path)
    if fmt == "binary":
        return load_binary(path)
    raise FormatError(f"unknown format {fmt!r}")


def save_matrix(path, matrix, fmt="csv"):
    if fmt == "csv":
        save_csv(path, matrix)
    elif fmt == "binary":
        save_binary(path, matrix)
    else:
        raise FormatError(f"unknown format {fmt!r}")
