"""Versioned binary container for fitted models and batch vectors.

Layout (all integers little-endian):

    magic        4 bytes  b"FDV1"
    kind         1 byte   record tag (see KIND_*)
    meta_len     uint32
    meta         meta_len bytes of UTF-8 JSON (vocab lists, params, ids)
    n_arrays     uint32
    per array:
        name_len uint16, name (UTF-8)
        dtype    1 byte (0x01 float64, 0x02 int64)
        ndim     uint8
        shape    ndim * uint64
        data     raw little-endian buffer

Arrays are materialized as C-contiguous numpy arrays; round-trips are exact.
"""

import json
import struct

import numpy as np

MAGIC = b"FDV1"

KIND_GMM = 0x01
KIND_VMF = 0x02
KIND_TFIDF = 0x10
KIND_LSI = 0x11
KIND_LDA = 0x12
KIND_FV_BATCH = 0x20
KIND_EMBEDDING = 0x21
KIND_DOC_EMBEDDINGS = 0x22
KIND_DOCVEC_BATCH = 0x23
KIND_INDEX = 0x30

_DTYPE_TAGS = {np.dtype("<f8"): 0x01, np.dtype("<i8"): 0x02}
_TAG_DTYPES = {0x01: np.dtype("<f8"), 0x02: np.dtype("<i8")}


class ContainerError(ValueError):
    """Malformed or truncated FDV1 container."""


def write_container(path, kind, arrays, meta=None):
    """Write ``arrays`` (name -> ndarray) and JSON-serializable ``meta``."""
    meta_bytes = json.dumps(meta or {}, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<B", kind))
        fh.write(struct.pack("<I", len(meta_bytes)))
        fh.write(meta_bytes)
        fh.write(struct.pack("<I", len(arrays)))
        for name, arr in arrays.items():
            arr = np.ascontiguousarray(arr)
            if arr.dtype.kind == "f":
                arr = arr.astype("<f8", copy=False)
            elif arr.dtype.kind in "iu":
                arr = arr.astype("<i8", copy=False)
            else:
                raise ContainerError(f"unsupported dtype {arr.dtype} for array {name!r}")
            name_bytes = name.encode("utf-8")
            fh.write(struct.pack("<H", len(name_bytes)))
            fh.write(name_bytes)
            fh.write(struct.pack("<B", _DTYPE_TAGS[arr.dtype]))
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            fh.write(arr.tobytes())


def _read_exact(fh, n, what):
    buf = fh.read(n)
    if len(buf) != n:
        raise ContainerError(f"truncated container while reading {what}")
    return buf


def read_container(path, expect_kind=None):
    """Read an FDV1 file; returns (kind, meta, arrays)."""
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != MAGIC:
            raise ContainerError(f"{path}: bad magic, not an FDV1 container")
        kind = struct.unpack("<B", _read_exact(fh, 1, "kind"))[0]
        if expect_kind is not None and kind != expect_kind:
            raise ContainerError(
                f"{path}: kind 0x{kind:02x}, expected 0x{expect_kind:02x}"
            )
        meta_len = struct.unpack("<I", _read_exact(fh, 4, "meta length"))[0]
        meta = json.loads(_read_exact(fh, meta_len, "meta").decode("utf-8"))
        n_arrays = struct.unpack("<I", _read_exact(fh, 4, "array count"))[0]
        arrays = {}
        for _ in range(n_arrays):
            name_len = struct.unpack("<H", _read_exact(fh, 2, "name length"))[0]
            name = _read_exact(fh, name_len, "name").decode("utf-8")
            tag = struct.unpack("<B", _read_exact(fh, 1, "dtype tag"))[0]
            if tag not in _TAG_DTYPES:
                raise ContainerError(f"{path}: unknown dtype tag 0x{tag:02x}")
            ndim = struct.unpack("<B", _read_exact(fh, 1, "ndim"))[0]
            shape = struct.unpack(f"<{ndim}Q", _read_exact(fh, 8 * ndim, "shape"))
            dtype = _TAG_DTYPES[tag]
            count = int(np.prod(shape)) if ndim else 1
            data = _read_exact(fh, count * dtype.itemsize, f"array {name!r}")
            arrays[name] = np.frombuffer(data, dtype=dtype).reshape(shape).copy()
    return kind, meta, arrays
