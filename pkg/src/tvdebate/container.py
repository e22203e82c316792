"""Self-describing weight container shared by the trainable models.

Layout::

    b"TVDW"  magic
    uint32   little-endian length of the JSON header
    header   UTF-8 JSON: kind, architecture, metadata, tensors[name, shape, offset]
    data     little-endian float32 tensors, concatenated in header order
"""
from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path
from typing import Any, Mapping

import numpy as np

MAGIC = b"TVDW"


class ContainerError(ValueError):
    pass


def dumps(kind: str, architecture: Mapping[str, Any], tensors: Mapping[str, np.ndarray],
          metadata: Mapping[str, Any] | None = None) -> bytes:
    entries = []
    chunks = []
    offset = 0
    for name, arr in tensors.items():
        data = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        entries.append({"name": name, "shape": list(np.shape(arr)), "offset": offset})
        chunks.append(data)
        offset += len(data)
    header = json.dumps(
        {"kind": kind, "architecture": dict(architecture), "metadata": dict(metadata or {}),
         "tensors": entries},
        sort_keys=True,
    ).encode("utf-8")
    return MAGIC + struct.pack("<I", len(header)) + header + b"".join(chunks)


def loads(blob: bytes, kind: str | None = None) -> tuple[dict, dict[str, np.ndarray], dict]:
    """Return ``(architecture, tensors, metadata)``; tensors come back as float32."""
    if blob[:4] != MAGIC or len(blob) < 8:
        raise ContainerError("not a weight container")
    (hlen,) = struct.unpack("<I", blob[4:8])
    try:
        header = json.loads(blob[8:8 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerError(f"corrupt header: {exc}") from None
    if kind is not None and header.get("kind") != kind:
        raise ContainerError(f"expected a {kind!r} container, found {header.get('kind')!r}")
    data = blob[8 + hlen:]
    tensors = {}
    for entry in header["tensors"]:
        count = int(np.prod(entry["shape"], dtype=np.int64))
        start = entry["offset"]
        if start + 4 * count > len(data):
            raise ContainerError(f"tensor {entry['name']} runs past end of file")
        tensors[entry["name"]] = np.frombuffer(data, dtype="<f4", count=count, offset=start).reshape(entry["shape"]).copy()
    return header["architecture"], tensors, header["metadata"]


_UMASK = os.umask(0)
os.umask(_UMASK)


def atomic_write(path: Path | str, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.chmod(tmp, 0o666 & ~_UMASK)  # mkstemp creates 0600
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
