"""Versioned binary model container.

Layout (all integers little-endian):

    bytes 0..7    magic ``KSNCKPT1``
    bytes 8..11   uint32 length of the config block
    config block  UTF-8 JSON describing what follows (kind, layer specs,
                  arbitrary extras)
    tensor stream one record per parameter tensor, in declaration order:
                  uint32 ndim, ndim x uint32 dims, then float64 values

The config's ``kind`` field tells loaders how to rebuild the model.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .network import LayerSpec, Network

MAGIC = b"KSNCKPT1"


class CheckpointError(ValueError):
    pass


def pack_container(config: dict, tensors: list[np.ndarray]) -> bytes:
    config_bytes = json.dumps(config, ensure_ascii=False, sort_keys=True).encode("utf-8")
    parts = [MAGIC, struct.pack("<I", len(config_bytes)), config_bytes]
    for t in tensors:
        t = np.asarray(t, dtype="<f8")
        parts.append(struct.pack("<I", t.ndim))
        parts.append(struct.pack(f"<{t.ndim}I", *t.shape))
        parts.append(t.tobytes())
    return b"".join(parts)


def unpack_container(data: bytes) -> tuple[dict, list[np.ndarray]]:
    if len(data) < 12 or data[:8] != MAGIC:
        raise CheckpointError("not a model container (bad magic)")
    (config_len,) = struct.unpack_from("<I", data, 8)
    config_end = 12 + config_len
    if len(data) < config_end:
        raise CheckpointError("truncated config block")
    config = json.loads(data[12:config_end].decode("utf-8"))
    tensors = []
    pos = config_end
    while pos < len(data):
        if pos + 4 > len(data):
            raise CheckpointError("truncated tensor header")
        (ndim,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if pos + 4 * ndim > len(data):
            raise CheckpointError("truncated tensor dims")
        shape = struct.unpack_from(f"<{ndim}I", data, pos)
        pos += 4 * ndim
        count = int(np.prod(shape)) if ndim else 1
        if pos + 8 * count > len(data):
            raise CheckpointError("truncated tensor data")
        values = np.frombuffer(data[pos:pos + 8 * count], dtype="<f8").reshape(shape)
        tensors.append(values.astype(np.float64))
        pos += 8 * count
    return config, tensors


def save_network(path, network: Network, kind: str = "classifier",
                 extra: dict | None = None) -> None:
    config = {
        "format": 1,
        "kind": kind,
        "specs": [s.to_dict() for s in network.specs],
        "extra": extra or {},
    }
    tensors = [p.value for p in network.parameters()]
    with open(path, "wb") as fh:
        fh.write(pack_container(config, tensors))


def load_network(path) -> tuple[Network, dict]:
    """Rebuild a network from a container; returns (network, extra dict)."""
    with open(path, "rb") as fh:
        config, tensors = unpack_container(fh.read())
    specs = [LayerSpec.from_dict(d) for d in config["specs"]]
    network = Network(specs)
    params = network.parameters()
    if len(params) != len(tensors):
        raise CheckpointError(
            f"container holds {len(tensors)} tensors, network needs {len(params)}")
    for p, t in zip(params, tensors):
        if p.value.shape != t.shape:
            raise CheckpointError(f"shape mismatch for {p.name}: {p.value.shape} vs {t.shape}")
        p.value = t.copy()
        p.grad = np.zeros_like(p.value)
    return network, config.get("extra", {})
