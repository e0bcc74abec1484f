"""Binary checkpoints: little-endian float32 arrays with integrity checks.

File layout: magic, uint32 header length, JSON header, then the raw
C-order array bytes back to back.  The header pins the observation schema
(load error on mismatch, since feeding a policy the wrong encoding is
silent corruption) and the config hash (warning only, since many config
fields are irrelevant to weights).  Every array carries a CRC32.
"""

from __future__ import annotations

import json
import struct
import warnings
import zlib

import numpy as np

from .config import SCHEMA_VERSION, RunConfig, config_hash
from .errors import CheckpointError
from .nets import PolicyParams

MAGIC = b"BKCKPT01"
_ARRAY_DTYPE = "<f4"


def save_checkpoint(params: PolicyParams, path: str, config: RunConfig, agent_id: int) -> None:
    entries = []
    blobs = []
    for name, arr in params.arrays.items():
        data = np.ascontiguousarray(arr, dtype=_ARRAY_DTYPE).tobytes()
        entries.append(
            {
                "name": name,
                "shape": list(arr.shape),
                "dtype": _ARRAY_DTYPE,
                "crc32": zlib.crc32(data),
                "nbytes": len(data),
            }
        )
        blobs.append(data)
    header = {
        "schema_version": SCHEMA_VERSION,
        "config_hash": config_hash(config),
        "obs_schema": params.schema_version,
        "agent_id": agent_id,
        "obs_dim": params.obs_dim,
        "hidden": params.hidden,
        "arrays": entries,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        for blob in blobs:
            fh.write(blob)


def load_checkpoint(
    path: str, config: RunConfig | None = None, expected_obs_dim: int | None = None
) -> tuple[PolicyParams, dict]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path!r}: {exc}") from exc

    if len(raw) < len(MAGIC) + 4 or raw[: len(MAGIC)] != MAGIC:
        raise CheckpointError(f"{path!r} is not a checkpoint (bad magic)")
    (header_len,) = struct.unpack_from("<I", raw, len(MAGIC))
    body_start = len(MAGIC) + 4 + header_len
    if len(raw) < body_start:
        raise CheckpointError(f"{path!r}: truncated header")
    try:
        header = json.loads(raw[len(MAGIC) + 4 : body_start].decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"{path!r}: corrupt header: {exc}") from exc

    from .config import OBS_SCHEMA_VERSION

    if header.get("obs_schema") != OBS_SCHEMA_VERSION:
        raise CheckpointError(
            f"{path!r}: observation schema {header.get('obs_schema')!r} does not match "
            f"{OBS_SCHEMA_VERSION!r}"
        )
    if expected_obs_dim is not None and header.get("obs_dim") != expected_obs_dim:
        raise CheckpointError(
            f"{path!r}: checkpoint obs_dim {header.get('obs_dim')} does not match "
            f"expected {expected_obs_dim}"
        )
    if config is not None:
        want = config_hash(config)
        if header.get("config_hash") != want:
            warnings.warn(
                f"checkpoint {path!r} was written under config hash "
                f"{header.get('config_hash')}, current is {want}",
                stacklevel=2,
            )

    total = sum(e["nbytes"] for e in header["arrays"])
    if len(raw) - body_start != total:
        raise CheckpointError(
            f"{path!r}: payload length {len(raw) - body_start} != expected {total}"
        )
    arrays: dict[str, np.ndarray] = {}
    offset = body_start
    for entry in header["arrays"]:
        blob = raw[offset : offset + entry["nbytes"]]
        offset += entry["nbytes"]
        if zlib.crc32(blob) != entry["crc32"]:
            raise CheckpointError(f"{path!r}: checksum mismatch on array {entry['name']!r}")
        arr = np.frombuffer(blob, dtype=entry["dtype"]).reshape(entry["shape"]).copy()
        arrays[entry["name"]] = arr
    params = PolicyParams(
        arrays=arrays,
        obs_dim=int(header["obs_dim"]),
        hidden=int(header["hidden"]),
        schema_version=header["obs_schema"],
    )
    return params, header
