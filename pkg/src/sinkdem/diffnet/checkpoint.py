# -*- coding: utf-8 -*-
"""
Checkpoint Module
=================

SDNC 체크포인트 형식 (little-endian):
    magic "SDNC", u32 version
    파라미터마다: u32 이름 길이, 이름(UTF-8), u32 rank, u32 dims..., f32 payload
"""

import struct
from pathlib import Path
from typing import Dict, Mapping, Union

import numpy as np

from ..errors import DataIOError, FormatError, ShapeError
from .network import Network

MAGIC = b"SDNC"
VERSION = 1

PathLike = Union[str, Path]


def encode_checkpoint(params: Mapping[str, np.ndarray]) -> bytes:
    """파라미터 딕셔너리 → SDNC 바이트 (삽입 순서 유지)"""
    chunks = [MAGIC, struct.pack("<I", VERSION)]
    for name, value in params.items():
        raw = name.encode("utf-8")
        arr = np.ascontiguousarray(value, dtype="<f4")
        chunks.append(struct.pack("<I", len(raw)))
        chunks.append(raw)
        chunks.append(struct.pack("<I", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(arr.tobytes())
    return b"".join(chunks)


def decode_checkpoint(data: bytes) -> Dict[str, np.ndarray]:
    """SDNC 바이트 → {이름: float32 배열}"""
    if len(data) < 8 or data[:4] != MAGIC:
        raise FormatError(f"not an SDNC checkpoint (magic {data[:4].hex(' ')})")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise FormatError(f"unsupported SDNC version {version}")

    params: Dict[str, np.ndarray] = {}
    pos = 8
    try:
        while pos < len(data):
            (name_len,) = struct.unpack_from("<I", data, pos)
            pos += 4
            name = data[pos : pos + name_len].decode("utf-8")
            pos += name_len
            (rank,) = struct.unpack_from("<I", data, pos)
            pos += 4
            dims = struct.unpack_from(f"<{rank}I", data, pos)
            pos += 4 * rank
            count = int(np.prod(dims)) if rank else 1
            end = pos + 4 * count
            if end > len(data):
                raise FormatError(f"truncated payload for parameter '{name}'")
            params[name] = np.frombuffer(data[pos:end], dtype="<f4").reshape(dims).astype(np.float32)
            pos = end
    except (struct.error, UnicodeDecodeError) as exc:
        raise FormatError(f"corrupt SDNC checkpoint at byte {pos}: {exc}") from exc
    return params


def save_checkpoint(params: Mapping[str, np.ndarray], path: PathLike) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(encode_checkpoint(params))
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    return path


def load_checkpoint(path: PathLike) -> Dict[str, np.ndarray]:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    try:
        return decode_checkpoint(data)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def load_into(net: Network, path: PathLike) -> Network:
    """체크포인트를 네트워크에 적재 (이름/형상 일치 검증)"""
    loaded = load_checkpoint(path)
    missing = sorted(set(net.params) - set(loaded))
    if missing:
        raise FormatError(f"{path}: checkpoint lacks parameters {missing[:3]}")
    for name, value in loaded.items():
        if name not in net.params:
            raise FormatError(f"{path}: unexpected parameter '{name}'")
        if value.shape != net.params[name].shape:
            raise ShapeError(f"'{name}': checkpoint shape {value.shape} != {net.params[name].shape}")
        net.params[name][...] = value.astype(net.dtype)
    return net
