# -*- coding: utf-8 -*-
"""
MNIST IDX Module
================

IDX 바이너리 파서 (big-endian magic / 차원, raw uint8 데이터).
- 0x00000803: 이미지 (N, H, W), 1/255 스케일
- 0x00000801: 레이블 (N,)
"""

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from ..errors import DataIOError, FormatError, ValidationError

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801

# 표준 파일 이름 접두사
SPLIT_PREFIX = {"train": "train", "test": "t10k"}

PathLike = Union[str, Path]


@dataclass
class MnistSet:
    """MNIST 이미지 (N×28×28, [0,1]) 와 레이블"""

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        if self.images.shape[0] != self.labels.shape[0]:
            raise ValidationError(
                f"{self.images.shape[0]} images but {self.labels.shape[0]} labels"
            )

    def __len__(self) -> int:
        return int(self.images.shape[0])

    def subset(self, size: int) -> "MnistSet":
        """앞에서부터 size개 (결정적)"""
        size = min(int(size), len(self))
        return MnistSet(images=self.images[:size], labels=self.labels[:size])

    def to_dict(self) -> Dict[str, Any]:
        return {"count": len(self), "shape": list(self.images.shape[1:])}


def parse_idx(data: bytes, source: str = "<bytes>") -> np.ndarray:
    """IDX 바이트 → 배열 (이미지는 float32/255, 레이블은 uint8)"""
    if len(data) < 4:
        raise FormatError(f"{source}: file too short for an IDX header ({len(data)} bytes)")
    (magic,) = struct.unpack(">I", data[:4])
    if magic == IMAGES_MAGIC:
        header = ">IIII"
    elif magic == LABELS_MAGIC:
        header = ">II"
    else:
        raise FormatError(f"{source}: bad IDX magic {data[:4].hex(' ')}")

    size = struct.calcsize(header)
    if len(data) < size:
        raise FormatError(f"{source}: truncated IDX header (length {len(data)} < {size})")
    dims = struct.unpack(header, data[:size])[1:]
    count = int(np.prod(dims))
    if len(data) - size < count:
        raise FormatError(
            f"{source}: truncated IDX payload (length {len(data) - size} < expected {count})"
        )

    raw = np.frombuffer(data, dtype=np.uint8, count=count, offset=size).reshape(dims)
    if magic == IMAGES_MAGIC:
        return (raw.astype(np.float32) / 255.0).astype(np.float32)
    return raw.copy()


def read_idx(path: PathLike) -> np.ndarray:
    """IDX 파일 읽기 (.gz 허용)"""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return parse_idx(raw, str(path))


def encode_idx(array: np.ndarray) -> bytes:
    """uint8 배열 → IDX 바이트 (3-D 이미지 / 1-D 레이블)"""
    arr = np.asarray(array)
    if arr.dtype != np.uint8:
        arr = np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)
    if arr.ndim == 3:
        header = struct.pack(">IIII", IMAGES_MAGIC, *arr.shape)
    elif arr.ndim == 1:
        header = struct.pack(">II", LABELS_MAGIC, arr.shape[0])
    else:
        raise ValidationError(f"IDX writer supports (N,H,W) images or (N,) labels, got {arr.shape}")
    return header + arr.tobytes()


def _find(directory: Path, prefix: str, kind: str) -> Path:
    idx = "idx3" if kind == "images" else "idx1"
    for name in (f"{prefix}-{kind}-{idx}-ubyte", f"{prefix}-{kind}.{idx}-ubyte"):
        for candidate in (directory / name, directory / f"{name}.gz"):
            if candidate.exists():
                return candidate
    raise DataIOError(str(directory), f"no {prefix} {kind} IDX file found")


def load_mnist(directory: PathLike, split: str = "train") -> MnistSet:
    """표준 파일 이름의 MNIST 분할 적재"""
    if split not in SPLIT_PREFIX:
        raise ValidationError(f"unknown MNIST split '{split}'")
    directory = Path(directory)
    prefix = SPLIT_PREFIX[split]
    images = read_idx(_find(directory, prefix, "images"))
    labels = read_idx(_find(directory, prefix, "labels"))
    return MnistSet(images=images, labels=labels)
