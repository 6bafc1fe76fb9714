# -*- coding: utf-8 -*-
"""
Raster Module
=============

래스터 타입과 파일 형식.
- SDEM: magic "SDEM", u32 H, u32 W, u32 reserved(0), f32 little-endian 데이터 (무손실)
- PGM: P5 16-bit big-endian 미리보기
"""

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from ..errors import DataIOError, FormatError, ShapeError, ValidationError

SDEM_MAGIC = b"SDEM"
SDEM_HEADER = "<4sIII"
PGM_MAXVAL = 65535

PathLike = Union[str, Path]


@dataclass
class RasterF32:
    """float32 래스터 (H, W) 또는 (C, H, W)"""

    data: np.ndarray
    nodata: Optional[float] = None

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.float32)
        if data.ndim not in (2, 3):
            raise ShapeError(f"raster must be (H,W) or (C,H,W), got shape {data.shape}")
        if data.shape[-1] < 1 or data.shape[-2] < 1:
            raise ShapeError("raster dimensions must be >= 1")
        valid = data if self.nodata is None else data[data != self.nodata]
        if not np.all(np.isfinite(valid)):
            raise ValidationError("raster contains non-finite values")
        self.data = data

    @property
    def height(self) -> int:
        return int(self.data.shape[-2])

    @property
    def width(self) -> int:
        return int(self.data.shape[-1])

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else int(self.data.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "height": self.height,
            "width": self.width,
            "channels": self.channels,
            "nodata": self.nodata,
        }


def _as_raster(raster: Union[RasterF32, np.ndarray]) -> RasterF32:
    return raster if isinstance(raster, RasterF32) else RasterF32(np.asarray(raster))


def _write(path: Path, payload: bytes) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    return path


def write_raster(raster: Union[RasterF32, np.ndarray], path: PathLike) -> Path:
    """SDEM 형식 기록 (단일 채널)"""
    r = _as_raster(raster)
    if r.channels != 1:
        raise ShapeError(f"SDEM stores single-channel rasters, got {r.channels} channels")
    data = r.data.reshape(r.height, r.width)
    header = struct.pack(SDEM_HEADER, SDEM_MAGIC, r.height, r.width, 0)
    return _write(Path(path), header + data.astype("<f4").tobytes())


def _decode_sdem(raw: bytes, source: str) -> RasterF32:
    size = struct.calcsize(SDEM_HEADER)
    if len(raw) < size:
        raise FormatError(f"{source}: truncated SDEM header")
    _, height, width, _ = struct.unpack(SDEM_HEADER, raw[:size])
    expected = 4 * height * width
    if len(raw) - size != expected:
        raise FormatError(f"{source}: SDEM payload is {len(raw) - size} bytes, expected {expected}")
    data = np.frombuffer(raw, dtype="<f4", offset=size).reshape(height, width)
    return RasterF32(data.astype(np.float32))


def _pgm_tokens(raw: bytes, count: int) -> tuple[list[int], int]:
    """P5 헤더 토큰(주석 제외)과 데이터 시작 위치"""
    tokens: list[int] = []
    pos = 2
    while len(tokens) < count:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(int(raw[start:pos]))
    return tokens, pos + 1


def _decode_pgm(raw: bytes, source: str) -> RasterF32:
    try:
        (width, height, maxval), start = _pgm_tokens(raw, 3)
    except ValueError as exc:
        raise FormatError(f"{source}: malformed PGM header") from exc
    dtype = ">u2" if maxval > 255 else "u1"
    itemsize = 2 if maxval > 255 else 1
    if len(raw) - start < itemsize * width * height:
        raise FormatError(f"{source}: truncated PGM payload")
    samples = np.frombuffer(raw, dtype=dtype, count=width * height, offset=start)
    return RasterF32((samples.astype(np.float64) / maxval).reshape(height, width))


def read_raster(path: PathLike) -> RasterF32:
    """SDEM 또는 PGM(P5) 읽기"""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    if raw[:4] == SDEM_MAGIC:
        return _decode_sdem(raw, str(path))
    if raw[:2] == b"P5":
        return _decode_pgm(raw, str(path))
    raise FormatError(f"{path}: unknown raster format (magic {raw[:4].hex(' ')})")


def write_pgm_preview(raster: Union[RasterF32, np.ndarray], path: PathLike) -> Path:
    """min–max 스케일 후 16-bit PGM 기록 (상수 래스터는 0)"""
    r = _as_raster(raster)
    if r.channels != 1:
        raise ShapeError("PGM preview needs a single-channel raster")
    data = r.data.reshape(r.height, r.width).astype(np.float64)
    lo, hi = float(data.min()), float(data.max())
    scaled = np.zeros_like(data) if hi <= lo else (data - lo) / (hi - lo)
    samples = np.rint(scaled * PGM_MAXVAL).astype(">u2")
    header = f"P5\n{r.width} {r.height}\n{PGM_MAXVAL}\n".encode("ascii")
    return _write(Path(path), header + samples.tobytes())
