# -*- coding: utf-8 -*-
"""
Synthetic Terrain Module
========================

합성 DEM 파이프라인.
- gen_terrain: diamond-square 프랙탈 높이장
- degrade: 가우시안 블러 + 데시메이션 + bicubic 재업샘플 (x̃ 생성)
- hillshade_prior: 음영기복/경사/고도 3채널 의사 MX prior (z 생성)
"""

from typing import Tuple

import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates

from ..errors import ValidationError
from .rasters import RasterF32


def _diamond_fill(h: np.ndarray, rows: np.ndarray, cols: np.ndarray, half: int, noise: np.ndarray) -> None:
    """경계 안쪽 상하좌우 이웃 평균 + 잡음"""
    size = h.shape[0]
    total = np.zeros(rows.shape)
    count = np.zeros(rows.shape)
    for dr, dc in ((-half, 0), (half, 0), (0, -half), (0, half)):
        r, c = rows + dr, cols + dc
        ok = (r >= 0) & (r < size) & (c >= 0) & (c < size)
        total[ok] += h[r[ok], c[ok]]
        count += ok
    h[rows, cols] = total / count + noise


def gen_terrain(seed: int, size: int = 65, roughness: float = 0.5) -> RasterF32:
    """diamond-square 높이장, [0,1] min–max 정규화, seed별 결정적"""
    k = size - 1
    if size < 3 or (k & (k - 1)) != 0:
        raise ValidationError(f"terrain size must be 2^k+1 with k >= 1, got {size}")
    if not (0.0 < roughness < 1.0):
        raise ValidationError(f"roughness must lie in (0, 1), got {roughness}")

    rng = np.random.default_rng(seed)
    h = np.zeros((size, size), dtype=np.float64)
    h[0, 0], h[0, k], h[k, 0], h[k, k] = rng.uniform(-1.0, 1.0, 4)

    step = k
    scale = 1.0
    while step > 1:
        half = step // 2
        scale *= roughness

        # square step: 정사각형 중심
        centers = (
            h[0:k:step, 0:k:step] + h[step::step, 0:k:step]
            + h[0:k:step, step::step] + h[step::step, step::step]
        ) / 4.0
        h[half::step, half::step] = centers + rng.uniform(-scale, scale, centers.shape)

        # diamond step: 변의 중점 (행 중점 / 열 중점)
        rows, cols = np.meshgrid(np.arange(half, size, step), np.arange(0, size, step), indexing="ij")
        _diamond_fill(h, rows, cols, half, rng.uniform(-scale, scale, rows.shape))
        rows, cols = np.meshgrid(np.arange(0, size, step), np.arange(half, size, step), indexing="ij")
        _diamond_fill(h, rows, cols, half, rng.uniform(-scale, scale, rows.shape))

        step = half

    lo, hi = h.min(), h.max()
    normalized = np.zeros_like(h) if hi <= lo else (h - lo) / (hi - lo)
    return RasterF32(normalized)


def degrade(dem: RasterF32, factor: int, blur_sigma: float) -> RasterF32:
    """블러 → factor 간격 데시메이션 → 3차 스플라인 업샘플 (원래 크기)"""
    if int(factor) != factor or factor < 1:
        raise ValidationError(f"factor must be a positive integer, got {factor}")
    if blur_sigma < 0:
        raise ValidationError(f"blur_sigma must be >= 0, got {blur_sigma}")
    H, W = dem.height, dem.width
    if (H - 1) % factor or (W - 1) % factor:
        raise ValidationError(f"factor {factor} must divide raster dimensions minus one ({H - 1}, {W - 1})")

    data = dem.data.reshape(H, W).astype(np.float64)
    if blur_sigma > 0:
        data = gaussian_filter(data, sigma=blur_sigma, mode="nearest")
    coarse = data[::factor, ::factor]

    rows, cols = np.meshgrid(np.arange(H) / factor, np.arange(W) / factor, indexing="ij")
    up = map_coordinates(coarse, [rows, cols], order=3, mode="nearest")
    return RasterF32(up)


def _minmax(a: np.ndarray) -> np.ndarray:
    lo, hi = a.min(), a.max()
    return np.zeros_like(a) if hi <= lo else (a - lo) / (hi - lo)


def hillshade_prior(
    dem: RasterF32,
    azimuth: float = 315.0,
    altitude: float = 45.0,
    z_factor: float = 1.0,
) -> RasterF32:
    """3채널 prior: (음영기복, 경사/(π/2), 정규화 고도), 모두 [0,1]"""
    if dem.height < 3 or dem.width < 3:
        raise ValidationError(f"hillshade needs at least a 3×3 dem, got {dem.height}×{dem.width}")
    z = dem.data.reshape(dem.height, dem.width).astype(np.float64)

    dz_dy, dz_dx = np.gradient(z * z_factor)
    slope = np.arctan(np.hypot(dz_dx, dz_dy))
    aspect = np.arctan2(dz_dy, -dz_dx)

    zenith = np.radians(90.0 - altitude)
    azimuth_math = np.radians(360.0 - azimuth + 90.0)
    shade = np.cos(zenith) * np.cos(slope) + np.sin(zenith) * np.sin(slope) * np.cos(azimuth_math - aspect)

    channels = np.stack(
        [np.clip(shade, 0.0, 1.0), slope / (np.pi / 2.0), _minmax(z)],
        axis=0,
    )
    return RasterF32(channels)


def make_patch_triplet(
    seed: int, size: int, factor: int, blur_sigma: float, roughness: float
) -> Tuple[RasterF32, RasterF32, RasterF32]:
    """(x̃, z, y) 삼중쌍: 저해상 입력, 고해상 prior, 원본"""
    truth = gen_terrain(seed, size, roughness)
    coarse = degrade(truth, factor, blur_sigma)
    # 높이 [0,1]을 한 변 길이 단위로 환산
    prior = hillshade_prior(truth, z_factor=float(size - 1))
    return coarse, prior, truth
