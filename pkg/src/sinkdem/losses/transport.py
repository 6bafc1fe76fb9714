# -*- coding: utf-8 -*-
"""
Sinkhorn Loss Module
====================

배치 Sinkhorn 손실 L_OT.
- batch: 이미지 한 장을 한 점으로 보는 배치 경험 측도 (기본)
- pixel: 이미지마다 (행, 열, 밝기) 점 구름을 만드는 쌍별 측도
"""

from enum import Enum
from typing import Any, Union

import numpy as np

from ..errors import ShapeError, ValidationError
from ..ot import SinkhornConfig, sinkhorn_divergence_with_grad
from .base import LossValue


class OtMode(str, Enum):
    """Sinkhorn 측도 구성 방식"""

    BATCH = "batch"
    PIXEL = "pixel"


def _pixel_cloud(img: np.ndarray) -> np.ndarray:
    """(H, W) 이미지 → (H·W, 3) 점 구름, 좌표는 [0,1]로 정규화"""
    H, W = img.shape
    rows, cols = np.meshgrid(
        np.arange(H, dtype=np.float64) / max(H - 1, 1),
        np.arange(W, dtype=np.float64) / max(W - 1, 1),
        indexing="ij",
    )
    return np.stack([rows.ravel(), cols.ravel(), img.astype(np.float64).ravel()], axis=1)


def _pixel_mode(fake: np.ndarray, real: np.ndarray, cfg: SinkhornConfig) -> LossValue:
    if fake.shape != real.shape:
        raise ShapeError(f"pixel mode pairs images one-to-one: {fake.shape} vs {real.shape}")
    n = fake.shape[0]
    imgs_f = fake.reshape(n, fake.shape[-2], fake.shape[-1])
    imgs_r = real.reshape(n, real.shape[-2], real.shape[-1])

    total = 0.0
    grad = np.zeros(imgs_f.shape, dtype=np.float64)
    for i in range(n):
        value, g = sinkhorn_divergence_with_grad(
            _pixel_cloud(imgs_f[i]), _pixel_cloud(imgs_r[i]), None, None, cfg
        )
        total += value
        # 기울기는 밝기 좌표에만 전달
        grad[i] = g[:, 2].reshape(imgs_f.shape[1:])
    return LossValue(value=total / n, grad=(grad / n).reshape(fake.shape))


def sinkhorn_batch_loss(
    fake_batch: Any,
    real_batch: Any,
    cfg: SinkhornConfig,
    mode: Union[OtMode, str] = OtMode.BATCH,
) -> LossValue:
    """Sinkhorn 발산 손실과 생성 배치에 대한 Danskin 기울기"""
    fake_arr = np.asarray(fake_batch)
    fake = fake_arr.astype(np.float64)
    real = np.asarray(real_batch, dtype=np.float64)
    if fake.ndim < 2 or real.ndim < 2:
        raise ShapeError("batches must have a leading batch axis")
    if fake.shape[1:] != real.shape[1:]:
        raise ShapeError(f"image shapes differ: {fake.shape[1:]} vs {real.shape[1:]}")

    try:
        mode = OtMode(mode)
    except ValueError as exc:
        raise ValidationError(f"unknown ot mode {mode!r}") from exc
    if mode == OtMode.PIXEL:
        loss = _pixel_mode(fake, real, cfg)
    else:
        X = fake.reshape(fake.shape[0], -1)
        Y = real.reshape(real.shape[0], -1)
        value, grad = sinkhorn_divergence_with_grad(X, Y, None, None, cfg)
        loss = LossValue(value=value, grad=grad.reshape(fake.shape))

    out_dtype = fake_arr.dtype if np.issubdtype(fake_arr.dtype, np.floating) else np.float64
    return LossValue(value=loss.value, grad=loss.grad.astype(out_dtype))
