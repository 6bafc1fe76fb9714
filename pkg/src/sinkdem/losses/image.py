# -*- coding: utf-8 -*-
"""
Image Losses Module
===================

픽셀 손실 L_P = E‖ŷ - y‖², 구조 손실 L_str = -log(SSIM(ŷ, y)).
SSIM은 가우시안 창 통계의 역전파로 해석 기울기를 계산한다.
"""

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from scipy.signal import convolve

from ..errors import ShapeError
from .base import LossValue, SsimConfig

DEFAULT_SSIM = SsimConfig()


def _check_same(pred: np.ndarray, target: np.ndarray) -> None:
    if pred.shape != target.shape:
        raise ShapeError(f"prediction shape {pred.shape} != target shape {target.shape}")


def pixel_loss(pred: Any, target: Any) -> LossValue:
    """평균 제곱 오차, grad = 2(pred - target)/count"""
    pred = np.asarray(pred)
    target = np.asarray(target)
    _check_same(pred, target)
    diff = pred.astype(np.float64) - target.astype(np.float64)
    value = float(np.mean(diff * diff))
    grad = (2.0 / diff.size) * diff
    out_dtype = pred.dtype if np.issubdtype(pred.dtype, np.floating) else np.float64
    return LossValue(value=value, grad=grad.astype(out_dtype))


def _as_stack(img: np.ndarray) -> np.ndarray:
    """(H,W) / (N,H,W) / (N,1,H,W) → (N,H,W) float64"""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        return arr[None]
    if arr.ndim == 3:
        return arr
    if arr.ndim == 4 and arr.shape[1] == 1:
        return arr[:, 0]
    raise ShapeError(f"SSIM expects single-channel images, got shape {arr.shape}")


@dataclass
class _SsimStats:
    mu1: np.ndarray
    mu2: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    S: np.ndarray


def _filter(x: np.ndarray, window: np.ndarray) -> np.ndarray:
    return np.asarray(convolve(x, window[None], mode="valid"))


def _filter_adjoint(g: np.ndarray, window: np.ndarray) -> np.ndarray:
    # 대칭 창이므로 full 합성곱이 valid 필터의 수반
    return np.asarray(convolve(g, window[None], mode="full"))


def _ssim_stats(x: np.ndarray, y: np.ndarray, cfg: SsimConfig) -> _SsimStats:
    if x.shape[-1] < cfg.window_size or x.shape[-2] < cfg.window_size:
        raise ShapeError(
            f"image {x.shape[-2]}×{x.shape[-1]} is smaller than the {cfg.window_size}×{cfg.window_size} window"
        )
    w = cfg.window()
    mu1 = _filter(x, w)
    mu2 = _filter(y, w)
    sigma1 = _filter(x * x, w) - mu1 * mu1
    sigma2 = _filter(y * y, w) - mu2 * mu2
    sigma12 = _filter(x * y, w) - mu1 * mu2

    A1 = 2.0 * mu1 * mu2 + cfg.c1
    A2 = 2.0 * sigma12 + cfg.c2
    B1 = mu1 * mu1 + mu2 * mu2 + cfg.c1
    B2 = sigma1 + sigma2 + cfg.c2
    S = (A1 * A2) / (B1 * B2)
    return _SsimStats(mu1=mu1, mu2=mu2, A1=A1, A2=A2, B1=B1, B2=B2, S=S)


def ssim_map(pred: Any, target: Any, cfg: Optional[SsimConfig] = None) -> np.ndarray:
    """유효 위치별 SSIM 맵 (N, H-w+1, W-w+1)"""
    cfg = cfg or DEFAULT_SSIM
    x, y = _as_stack(pred), _as_stack(target)
    _check_same(x, y)
    return _ssim_stats(x, y, cfg).S


def mean_ssim(pred: Any, target: Any, cfg: Optional[SsimConfig] = None) -> float:
    return float(np.mean(ssim_map(pred, target, cfg)))


def ssim_loss(pred: Any, target: Any, cfg: Optional[SsimConfig] = None) -> LossValue:
    """L_str = -log(clamp(mean SSIM, ssim_clamp_min, 1))"""
    cfg = cfg or DEFAULT_SSIM
    pred_arr = np.asarray(pred)
    x, y = _as_stack(pred_arr), _as_stack(target)
    _check_same(x, y)
    st = _ssim_stats(x, y, cfg)

    mean = float(np.mean(st.S))
    clamped = min(max(mean, cfg.ssim_clamp_min), 1.0)
    value = -float(np.log(clamped))

    if mean < cfg.ssim_clamp_min:
        grad = np.zeros_like(x)
    else:
        gS = np.full_like(st.S, -1.0 / (clamped * st.S.size))
        denom = st.B1 * st.B2
        d_mu1 = 2.0 * st.mu2 * (st.A2 - st.A1) / denom - 2.0 * st.mu1 * st.S * (1.0 / st.B1 - 1.0 / st.B2)
        d_q1 = -st.S / st.B2
        d_p12 = 2.0 * st.A1 / denom

        w = cfg.window()
        grad = (
            _filter_adjoint(gS * d_mu1, w)
            + 2.0 * x * _filter_adjoint(gS * d_q1, w)
            + y * _filter_adjoint(gS * d_p12, w)
        )

    out_dtype = pred_arr.dtype if np.issubdtype(pred_arr.dtype, np.floating) else np.float64
    return LossValue(value=value, grad=grad.reshape(pred_arr.shape).astype(out_dtype))
