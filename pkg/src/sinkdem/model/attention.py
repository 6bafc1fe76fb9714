# -*- coding: utf-8 -*-
"""
Attention Module
================

판별자 공간 어텐션 D_SA(m) = Σ_i Σ_j |a_ij(m)| (min–max 정규화)과
단일 채널 맵용 단순화 PSA(polarized self-attention).
두 연산 모두 명시적 VJP를 제공한다.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..diffnet import Network, backward, forward, resize_bilinear, resize_bilinear_adjoint
from ..diffnet import layers as L
from ..errors import ShapeError, ValidationError

# 정규화 분모가 이 값 이하면 상수 맵으로 간주
DEGENERATE_RANGE = 1e-12


@dataclass
class AttentionMap:
    """[0,1] 범위의 공간 어텐션 맵, values 형상 (N, H, W)"""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim == 2:
            values = values[None]
        if values.ndim != 3:
            raise ShapeError(f"attention map must be (N,H,W), got shape {values.shape}")
        if not np.all(np.isfinite(values)) or values.min() < 0.0 or values.max() > 1.0:
            raise ValidationError("attention map entries must be finite and lie in [0, 1]")
        self.values = values

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.values.shape[1]), int(self.values.shape[2]))

    @classmethod
    def ones(cls, n: int, height: int, width: int, dtype: Any = np.float32) -> "AttentionMap":
        return cls(np.ones((n, height, width), dtype=dtype))

    def as_channel(self) -> np.ndarray:
        """(N, 1, H, W) 텐서로 변환"""
        return self.values[:, None, :, :]


# =============================================================================
# min–max 정규화
# =============================================================================


@dataclass
class MinMaxCache:
    normalized: np.ndarray
    span: np.ndarray
    argmin: np.ndarray
    argmax: np.ndarray


def minmax_normalize(t: np.ndarray) -> Tuple[np.ndarray, MinMaxCache]:
    """샘플별 (H, W) min–max 정규화; 상수 맵은 0"""
    n = t.shape[0]
    flat = t.reshape(n, -1)
    lo = flat.min(axis=1)
    hi = flat.max(axis=1)
    span = hi - lo
    safe = np.where(span > DEGENERATE_RANGE, span, 1.0)
    out = (flat - lo[:, None]) / safe[:, None]
    out[span <= DEGENERATE_RANGE] = 0.0
    out = np.clip(out, 0.0, 1.0)
    cache = MinMaxCache(
        normalized=out,
        span=span,
        argmin=flat.argmin(axis=1),
        argmax=flat.argmax(axis=1),
    )
    return out.reshape(t.shape), cache


def minmax_vjp(cache: MinMaxCache, grad: np.ndarray) -> np.ndarray:
    """min–max 정규화의 VJP (최소/최대 위치에 대한 부분기울기 포함)"""
    n = grad.shape[0]
    g = grad.reshape(n, -1).astype(np.float64)
    u = cache.normalized
    live = cache.span > DEGENERATE_RANGE
    span = np.where(live, cache.span, 1.0)

    out = g / span[:, None]
    rows = np.arange(n)
    out[rows, cache.argmin] += np.sum(g * (u - 1.0), axis=1) / span
    out[rows, cache.argmax] -= np.sum(g * u, axis=1) / span
    out[~live] = 0.0
    return out.reshape(grad.shape)


# =============================================================================
# D_SA
# =============================================================================


@dataclass
class SpatialAttentionCache:
    taps: List[np.ndarray]
    size: Tuple[int, int]
    minmax: MinMaxCache


def spatial_attention_forward(
    taps: Sequence[np.ndarray], size: Tuple[int, int]
) -> Tuple[AttentionMap, SpatialAttentionCache]:
    """채널 절대값 합을 공통 해상도로 리사이즈해 합산 후 정규화"""
    if not taps:
        raise ValidationError("d_spatial_attention needs at least one tap")
    total = None
    for a in taps:
        a64 = np.asarray(a, dtype=np.float64)
        if a64.ndim != 4:
            raise ShapeError(f"tap activations must be (N,C,H,W), got shape {a64.shape}")
        s = np.abs(a64).sum(axis=1)
        if s.shape[1:] != size:
            s = resize_bilinear(s, size)
        total = s if total is None else total + s

    normalized, mm = minmax_normalize(total)
    cache = SpatialAttentionCache(taps=[np.asarray(a) for a in taps], size=size, minmax=mm)
    return AttentionMap(normalized), cache


def spatial_attention_vjp(cache: SpatialAttentionCache, grad_map: np.ndarray) -> List[np.ndarray]:
    """어텐션 맵 기울기 → 각 탭 활성값 기울기"""
    g_total = minmax_vjp(cache.minmax, np.asarray(grad_map, dtype=np.float64))
    grads = []
    for a in cache.taps:
        g_s = g_total
        if a.shape[2:] != cache.size:
            g_s = resize_bilinear_adjoint(g_total, (a.shape[2], a.shape[3]))
        grads.append((np.sign(a) * g_s[:, None, :, :]).astype(a.dtype))
    return grads


def d_spatial_attention(
    taps: Sequence[np.ndarray], size: Optional[Tuple[int, int]] = None
) -> AttentionMap:
    """D_SA: 탭 목록 → [0,1] 어텐션 맵 (기본 해상도는 첫 탭)"""
    if not taps:
        raise ValidationError("d_spatial_attention needs at least one tap")
    if size is None:
        first = np.asarray(taps[0])
        size = (int(first.shape[2]), int(first.shape[3]))
    attention, _ = spatial_attention_forward(taps, size)
    return attention


# =============================================================================
# PSA
# =============================================================================


@dataclass
class PsaCache:
    activations: Dict[str, np.ndarray]
    minmax: MinMaxCache
    scale: float


@dataclass
class PolarizedSpatialAttention:
    """단순화 PSA: softmax(conv1x1(m)) 공간 분기 × sigmoid 스칼라 게이트, 해상도 유지"""

    seed: int = 0
    dtype: Any = np.float32
    net: Network = field(init=False)

    def __post_init__(self) -> None:
        net = Network(seed=self.seed, dtype=self.dtype, name="psa")
        net.add_input("m", 1)
        net.add("logits", L.conv1x1(1, 1), "m")
        net.add("spatial", L.softmax((2, 3)), "logits")
        net.add("pooled", L.global_avg_pool(), "m")
        net.add("gate_pre", L.dense(1, 1), "pooled")
        net.add("gate", L.sigmoid(), "gate_pre")
        net.add("out", L.elementwise_mul(), ["spatial", "gate"])
        # 초기 응답은 입력 순서를 보존 (양의 단위 가중치)
        net.params["logits.weight"][...] = 1.0
        net.params["logits.bias"][...] = 0.0
        self.net = net

    @property
    def params(self) -> Dict[str, np.ndarray]:
        return self.net.params

    def apply(self, attention: AttentionMap) -> Tuple[AttentionMap, PsaCache]:
        m = attention.as_channel().astype(self.net.dtype)
        acts = forward(self.net, {"m": m})
        H, W = attention.shape
        scale = float(H * W)
        normalized, mm = minmax_normalize(acts["out"][:, 0].astype(np.float64) * scale)
        return AttentionMap(normalized), PsaCache(activations=acts, minmax=mm, scale=scale)

    def vjp(self, cache: PsaCache, grad_map: np.ndarray) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
        """출력 맵 기울기 → (PSA 파라미터 기울기, 입력 맵 기울기 (N,H,W))"""
        g = minmax_vjp(cache.minmax, np.asarray(grad_map, dtype=np.float64)) * cache.scale
        g_out = g[:, None, :, :].astype(self.net.dtype)
        param_grads, input_grads = backward(self.net, cache.activations, g_out)
        return param_grads, input_grads["m"][:, 0]


def psa(attention: AttentionMap, module: PolarizedSpatialAttention) -> AttentionMap:
    """PSA 적용 (출력 해상도 = 입력 해상도)"""
    out, _ = module.apply(attention)
    return out
