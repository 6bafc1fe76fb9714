# -*- coding: utf-8 -*-
"""
Loss Types Module
=================

손실 가중치, SSIM 상수, 손실 값(값 + 기울기) 타입.
"""

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class LossWeights:
    """손실 가중치 λ (판별자: DA / 생성자: P, str, ADV, OT)"""

    lambda_DA: float = 0.1
    lambda_P: float = 100.0
    lambda_str: float = 1.0
    lambda_ADV: float = 1.0
    lambda_OT: float = 0.01

    def __post_init__(self) -> None:
        for key, value in asdict(self).items():
            if not math.isfinite(value) or value < 0:
                raise ConfigError(f"{key} must be finite and >= 0, got {value}", key=key)

    def with_changes(self, **changes: float) -> "LossWeights":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class SsimConfig:
    """SSIM 상수 (11×11 가우시안 창, σ=1.5, k1=0.01, k2=0.03, L=1)"""

    window_size: int = 11
    window_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0
    ssim_clamp_min: float = 1e-4

    def __post_init__(self) -> None:
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise ConfigError(f"window_size must be odd, got {self.window_size}", key="window_size")
        if not (self.window_sigma > 0):
            raise ConfigError("window_sigma must be > 0", key="window_sigma")
        if not (self.dynamic_range > 0):
            raise ConfigError("dynamic_range must be > 0", key="dynamic_range")
        if not (0 < self.ssim_clamp_min < 1):
            raise ConfigError("ssim_clamp_min must lie in (0, 1)", key="ssim_clamp_min")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2

    def window(self) -> np.ndarray:
        """정규화된 2-D 가우시안 창"""
        half = self.window_size // 2
        x = np.arange(-half, half + 1, dtype=np.float64)
        g = np.exp(-(x**2) / (2.0 * self.window_sigma**2))
        g /= g.sum()
        return np.outer(g, g)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class LossValue:
    """스칼라 손실과 예측 텐서에 대한 기울기"""

    value: float
    grad: np.ndarray

    @classmethod
    def zero(cls, like: np.ndarray) -> "LossValue":
        return cls(value=0.0, grad=np.zeros_like(like))

    def is_finite(self) -> bool:
        return math.isfinite(self.value) and bool(np.all(np.isfinite(self.grad)))

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "grad_norm": float(np.linalg.norm(self.grad))}


@dataclass
class AdversarialPair:
    """판별자 적대 손실의 실제/생성 항"""

    real: LossValue
    fake: LossValue

    @property
    def value(self) -> float:
        return self.real.value + self.fake.value


@dataclass
class LossBundle:
    """여러 입력에 대한 기울기를 갖는 합산 손실"""

    value: float
    grads: Dict[str, np.ndarray] = field(default_factory=dict)
    parts: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "parts": dict(self.parts)}
