# -*- coding: utf-8 -*-
"""
Optimizer Module
================

편향 보정 Adam 옵티마이저.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Tuple

import numpy as np

from ..errors import ShapeError, ValidationError


@dataclass
class AdamState:
    """Adam 모멘트 버퍼와 스텝 카운터"""

    lr: float
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps_hat: float = 1e-8

    def __post_init__(self) -> None:
        if not (self.lr > 0):
            raise ValidationError(f"learning rate must be > 0, got {self.lr}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValidationError("betas must lie in [0, 1)")

    @classmethod
    def for_params(cls, params: Mapping[str, np.ndarray], lr: float, **kwargs: Any) -> "AdamState":
        """파라미터 형상과 동일한 0 버퍼로 초기화"""
        return cls(
            lr=lr,
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
            **kwargs,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lr": self.lr,
            "t": self.t,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps_hat": self.eps_hat,
        }


def adam_step(
    params: Dict[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """Adam 한 스텝 (params, state 제자리 갱신 후 반환)"""
    for name, g in grads.items():
        if name not in params:
            raise ValidationError(f"gradient for unknown parameter '{name}'")
        if g.shape != params[name].shape:
            raise ShapeError(f"'{name}': gradient shape {g.shape} != parameter shape {params[name].shape}")

    state.t += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1**state.t
    correction2 = 1.0 - b2**state.t

    for name, g in grads.items():
        p = params[name]
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None or v is None:
            m = np.zeros_like(p)
            v = np.zeros_like(p)
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g * g
        state.m[name] = m.astype(p.dtype)
        state.v[name] = v.astype(p.dtype)

        m_hat = m / correction1
        v_hat = v / correction2
        p -= (state.lr * m_hat / (np.sqrt(v_hat) + state.eps_hat)).astype(p.dtype)

    return params, state
