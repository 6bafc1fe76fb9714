# -*- coding: utf-8 -*-
"""
Gradient Probes Module
======================

기울기 진단 도구.
- spectral_norm: 거듭제곱 반복으로 최대 특이값 추정
- grad_check: 역전파 기울기를 중심 차분과 비교
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from ..errors import ValidationError
from .network import Activations, Network, backward, forward

logger = logging.getLogger(__name__)

# 스칼라 손실: 활성값 → (값, 출력 기울기 또는 {노드: 기울기})
ScalarLoss = Callable[[Activations], Tuple[float, Union[np.ndarray, Dict[str, np.ndarray]]]]


def matrixize(grad: np.ndarray) -> np.ndarray:
    """합성곱 커널 기울기를 (out) × (in·k·k) 행렬로 변환"""
    grad = np.asarray(grad)
    if grad.ndim == 1:
        return grad[None, :]
    return grad.reshape(grad.shape[0], -1)


def spectral_norm(matrix: Any, iters: int = 20, seed: int = 0) -> float:
    """AᵀA 거듭제곱 반복으로 ‖A‖₂ 추정 (시작 벡터는 seed 고정)"""
    if int(iters) < 1:
        raise ValidationError(f"iters must be >= 1, got {iters}")
    A = matrixize(np.asarray(matrix, dtype=np.float64))
    if not np.any(A):
        return 0.0

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    for _ in range(int(iters)):
        w = A.T @ (A @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
    return float(np.linalg.norm(A @ v))


@dataclass
class GradCheckReport:
    """기울기 검증 결과"""

    tol: float
    checked: int
    max_rel_error: float
    worst: Optional[Tuple[str, int]]
    offending: List[Tuple[str, int, float, float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tol": self.tol,
            "checked": self.checked,
            "max_rel_error": self.max_rel_error,
            "worst": list(self.worst) if self.worst else None,
            "passed": self.passed,
            "offending": [
                {"param": p, "index": i, "analytic": a, "numeric": n, "rel_error": r}
                for p, i, a, n, r in self.offending
            ],
        }


def _loss_value(net: Network, inputs: Mapping[str, Any], scalar_loss: ScalarLoss) -> float:
    value, _ = scalar_loss(forward(net, inputs))
    return float(value)


def grad_check(
    net: Network,
    inputs: Mapping[str, Any],
    scalar_loss: ScalarLoss,
    tol: float,
    *,
    n_samples: int = 200,
    seed: int = 0,
    h: float = 1e-6,
    floor: Optional[float] = None,
    analytic: Optional[Mapping[str, np.ndarray]] = None,
) -> GradCheckReport:
    """역전파 기울기 vs 중심 차분

    수치 기울기는 네트워크의 float64 복제본에서 계산하고,
    해석 기울기는 네트워크 자신의 dtype으로 계산한다.
    analytic을 주면 그것을 검증 대상으로 사용한다 (결함 주입 테스트용).
    """
    if analytic is None:
        acts = forward(net, inputs)
        _, loss_grad = scalar_loss(acts)
        analytic, _ = backward(net, acts, loss_grad)

    if floor is None:
        floor = 1e-8 if net.dtype == np.float64 else 1e-4

    clone = net.astype(np.float64)
    inputs64 = {k: np.asarray(v, dtype=np.float64) for k, v in inputs.items()}

    names = sorted(clone.params)
    sizes = np.array([clone.params[n].size for n in names])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])

    if total <= n_samples:
        flat = np.arange(total)
    else:
        rng = np.random.default_rng(seed)
        flat = np.sort(rng.choice(total, size=n_samples, replace=False))

    max_rel = 0.0
    worst: Optional[Tuple[str, int]] = None
    offending: List[Tuple[str, int, float, float, float]] = []

    for k in flat:
        slot = int(np.searchsorted(offsets, k, side="right") - 1)
        name = names[slot]
        idx = int(k - offsets[slot])
        param = clone.params[name].reshape(-1)

        original = param[idx]
        param[idx] = original + h
        plus = _loss_value(clone, inputs64, scalar_loss)
        param[idx] = original - h
        minus = _loss_value(clone, inputs64, scalar_loss)
        param[idx] = original

        numeric = (plus - minus) / (2.0 * h)
        exact = float(np.asarray(analytic[name]).reshape(-1)[idx])
        rel = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)

        if rel > tol:
            offending.append((name, idx, exact, numeric, rel))
        if worst is None or rel > max_rel:
            max_rel = rel
            worst = (name, idx)

    if offending:
        logger.warning("grad_check failed: max_rel_error=%.3e offending=%d", max_rel, len(offending))

    return GradCheckReport(
        tol=tol,
        checked=int(flat.size),
        max_rel_error=max_rel,
        worst=worst,
        offending=offending,
    )
