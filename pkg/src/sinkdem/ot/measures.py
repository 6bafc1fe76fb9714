# -*- coding: utf-8 -*-
"""
Measures Module
===============

이산 측도(DiscreteMeasure), 비용 행렬(CostMatrix) 및 L_p 거리 비용.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ShapeError, ValidationError

# 가중치 합 허용 오차
WEIGHT_SUM_TOL = 1e-12


def _as_points(points: Any, name: str) -> np.ndarray:
    """점 집합을 float64 n×d 행렬로 변환"""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ShapeError(f"{name}: expected an n×d matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValidationError(f"{name}: at least one point is required")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: non-finite coordinates")
    return arr


def _check_exponent(p: float) -> float:
    if not (1.0 <= p <= 2.0):
        raise ValidationError(f"cost exponent p must lie in [1, 2], got {p}")
    return float(p)


@dataclass(frozen=True)
class DiscreteMeasure:
    """가중 점 구름 (μ_θ, ν)"""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        points = _as_points(self.points, "points")
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if weights.shape[0] != points.shape[0]:
            raise ShapeError(
                f"weights length {weights.shape[0]} != number of points {points.shape[0]}"
            )
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValidationError("weights must be finite and non-negative")
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights must sum to 1, got {weights.sum():.15g}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @classmethod
    def uniform(cls, points: Any) -> "DiscreteMeasure":
        """균등 가중치 경험 측도 생성"""
        pts = _as_points(points, "points")
        n = pts.shape[0]
        return cls(points=pts, weights=np.full(n, 1.0 / n))

    @classmethod
    def from_weights(cls, points: Any, weights: Optional[Any] = None) -> "DiscreteMeasure":
        """가중치 생략 시 균등 측도"""
        if weights is None:
            return cls.uniform(points)
        return cls(points=np.asarray(points), weights=np.asarray(weights))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
        }


@dataclass(frozen=True)
class CostMatrix:
    """단위 질량 수송 비용 C (L_p 거리)"""

    values: np.ndarray
    p: float = 2.0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ShapeError(f"cost matrix must be 2-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("cost matrix contains non-finite entries")
        if np.any(values < 0):
            raise ValidationError("cost matrix must be non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "p", float(self.p))

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.values.shape[0]), int(self.values.shape[1]))

    def median(self) -> float:
        return float(np.median(self.values))


def pairwise_cost(X: Any, Y: Any, p: float = 2.0) -> CostMatrix:
    """L_p 거리 비용 행렬 C[i][j] = ||x_i - y_j||_p"""
    p = _check_exponent(p)
    x = _as_points(X, "X")
    y = _as_points(Y, "Y")
    if x.shape[1] != y.shape[1]:
        raise ShapeError(f"dimension mismatch: X has d={x.shape[1]}, Y has d={y.shape[1]}")

    if p == 2.0:
        values = cdist(x, y, metric="euclidean")
    elif p == 1.0:
        values = cdist(x, y, metric="cityblock")
    else:
        values = cdist(x, y, metric="minkowski", p=p)
    return CostMatrix(values=values, p=p)


def cost_gradient(X: Any, Y: Any, p: float = 2.0) -> np.ndarray:
    """∂C(x_i, y_j)/∂x_i 를 n×m×d 텐서로 반환

    일치점(C=0)에서는 p<2 포함 모든 p에 대해 부분기울기 0을 사용한다.
    """
    p = _check_exponent(p)
    x = _as_points(X, "X")
    y = _as_points(Y, "Y")
    if x.shape[1] != y.shape[1]:
        raise ShapeError(f"dimension mismatch: X has d={x.shape[1]}, Y has d={y.shape[1]}")

    diff = x[:, None, :] - y[None, :, :]
    dist = pairwise_cost(x, y, p).values
    coincident = dist == 0.0
    safe = np.where(coincident, 1.0, dist)

    if p == 2.0:
        grad = diff / safe[:, :, None]
    elif p == 1.0:
        grad = np.sign(diff)
    else:
        grad = np.sign(diff) * np.abs(diff) ** (p - 1.0) / safe[:, :, None] ** (p - 1.0)

    grad[coincident] = 0.0
    return grad
