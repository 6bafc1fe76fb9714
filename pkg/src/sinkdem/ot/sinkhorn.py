# -*- coding: utf-8 -*-
"""
Sinkhorn Solver Module
======================

로그 영역(log-domain) Sinkhorn 솔버.
softmin 갱신 f ← -ε log Σ ν exp((g - C)/ε), g ← -ε log Σ μ exp((f - C)/ε).
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
from scipy.special import logsumexp, xlogy

from ..errors import ConfigError, NumericalFailureError, ShapeError
from .measures import CostMatrix, DiscreteMeasure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SinkhornConfig:
    """Sinkhorn 설정 (ε, 반복 횟수 T, 조기 종료 임계값)"""

    epsilon: float = 0.1
    max_iters: int = 10
    marginal_tol: float = 1e-6
    p: float = 2.0

    def __post_init__(self) -> None:
        if not (self.epsilon > 0) or not np.isfinite(self.epsilon):
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}", key="epsilon")
        if int(self.max_iters) < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}", key="max_iters")
        if not (self.marginal_tol >= 0):
            raise ConfigError(
                f"marginal_tol must be >= 0, got {self.marginal_tol}", key="marginal_tol"
            )
        if not (1.0 <= self.p <= 2.0):
            raise ConfigError(f"cost exponent p must lie in [1, 2], got {self.p}", key="p")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "max_iters": self.max_iters,
            "marginal_tol": self.marginal_tol,
            "p": self.p,
        }


@dataclass
class SinkhornSolution:
    """Sinkhorn 해 (쌍대 퍼텐셜 φ/ψ, 수송 계획 π, 진단값)"""

    f: np.ndarray
    g: np.ndarray
    plan: np.ndarray
    dual_value: float
    primal_cost: float
    iterations_used: int
    marginal_violation: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dual_value": self.dual_value,
            "primal_cost": self.primal_cost,
            "iterations_used": self.iterations_used,
            "marginal_violation": self.marginal_violation,
        }


def plan_from_potentials(
    f: np.ndarray,
    g: np.ndarray,
    mu: np.ndarray,
    nu: np.ndarray,
    C: np.ndarray,
    epsilon: float,
) -> np.ndarray:
    """최적 결합 복원 π_ij = μ_i ν_j exp((f_i + g_j - C_ij)/ε)"""
    with np.errstate(divide="ignore"):
        log_plan = (
            np.log(mu)[:, None] + np.log(nu)[None, :] + (f[:, None] + g[None, :] - C) / epsilon
        )
    return np.exp(log_plan)


def entropic_dual_objective(
    f: np.ndarray,
    g: np.ndarray,
    mu: np.ndarray,
    nu: np.ndarray,
    C: np.ndarray,
    epsilon: float,
) -> float:
    """정규화 쌍대 목적함수 Σμf + Σνg - ε Σ π + ε"""
    plan = plan_from_potentials(f, g, mu, nu, C, epsilon)
    return float(mu @ f + nu @ g - epsilon * plan.sum() + epsilon)


def entropic_primal_objective(
    plan: np.ndarray,
    mu: np.ndarray,
    nu: np.ndarray,
    C: np.ndarray,
    epsilon: float,
) -> float:
    """원문제 목적함수 <π, C> + ε KL(π || μ⊗ν)"""
    ref = np.outer(mu, nu)
    with np.errstate(divide="ignore", invalid="ignore"):
        kl = xlogy(plan, plan) - xlogy(plan, ref)
    kl = np.where(plan > 0, kl, 0.0)
    return float(np.sum(plan * C) + epsilon * (np.sum(kl) - plan.sum() + 1.0))


def _marginal_violation(plan: np.ndarray, mu: np.ndarray, nu: np.ndarray) -> float:
    row = np.max(np.abs(plan.sum(axis=1) - mu))
    col = np.max(np.abs(plan.sum(axis=0) - nu))
    return float(max(row, col))


def sinkhorn_solve(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    C: CostMatrix,
    cfg: SinkhornConfig,
) -> SinkhornSolution:
    """로그 영역 Sinkhorn 교대 갱신

    max-shift log-sum-exp(scipy.special.logsumexp)로 모든 지수합을 계산하므로
    ε ≥ 1e-6 에서도 overflow가 발생하지 않는다.
    """
    n, m = C.shape
    if (n, m) != (mu.size, nu.size):
        raise ShapeError(f"cost shape {(n, m)} does not match measures ({mu.size}, {nu.size})")

    eps = float(cfg.epsilon)
    a = mu.weights
    b = nu.weights
    cost = C.values

    f = np.zeros(n)
    g = np.zeros(m)
    plan = plan_from_potentials(f, g, a, b, cost, eps)
    violation = _marginal_violation(plan, a, b)
    iterations = 0

    for it in range(1, int(cfg.max_iters) + 1):
        # softmin 갱신 (ν 가중)
        f = -eps * logsumexp((g[None, :] - cost) / eps, axis=1, b=b[None, :])
        if not np.all(np.isfinite(f)):
            raise NumericalFailureError(f"non-finite potential f at iteration {it}", iteration=it)

        # softmin 갱신 (μ 가중)
        g = -eps * logsumexp((f[:, None] - cost) / eps, axis=0, b=a[:, None])
        if not np.all(np.isfinite(g)):
            raise NumericalFailureError(f"non-finite potential g at iteration {it}", iteration=it)

        iterations = it
        plan = plan_from_potentials(f, g, a, b, cost, eps)
        if not np.all(np.isfinite(plan)):
            raise NumericalFailureError(f"non-finite plan at iteration {it}", iteration=it)

        violation = _marginal_violation(plan, a, b)
        if violation <= cfg.marginal_tol:
            break

    dual_value = float(a @ f + b @ g)
    primal_cost = float(np.sum(plan * cost))

    logger.debug(
        "sinkhorn n=%d m=%d eps=%.3g iters=%d violation=%.3e dual=%.12g",
        n, m, eps, iterations, violation, dual_value,
    )

    return SinkhornSolution(
        f=f,
        g=g,
        plan=plan,
        dual_value=dual_value,
        primal_cost=primal_cost,
        iterations_used=iterations,
        marginal_violation=violation,
    )
