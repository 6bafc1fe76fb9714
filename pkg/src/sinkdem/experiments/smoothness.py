# -*- coding: utf-8 -*-
"""
Smoothness Probe Module
=======================

선형 생성자 x ↦ θx 에 대한 Sinkhorn 손실 기울기의 경험적 립시츠 상수.

    Γ̂_ε = max_{(θ₁, θ₂)} ‖∇S(θ₁) - ∇S(θ₂)‖_F / ‖θ₁ - θ₂‖_F

θ는 스펙트럴 노름이 lipschitz_scale 이하가 되도록 뽑는다.
theory_log10 열은 log10(1 / (ε·exp(κ̂/ε))) (κ̂ = 2·max C), 정성 비교용.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ..ot import SinkhornConfig, pairwise_cost, sinkhorn_divergence_with_grad
from .config import ExperimentConfig, write_echo
from .runner import run_dir, write_table

logger = logging.getLogger(__name__)

SMOOTHNESS_COLUMNS = ("epsilon", "seed", "lipschitz_scale", "gamma_hat", "gamma_hat_2x", "kappa_hat", "theory_log10")


@dataclass
class ProbeData:
    """고정 입력 X (n,d) 와 목표 Y (n,d)"""

    X: np.ndarray
    Y: np.ndarray

    @classmethod
    def generate(cls, seed: int, points: int, dim: int) -> "ProbeData":
        rng = np.random.default_rng((seed, 7))
        return cls(X=rng.standard_normal((points, dim)), Y=rng.standard_normal((points, dim)))


def loss_and_theta_grad(theta: np.ndarray, data: ProbeData, cfg: SinkhornConfig) -> Tuple[float, np.ndarray]:
    """S(θX, Y) 와 ∂S/∂θ = (∂S/∂Z)ᵀ X"""
    Z = data.X @ theta.T
    value, grad_z = sinkhorn_divergence_with_grad(Z, data.Y, None, None, cfg)
    return value, grad_z.T @ data.X


def sample_theta_pairs(seed: int, pairs: int, dim: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """스펙트럴 노름 ≤ 1 인 (θ₁, θ₂) 쌍"""
    rng = np.random.default_rng((seed, 11))
    out = []
    for _ in range(pairs):
        thetas = []
        for _ in range(2):
            A = rng.standard_normal((dim, dim))
            A /= max(np.linalg.norm(A, 2), 1e-12)
            thetas.append(A * rng.uniform(0.0, 1.0))
        out.append((thetas[0], thetas[1]))
    return out


def gamma_hat(
    data: ProbeData, pairs: List[Tuple[np.ndarray, np.ndarray]], scale: float, cfg: SinkhornConfig
) -> Tuple[float, float]:
    """(Γ̂, κ̂) - 모든 쌍의 기울기 차이 비율 최댓값과 관측된 최대 비용의 두 배"""
    best = 0.0
    kappa = 0.0
    for t1, t2 in pairs:
        a, b = scale * t1, scale * t2
        _, g1 = loss_and_theta_grad(a, data, cfg)
        _, g2 = loss_and_theta_grad(b, data, cfg)
        denom = np.linalg.norm(a - b)
        if denom > 0:
            best = max(best, float(np.linalg.norm(g1 - g2) / denom))
        for theta in (a, b):
            kappa = max(kappa, 2.0 * float(pairwise_cost(data.X @ theta.T, data.Y, cfg.p).values.max()))
    return best, kappa


def theory_log10(epsilon: float, kappa: float) -> float:
    """log10(1 / (ε·exp(κ/ε))), 지수 넘침 없이 로그 영역에서 계산"""
    return -math.log10(epsilon) - kappa / (epsilon * math.log(10.0))


@dataclass
class SmoothnessResult:
    """ε × seed 별 Γ̂ 표"""

    rows: List[Dict[str, Any]] = field(default_factory=list)
    out_dir: Optional[Path] = None

    def gamma(self, epsilon: float, seed: int, column: str = "gamma_hat") -> float:
        for row in self.rows:
            if row["epsilon"] == epsilon and row["seed"] == seed:
                return float(row[column])
        raise KeyError((epsilon, seed))


def smoothness_probe(cfg: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> SmoothnessResult:
    """epsilon_list × seeds 에 대해 Γ̂ (배율 1배, 2배) 계산, smoothness.csv 기록"""
    result = SmoothnessResult()
    for eps in cfg.epsilon_list:
        sink = SinkhornConfig(epsilon=eps, max_iters=cfg.probe_iters, marginal_tol=1e-9, p=cfg.cost_p)
        for seed in cfg.seeds:
            data = ProbeData.generate(seed, cfg.probe_points, cfg.probe_dim)
            pairs = sample_theta_pairs(seed, cfg.probe_pairs, cfg.probe_dim)
            gamma, kappa = gamma_hat(data, pairs, cfg.lipschitz_scale, sink)
            gamma_2x, _ = gamma_hat(data, pairs, 2.0 * cfg.lipschitz_scale, sink)
            result.rows.append({
                "epsilon": eps,
                "seed": seed,
                "lipschitz_scale": cfg.lipschitz_scale,
                "gamma_hat": gamma,
                "gamma_hat_2x": gamma_2x,
                "kappa_hat": kappa,
                "theory_log10": theory_log10(eps, kappa),
            })
            logger.info("smoothness eps=%g seed=%d gamma_hat=%.6g gamma_hat_2x=%.6g", eps, seed, gamma, gamma_2x)

    out_dir = run_dir(cfg, out)
    write_echo(cfg, out_dir)
    write_table(result.rows, SMOOTHNESS_COLUMNS, out_dir / "smoothness.csv")
    result.out_dir = out_dir
    return result
