# -*- coding: utf-8 -*-
"""
Adversarial Objectives Module
=============================

방법별 판별자/생성자 적대 항.
- gan, sinkhorn_gan: 교차 엔트로피 / 비포화 생성자 손실
- wgan: 비평가 손실 + 가중치 클리핑 [-c, c]
- wgan_gp: 비평가 손실 + 보간점 기울기 페널티 λ·E(‖∇D(x̂)‖ - 1)²

페널티의 파라미터 기울기는 ReLU MLP 비평가(fc1 → fc2 → out)에서 닫힌 형태로 계산한다.
ReLU 마스크는 거의 모든 곳에서 국소 상수이므로 편향의 기여는 0이다.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..diffnet import Network, backward, forward
from ..errors import ShapeError
from ..losses import AdversarialPair, LossValue, adv_d_loss, adv_g_loss, critic_g_loss, critic_loss

Grads = Dict[str, np.ndarray]

CRITIC_METHODS = ("wgan", "wgan_gp")

# MLP 판별자 노드 이름
MLP_LAYERS = ("fc1", "fc2", "out")


@dataclass
class PenaltyResult:
    """기울기 페널티 값과 비평가 파라미터 기울기"""

    value: float
    grads: Grads
    grad_norms: np.ndarray


def discriminator_pair(method: str, real_logits: np.ndarray, fake_logits: np.ndarray) -> AdversarialPair:
    if method in CRITIC_METHODS:
        return critic_loss(real_logits, fake_logits)
    return adv_d_loss(real_logits, fake_logits)


def generator_adversarial(method: str, fake_logits: np.ndarray) -> LossValue:
    if method in CRITIC_METHODS:
        return critic_g_loss(fake_logits)
    return adv_g_loss(fake_logits)


def clip_weights(net: Network, c: float) -> Network:
    """모든 파라미터를 [-c, c] 로 제자리 클리핑"""
    for p in net.params.values():
        np.clip(p, -c, c, out=p)
    return net


def interpolate(real: np.ndarray, fake: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """x̂ = e·y + (1-e)·ŷ, 샘플마다 e ~ U[0,1]"""
    if real.shape != fake.shape:
        raise ShapeError(f"real {real.shape} and fake {fake.shape} batches differ")
    e = rng.uniform(size=(real.shape[0],) + (1,) * (real.ndim - 1)).astype(real.dtype)
    return e * real + (1 - e) * fake


def gradient_penalty(net: Network, points: np.ndarray, lam: float) -> PenaltyResult:
    """λ·mean((‖∇_x D(x)‖ - 1)²) 와 파라미터 기울기 (ReLU MLP 비평가 전용)"""
    for name in MLP_LAYERS:
        if f"{name}.weight" not in net.params:
            raise ShapeError(f"gradient penalty needs an MLP critic with layer '{name}'")

    n = points.shape[0]
    acts = forward(net, {"x": points})
    _, inputs = backward(net, acts, np.ones_like(acts[net.output]))
    g = inputs["x"].reshape(n, -1).astype(np.float64)
    norms = np.linalg.norm(g, axis=1)
    value = float(lam * np.mean((norms - 1.0) ** 2))

    # ∂P/∂g_n = 2λ(‖g_n‖ - 1)/(N‖g_n‖) · g_n
    safe = np.where(norms > 0, norms, 1.0)
    coef = np.where(norms > 0, 2.0 * lam * (norms - 1.0) / (n * safe), 0.0)
    c = coef[:, None] * g

    W1 = net.params["fc1.weight"].astype(np.float64)
    W2 = net.params["fc2.weight"].astype(np.float64)
    w3 = net.params["out.weight"].astype(np.float64)
    m1 = (acts["fc1"] > 0).astype(np.float64)
    m2 = (acts["fc2"] > 0).astype(np.float64)

    # ∇_x D = W1ᵀ (m1 ⊙ W2ᵀ (m2 ⊙ w3))
    u = m2 * w3[0]
    v = m1 * (u @ W2)
    dv = m1 * (c @ W1.T)
    du = dv @ W2.T

    grads = net.zeros_like_params()
    grads["fc1.weight"] += (v.T @ c).astype(net.dtype)
    grads["fc2.weight"] += (u.T @ dv).astype(net.dtype)
    grads["out.weight"] += np.sum(m2 * du, axis=0, keepdims=True).astype(net.dtype)
    return PenaltyResult(value=value, grads=grads, grad_norms=norms)


def penalty_terms(net: Network, real: np.ndarray, fake: np.ndarray, lam: float, rng: np.random.Generator) -> Tuple[float, Grads]:
    result = gradient_penalty(net, interpolate(real, fake, rng), lam)
    return result.value, result.grads
