# -*- coding: utf-8 -*-
"""
Adversarial Losses Module
=========================

로짓 기반 적대 손실 (수치 안정 softplus 형태) 및 도메인 적응 손실.
"""

from typing import Any

import numpy as np
from scipy.special import expit

from .base import AdversarialPair, LossValue
from .image import pixel_loss


def _logits(x: Any) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


def adv_g_loss(fake_logit: Any) -> LossValue:
    """비포화 생성자 손실 mean softplus(-logit) = -log σ(logit)"""
    logit = _logits(fake_logit)
    n = logit.shape[0] if logit.ndim else 1
    value = float(np.sum(np.logaddexp(0.0, -logit)) / n)
    grad = -expit(-logit) / n
    return LossValue(value=value, grad=grad)


def adv_d_loss(real_logits: Any, fake_logits: Any) -> AdversarialPair:
    """판별자 교차 엔트로피 -E log D(y) - E log(1 - D(ŷ))"""
    real = _logits(real_logits)
    fake = _logits(fake_logits)
    n = real.shape[0] if real.ndim else 1
    m = fake.shape[0] if fake.ndim else 1

    real_term = LossValue(
        value=float(np.sum(np.logaddexp(0.0, -real)) / n),
        grad=-expit(-real) / n,
    )
    fake_term = LossValue(
        value=float(np.sum(np.logaddexp(0.0, fake)) / m),
        grad=expit(fake) / m,
    )
    return AdversarialPair(real=real_term, fake=fake_term)


def critic_loss(real_logits: Any, fake_logits: Any) -> AdversarialPair:
    """WGAN 비평가 손실 E D(ŷ) - E D(y)"""
    real = _logits(real_logits)
    fake = _logits(fake_logits)
    n = real.shape[0] if real.ndim else 1
    m = fake.shape[0] if fake.ndim else 1
    return AdversarialPair(
        real=LossValue(value=-float(np.sum(real) / n), grad=np.full_like(real, -1.0 / n)),
        fake=LossValue(value=float(np.sum(fake) / m), grad=np.full_like(fake, 1.0 / m)),
    )


def critic_g_loss(fake_logits: Any) -> LossValue:
    """WGAN 생성자 손실 -E D(ŷ)"""
    fake = _logits(fake_logits)
    m = fake.shape[0] if fake.ndim else 1
    return LossValue(value=-float(np.sum(fake) / m), grad=np.full_like(fake, -1.0 / m))


def da_loss(sa_coarse: Any, sa_real: Any) -> LossValue:
    """도메인 적응 손실 E‖D_SA(x̃) - D_SA(y)‖², 실제 분기는 상수 취급"""
    coarse = np.asarray(getattr(sa_coarse, "values", sa_coarse))
    real = np.asarray(getattr(sa_real, "values", sa_real))
    return pixel_loss(coarse, real)
