# -*- coding: utf-8 -*-
"""
Total Losses Module
===================

생성자 총 손실 λ_P L_P + λ_str L_str + λ_ADV L_ADV + λ_OT L_OT,
판별자 총 손실 adversarial + λ_DA L_DA.
"""

from typing import Dict, Mapping, Optional

import numpy as np

from ..errors import ValidationError
from .base import AdversarialPair, LossBundle, LossValue, LossWeights

# 손실 항 이름 → 가중치 필드
GENERATOR_TERMS: Dict[str, str] = {
    "L_P": "lambda_P",
    "L_str": "lambda_str",
    "L_ADV": "lambda_ADV",
    "L_OT": "lambda_OT",
}


def generator_total(parts: Mapping[str, Optional[LossValue]], w: LossWeights) -> LossValue:
    """가중 합 (값과 기울기 모두). 가중치 0 또는 None인 항은 건너뛴다."""
    unknown = set(parts) - set(GENERATOR_TERMS)
    if unknown:
        raise ValidationError(f"unknown generator loss terms {sorted(unknown)}")

    value = 0.0
    grad: Optional[np.ndarray] = None
    for term, attr in GENERATOR_TERMS.items():
        part = parts.get(term)
        weight = getattr(w, attr)
        if part is None or weight == 0.0:
            continue
        value += weight * part.value
        contrib = weight * part.grad
        grad = contrib if grad is None else grad + contrib

    if grad is None:
        like = next((p.grad for p in parts.values() if p is not None), np.zeros(()))
        grad = np.zeros_like(like)
    return LossValue(value=float(value), grad=grad)


def discriminator_total(adv_pair: AdversarialPair, da: Optional[LossValue], lambda_DA: float) -> LossBundle:
    """판별자 목적함수: 실제/생성 로짓 기울기와 D_SA(x̃) 기울기"""
    grads = {"real": adv_pair.real.grad, "fake": adv_pair.fake.grad}
    parts = {"adv": adv_pair.value, "L_DA": 0.0}
    value = adv_pair.value
    if da is not None:
        parts["L_DA"] = da.value
        value += lambda_DA * da.value
        grads["da"] = lambda_DA * da.grad
    return LossBundle(value=float(value), grads=grads, parts=parts)
