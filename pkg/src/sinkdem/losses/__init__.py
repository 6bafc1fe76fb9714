# -*- coding: utf-8 -*-
"""
Losses Package
==============

학습 목적함수 모음 (해석 기울기 포함).
픽셀, SSIM, 적대(양측), 도메인 적응, 배치 Sinkhorn, 가중 총합.
"""

from .adversarial import adv_d_loss, adv_g_loss, critic_g_loss, critic_loss, da_loss
from .base import AdversarialPair, LossBundle, LossValue, LossWeights, SsimConfig
from .image import mean_ssim, pixel_loss, ssim_loss, ssim_map
from .totals import GENERATOR_TERMS, discriminator_total, generator_total
from .transport import OtMode, sinkhorn_batch_loss

__all__ = [
    "LossWeights",
    "SsimConfig",
    "LossValue",
    "LossBundle",
    "AdversarialPair",
    "pixel_loss",
    "ssim_loss",
    "ssim_map",
    "mean_ssim",
    "adv_g_loss",
    "adv_d_loss",
    "critic_loss",
    "critic_g_loss",
    "da_loss",
    "OtMode",
    "sinkhorn_batch_loss",
    "GENERATOR_TERMS",
    "generator_total",
    "discriminator_total",
]
