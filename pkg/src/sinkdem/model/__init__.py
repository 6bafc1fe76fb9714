# -*- coding: utf-8 -*-
"""
SIRAN Model Package
===================

RCB/DMRB 블록, 생성자/판별자, 판별자 공간 어텐션(D_SA), 단순화 PSA,
조건부 순전파 ŷ = G(x̃, z ⊙ A_s) 와 학습 스텝.
"""

from .attention import (
    AttentionMap,
    PolarizedSpatialAttention,
    d_spatial_attention,
    minmax_normalize,
    minmax_vjp,
    psa,
    spatial_attention_forward,
    spatial_attention_vjp,
)
from .blocks import add_dmrb, add_rcb
from .config import MANIFEST_NAME, SiranConfig, read_manifest, write_manifest
from .siran import (
    AttentionTrace,
    DiscriminatorModel,
    GeneratorModel,
    build_discriminator,
    build_generator,
    build_siran,
    discriminator_attention,
    generator_forward,
    generator_inputs,
    load_models,
    save_models,
)
from .trainer import SiranOptimizers, TrainOptions, discriminator_update, train_step

__all__ = [
    "SiranConfig",
    "MANIFEST_NAME",
    "write_manifest",
    "read_manifest",
    "add_rcb",
    "add_dmrb",
    "AttentionMap",
    "PolarizedSpatialAttention",
    "d_spatial_attention",
    "spatial_attention_forward",
    "spatial_attention_vjp",
    "minmax_normalize",
    "minmax_vjp",
    "psa",
    "GeneratorModel",
    "DiscriminatorModel",
    "AttentionTrace",
    "build_generator",
    "build_discriminator",
    "build_siran",
    "generator_inputs",
    "generator_forward",
    "discriminator_attention",
    "save_models",
    "load_models",
    "TrainOptions",
    "SiranOptimizers",
    "discriminator_update",
    "train_step",
]
