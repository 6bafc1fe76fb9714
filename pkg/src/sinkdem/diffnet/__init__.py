# -*- coding: utf-8 -*-
"""
Diffnet Package
===============

numpy 기반 최소 역전파 엔진.
합성곱/완전연결/활성화/원소 연산, Adam, 기울기 검증, 스펙트럴 노름 프로브, SDNC 체크포인트.
"""

from . import ops as layers
from .checkpoint import decode_checkpoint, encode_checkpoint, load_checkpoint, load_into, save_checkpoint
from .network import Network, Node, backward, forward
from .ops import LayerKind, LayerSpec, bilinear_matrix, resize_bilinear, resize_bilinear_adjoint
from .optim import AdamState, adam_step
from .probes import GradCheckReport, grad_check, matrixize, spectral_norm

__all__ = [
    "layers",
    "LayerKind",
    "LayerSpec",
    "Network",
    "Node",
    "forward",
    "backward",
    "AdamState",
    "adam_step",
    "spectral_norm",
    "matrixize",
    "grad_check",
    "GradCheckReport",
    "bilinear_matrix",
    "resize_bilinear",
    "resize_bilinear_adjoint",
    "encode_checkpoint",
    "decode_checkpoint",
    "save_checkpoint",
    "load_checkpoint",
    "load_into",
]
