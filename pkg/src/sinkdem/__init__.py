# -*- coding: utf-8 -*-
"""
sinkdem Core Package
====================

엔트로피 최적수송(Sinkhorn) + Sinkhorn 정규화 적대적 학습 라이브러리.
DEM 초해상도(SIRAN) 및 MNIST 디노이징 실험 하네스 포함.
"""

__version__ = "0.1.0"
__author__ = "Jungwook"

from .config import settings

__all__ = ["settings", "__version__"]
