# -*- coding: utf-8 -*-
"""
Exact OT Oracle Module
======================

소규모 균등 주변분포 문제의 정확한 OT 값 (순열 전수 열거).
ε → 0 극한 검증용 오라클.
"""

from itertools import permutations
from typing import Any

import numpy as np

from ..errors import ShapeError, ValidationError
from .measures import CostMatrix

# n! 폭증 방지 상한
MAX_ENUMERATION_SIZE = 8


def exact_ot_uniform(C: Any) -> float:
    """min_σ (1/n) Σ_i C[i][σ(i)]"""
    values = C.values if isinstance(C, CostMatrix) else np.asarray(C, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ShapeError(f"exact_ot_uniform needs a square cost matrix, got {values.shape}")
    n = values.shape[0]
    if n > MAX_ENUMERATION_SIZE:
        raise ValidationError(
            f"refusing permutation enumeration for n={n} (limit {MAX_ENUMERATION_SIZE})"
        )

    rows = np.arange(n)
    best = np.inf
    for perm in permutations(range(n)):
        total = values[rows, perm].sum()
        if total < best:
            best = total
    return float(best / n)
