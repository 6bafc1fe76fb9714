# -*- coding: utf-8 -*-
"""
Optimal Transport Package
=========================

엔트로피 최적수송 구현.
비용 행렬, 로그 영역 Sinkhorn, 편향 제거 발산, Danskin 기울기, 정확해 오라클 포함.
"""

from .divergence import (
    DivergenceTerms,
    divergence_grad_x,
    divergence_terms,
    energy_mmd,
    sinkhorn_divergence,
    sinkhorn_divergence_with_grad,
)
from .measures import CostMatrix, DiscreteMeasure, cost_gradient, pairwise_cost
from .oracles import exact_ot_uniform
from .sinkhorn import (
    SinkhornConfig,
    SinkhornSolution,
    entropic_dual_objective,
    entropic_primal_objective,
    plan_from_potentials,
    sinkhorn_solve,
)

__all__ = [
    "DiscreteMeasure",
    "CostMatrix",
    "pairwise_cost",
    "cost_gradient",
    "SinkhornConfig",
    "SinkhornSolution",
    "sinkhorn_solve",
    "plan_from_potentials",
    "entropic_dual_objective",
    "entropic_primal_objective",
    "DivergenceTerms",
    "divergence_terms",
    "sinkhorn_divergence",
    "sinkhorn_divergence_with_grad",
    "divergence_grad_x",
    "energy_mmd",
    "exact_ot_uniform",
]
