# -*- coding: utf-8 -*-
"""
OT Solve Command
================

sinkdem ot-solve --cost C.csv --eps 0.1 --iters 1000

균등 주변분포로 Sinkhorn을 풀고 진단값을 유효숫자 12자리로 출력한다.
"""

import argparse
from pathlib import Path

import numpy as np

from src.sinkdem.errors import DataIOError, FormatError
from src.sinkdem.ot import CostMatrix, DiscreteMeasure, SinkhornConfig, exact_ot_uniform, sinkhorn_solve
from src.sinkdem.ot.oracles import MAX_ENUMERATION_SIZE

from .common import EXIT_OK


def load_cost_csv(path: Path) -> CostMatrix:
    """쉼표 구분 비용 행렬"""
    try:
        values = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    except ValueError as exc:
        raise FormatError(f"{path}: malformed cost matrix: {exc}") from exc
    return CostMatrix(values)


def handle(args: argparse.Namespace) -> int:
    C = load_cost_csv(Path(args.cost))
    n, m = C.shape
    cfg = SinkhornConfig(epsilon=args.eps, max_iters=args.iters)
    mu = DiscreteMeasure.uniform(np.zeros((n, 1)))
    nu = DiscreteMeasure.uniform(np.zeros((m, 1)))
    sol = sinkhorn_solve(mu, nu, C, cfg)

    print(f"dual_value={sol.dual_value:.12g}")
    print(f"primal_cost={sol.primal_cost:.12g}")
    print(f"iterations_used={sol.iterations_used}")
    print(f"marginal_violation={sol.marginal_violation:.12g}")
    if n == m and n <= MAX_ENUMERATION_SIZE:
        print(f"exact_ot={exact_ot_uniform(C.values):.12g}")
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("ot-solve", help="비용 행렬 CSV에 대한 엔트로피 OT 풀이")
    parser.add_argument("--cost", metavar="PATH", required=True, help="쉼표 구분 비용 행렬")
    parser.add_argument("--eps", type=float, default=0.1, help="엔트로피 정규화 ε")
    parser.add_argument("--iters", type=int, default=1000, help="최대 Sinkhorn 반복")
    parser.set_defaults(handler=handle)
