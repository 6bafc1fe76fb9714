# -*- coding: utf-8 -*-
"""
Reproduction Acceptance Tests
=============================

데스크 규모 재현 기준. 모두 slow 마커 (기본 실행에서 제외).

    pytest -m slow tests/acceptance

MNIST 기준은 SINKDEM_MNIST_DIR 에 IDX 파일이 없으면 건너뛴다.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from src.sinkdem.config import settings
from src.sinkdem.errors import DataIOError
from src.sinkdem.experiments import load_config, load_denoise_data, run_ablation, run_baselines, run_eps_sweep
from src.sinkdem.ot import (
    DiscreteMeasure,
    SinkhornConfig,
    energy_mmd,
    exact_ot_uniform,
    pairwise_cost,
    sinkhorn_divergence,
    sinkhorn_solve,
)

pytestmark = pytest.mark.slow

CONFIGS_DIR = Path(__file__).parents[2] / "configs"


@pytest.fixture(scope="module")
def mnist_data():
    cfg = load_config(CONFIGS_DIR / "baselines.txt")
    try:
        return load_denoise_data(cfg)
    except DataIOError:
        pytest.skip(f"MNIST IDX files not found under {settings.mnist_dir}")


class TestOtCorrectness:
    """OT 솔버와 발산 성질"""

    def test_assignment_matches_enumeration(self):
        """무작위 25개 (n ≤ 6): primal_cost가 순열 열거 최적값의 2% 이내"""
        rng = np.random.default_rng(2024)
        started = time.perf_counter()
        for _ in range(25):
            n = int(rng.integers(2, 7))
            X, Y = rng.random((n, 2)), rng.random((n, 2))
            C = pairwise_cost(X, Y)
            cfg = SinkhornConfig(epsilon=1e-3 * C.median(), max_iters=5000, marginal_tol=1e-9)
            sol = sinkhorn_solve(DiscreteMeasure.uniform(X), DiscreteMeasure.uniform(Y), C, cfg)
            exact = exact_ot_uniform(C.values)
            assert abs(sol.primal_cost - exact) <= 0.02 * exact + 1e-12
        assert time.perf_counter() - started < 10.0

    def test_divergence_axioms(self):
        """S(α,α) ≈ 0, 대칭, 비음수 (무작위 50쌍)"""
        rng = np.random.default_rng(7)
        cfg = SinkhornConfig(epsilon=1.0, max_iters=5000, marginal_tol=1e-12)
        for _ in range(50):
            X = rng.standard_normal((int(rng.integers(2, 8)), 2))
            Y = rng.standard_normal((int(rng.integers(2, 8)), 2)) + 0.5
            assert abs(sinkhorn_divergence(X, X, None, None, cfg)) <= 1e-9
            s_xy = sinkhorn_divergence(X, Y, None, None, cfg)
            s_yx = sinkhorn_divergence(Y, X, None, None, cfg)
            assert abs(s_xy - s_yx) <= 1e-9
            assert s_xy >= -1e-9

    def test_mmd_limit(self):
        """ε = 1e6, p = 1.5: 에너지 거리 MMD와 상대 오차 ≤ 1e-3 (10쌍)"""
        rng = np.random.default_rng(11)
        cfg = SinkhornConfig(epsilon=1e6, max_iters=100, marginal_tol=1e-12, p=1.5)
        for _ in range(10):
            X = rng.standard_normal((6, 3))
            Y = rng.standard_normal((5, 3)) + 1.0
            mmd = energy_mmd(X, Y, None, None, p=1.5)
            assert abs(sinkhorn_divergence(X, Y, None, None, cfg) - mmd) <= 1e-3 * abs(mmd)


class TestDenoisingClaims:
    """MNIST 부분집합 수렴/기울기 비교"""

    def test_sinkhorn_converges_faster_than_gan(self, tmp_path, mnist_data):
        """도달 에포크 중앙값: sinkhorn_gan ≤ gan / 1.5"""
        cfg = load_config(CONFIGS_DIR / "baselines.txt", ["methods=sinkhorn_gan,gan"])
        comparison = run_baselines(cfg, tmp_path, mnist_data)
        assert comparison.median_epochs("sinkhorn_gan") <= comparison.median_epochs("gan") / 1.5

    def test_mid_epsilon_keeps_larger_gradients(self, tmp_path, mnist_data):
        """최적점 근방 은닉층 기울기 중앙값: ε=0.1 > ε=0.001, ε=10"""
        cfg = load_config(CONFIGS_DIR / "eps_sweep.txt")
        sweep = run_eps_sweep(cfg, tmp_path, mnist_data)
        mid = sweep.entry(0.1).median_near_optimum("g_hidden")
        assert mid > sweep.entry(0.001).median_near_optimum("g_hidden")
        assert mid > sweep.entry(10.0).median_near_optimum("g_hidden")


class TestToySuperResolution:
    """합성 지형 모듈 제거 추세"""

    def test_ablation_trend(self, tmp_path):
        """전체 모델이 prior 없는 구성보다 SSIM·RMSE 개선, Sinkhorn 항이 임계값 도달을 1.2배 이상 단축"""
        cfg = load_config(CONFIGS_DIR / "ablation.txt")
        ablation = run_ablation(cfg, tmp_path)
        assert ablation.median_metric("+sinkhorn", "ssim") > ablation.median_metric("baseline", "ssim")
        assert ablation.median_metric("+sinkhorn", "rmse") < ablation.median_metric("baseline", "rmse")
        assert ablation.median_epochs("+psa") >= 1.2 * ablation.median_epochs("+sinkhorn")
