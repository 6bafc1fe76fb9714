# -*- coding: utf-8 -*-
"""
Experiments Unit Tests
======================
"""

import math
from pathlib import Path

import numpy as np
import pytest

from src.sinkdem.data import MetricsRecord
from src.sinkdem.diffnet import Network
from src.sinkdem.errors import ConfigError, DataIOError
from src.sinkdem.experiments import (
    ExperimentConfig,
    RunResult,
    build_config,
    build_mlp_discriminator,
    clip_weights,
    gradient_penalty,
    interpolate,
    load_config,
    mean_record,
    near_optimum_window,
    parse_config_text,
    parse_override,
    smoothness_probe,
    theory_log10,
    write_echo,
    write_table,
)
from src.sinkdem.experiments.runner import map_runs, median

CONFIGS_DIR = Path(__file__).parents[2] / "configs"


class TestConfigParsing:
    """key=value 설정 파싱 테스트"""

    def test_comments_and_blank_lines(self):
        """주석과 빈 줄 무시"""
        raw = parse_config_text("# header\n\nepsilon = 0.5  # trailing\nseeds=1,2\n")
        assert raw == {"epsilon": "0.5", "seeds": "1,2"}
        cfg = build_config(raw)
        assert cfg.epsilon == 0.5
        assert cfg.seeds == [1, 2]

    def test_unknown_key(self):
        """알 수 없는 키 → ConfigError (키 포함)"""
        with pytest.raises(ConfigError) as exc:
            parse_config_text("epsilonn=0.1\n")
        assert exc.value.key == "epsilonn"

    def test_duplicate_key(self):
        """중복 키"""
        with pytest.raises(ConfigError):
            parse_config_text("seed=1\nseed=2\n")

    def test_missing_separator(self):
        """'=' 없는 줄"""
        with pytest.raises(ConfigError):
            parse_config_text("seed 1\n")

    def test_invalid_value(self):
        """범위 밖 값"""
        with pytest.raises(ConfigError) as exc:
            build_config({"max_epochs": "0"})
        assert exc.value.key == "max_epochs"

    def test_override_applied_last(self):
        """--set 재정의가 파일 값을 덮어씀"""
        cfg = build_config({"epsilon": "0.1"}, ["epsilon=2.5"])
        assert cfg.epsilon == 2.5

    def test_override_unknown_key(self):
        """알 수 없는 재정의 키"""
        with pytest.raises(ConfigError):
            parse_override("nope=1")

    def test_override_needs_equals(self):
        """KEY=VALUE 형식"""
        with pytest.raises(ConfigError):
            parse_override("seed")

    def test_none_for_optional(self):
        """선택 필드 none"""
        assert build_config({"subset_size": "none"}).subset_size is None

    def test_missing_file(self, tmp_path):
        """없는 설정 파일"""
        with pytest.raises(DataIOError):
            load_config(tmp_path / "missing.txt")

    def test_shipped_configs_parse(self):
        """configs/ 의 모든 파일이 유효"""
        paths = sorted(CONFIGS_DIR.glob("*.txt"))
        assert paths
        for path in paths:
            assert isinstance(load_config(path), ExperimentConfig)


class TestConfigValidation:
    """설정 일관성 검사 테스트"""

    def test_lr_default_per_experiment(self):
        """학습률 기본값: 디노이징 1e-3, SIRAN 1e-4"""
        assert build_config({}).lr == pytest.approx(1e-3)
        assert build_config({"experiment": "sr_toy"}).lr == pytest.approx(1e-4)
        assert build_config({"experiment": "sr_toy", "lr": "0.01"}).lr == pytest.approx(0.01)

    def test_patch_size_power_of_two_plus_one(self):
        """patch_size = 2^k+1"""
        with pytest.raises(ConfigError):
            build_config({"patch_size": "32"})

    def test_degrade_factor_divides(self):
        """degrade_factor | patch_size-1"""
        with pytest.raises(ConfigError):
            build_config({"patch_size": "33", "degrade_factor": "3"})

    def test_positive_epsilons(self):
        """epsilon_list 원소 > 0"""
        with pytest.raises(ConfigError):
            build_config({"epsilon_list": "0.1,0"})

    def test_siran_denoise_methods(self):
        """SIRAN 디노이징은 gan/sinkhorn_gan 만"""
        with pytest.raises(ConfigError):
            build_config({"denoise_architecture": "siran", "method": "wgan"})

    def test_with_changes_revalidates(self):
        """복사본도 검증"""
        cfg = build_config({})
        assert cfg.with_changes(seed=5).seed == 5
        with pytest.raises(ConfigError):
            cfg.with_changes(epsilon=-1.0)

    def test_derived_configs(self):
        """손실 가중치, Sinkhorn, SIRAN 파생 설정"""
        cfg = build_config({"experiment": "sr_toy", "epsilon": "0.5", "sinkhorn_iters": "7", "lambda_OT": "0.2"})
        assert cfg.weights().lambda_OT == pytest.approx(0.2)
        assert cfg.sinkhorn().epsilon == 0.5
        assert cfg.sinkhorn(epsilon=2.0).epsilon == 2.0
        assert cfg.sinkhorn().max_iters == 7
        assert cfg.siran().scale_factor == cfg.degrade_factor
        assert build_config({}).siran().scale_factor == 1


class TestConfigEcho:
    """config.echo 테스트"""

    def test_echo_reparses_to_same_config(self):
        """echo → 파싱 → 같은 설정"""
        cfg = build_config({"experiment": "eps_sweep", "epsilon_list": "0.01,1", "subset_size": "none"})
        again = build_config(parse_config_text(cfg.echo()))
        assert again == cfg

    def test_echo_has_every_key_once(self):
        """모든 키 한 번씩, 선언 순서"""
        lines = build_config({}).echo().splitlines()
        keys = [line.split("=", 1)[0] for line in lines]
        assert keys == list(ExperimentConfig.model_fields)

    def test_echo_records_override(self, tmp_path):
        """재정의 값이 echo에 남음"""
        cfg = build_config({}, ["seed=9"])
        text = write_echo(cfg, tmp_path).read_text(encoding="utf-8")
        assert "seed=9\n" in text


def _mlp(seed: int = 0) -> Network:
    return build_mlp_discriminator(6, (5, 4), seed=seed, dtype=np.float64)


class TestObjectives:
    """WGAN 클리핑과 기울기 페널티 테스트"""

    def test_clip_bounds(self):
        """모든 파라미터 ∈ [-c, c]"""
        net = _mlp()
        net.params["fc1.bias"][:] = 3.0
        clip_weights(net, 0.01)
        for p in net.params.values():
            assert np.all(np.abs(p) <= 0.01)

    def test_interpolate_between_endpoints(self):
        """보간점은 두 배치 사이"""
        rng = np.random.default_rng(0)
        real, fake = np.ones((4, 1, 2, 3)), np.zeros((4, 1, 2, 3))
        mid = interpolate(real, fake, rng)
        assert mid.shape == real.shape
        assert np.all((mid >= 0) & (mid <= 1))
        # 샘플마다 하나의 계수
        assert np.allclose(mid, mid[:, :, :1, :1])

    def test_unit_gradient_has_zero_penalty(self):
        """‖∇D‖ = 1 이면 페널티 0"""
        net = build_mlp_discriminator(2, (1, 1), seed=0, dtype=np.float64)
        for p in net.params.values():
            p[...] = 0.0
        net.params["fc1.weight"][...] = [[1.0, 0.0]]
        net.params["fc1.bias"][...] = 1.0
        net.params["fc2.weight"][...] = 1.0
        net.params["out.weight"][...] = 1.0
        points = np.abs(np.random.default_rng(1).standard_normal((3, 1, 1, 2)))
        result = gradient_penalty(net, points, lam=10.0)
        assert np.allclose(result.grad_norms, 1.0)
        assert result.value == pytest.approx(0.0)
        assert all(not np.any(g) for g in result.grads.values())

    def test_penalty_gradient_matches_finite_difference(self):
        """닫힌 형태 페널티 기울기 vs 중심 차분"""
        net = _mlp(3)
        points = np.random.default_rng(3).standard_normal((4, 1, 2, 3))
        result = gradient_penalty(net, points, lam=10.0)
        h = 1e-6
        for name, idx in (("fc1.weight", (1, 2)), ("fc2.weight", (0, 3)), ("out.weight", (0, 1))):
            p = net.params[name]
            old = p[idx]
            p[idx] = old + h
            plus = gradient_penalty(net, points, 10.0).value
            p[idx] = old - h
            minus = gradient_penalty(net, points, 10.0).value
            p[idx] = old
            fd = (plus - minus) / (2 * h)
            assert result.grads[name][idx] == pytest.approx(fd, rel=1e-5, abs=1e-8)


def _run(mses, epochs_to_target=None, failed_last=False) -> RunResult:
    records = [MetricsRecord(epoch=i + 1, mse=m, g_hidden=float(i)) for i, m in enumerate(mses)]
    if failed_last:
        records[-1] = MetricsRecord.failure(len(records))
    return RunResult(name="r", method="sinkhorn_gan", seed=0, epsilon=0.1,
                     records=records, epochs_to_target=epochs_to_target, failed=failed_last)


class TestNearOptimumWindow:
    """최적점 근방 구간 테스트"""

    def test_last_tenth_when_not_reached(self):
        """미도달: 전체 에포크의 마지막 10%"""
        assert near_optimum_window(_run([0.5] * 20)) == [18, 19]

    def test_stops_at_target_epoch(self):
        """도달: 도달 에포크 이전 구간만"""
        assert near_optimum_window(_run([0.5] * 30, epochs_to_target=10)) == [9]

    def test_failed_rows_excluded(self):
        """실패 행 제외"""
        assert near_optimum_window(_run([0.5] * 11, failed_last=True)) == [9]

    def test_empty_run(self):
        """레코드 없음"""
        assert near_optimum_window(_run([])) == []


class TestRunner:
    """집계와 요약 표 테스트"""

    def test_mean_record(self):
        """항별 평균, 값 없는 항은 None"""
        steps = [MetricsRecord(epoch=1, L_P=1.0, g_first=2.0), MetricsRecord(epoch=1, L_P=3.0)]
        rec = mean_record(steps, epoch=4)
        assert rec.epoch == 4
        assert rec.L_P == pytest.approx(2.0)
        assert rec.g_first == pytest.approx(2.0)
        assert rec.L_OT is None

    def test_median(self):
        """짝수/홀수/빈 목록"""
        assert median([3, 1, 2]) == 2
        assert median([4, 1, 2, 3]) == 2.5
        assert math.isnan(median([]))

    def test_write_table(self, tmp_path):
        """문자열은 그대로, 숫자는 셀 표기"""
        path = write_table(
            [{"method": "gan", "epochs_to_target": "not reached", "final_mse": 0.25}],
            ("method", "epochs_to_target", "final_mse", "failed"),
            tmp_path / "t.csv",
        )
        assert path.read_text(encoding="utf-8").splitlines() == [
            "method,epochs_to_target,final_mse,failed",
            "gan,not reached,0.25,",
        ]

    def test_serial_map_keeps_order(self):
        """작업 순서대로 결과"""
        assert map_runs(abs, [-3, 2, -1], workers=1) == [3, 2, 1]


class TestSmoothness:
    """평활성 탐침 테스트"""

    def test_theory_column(self):
        """log10(1/(ε·exp(κ/ε)))"""
        assert theory_log10(1.0, 0.0) == pytest.approx(0.0)
        assert theory_log10(10.0, 10.0) == pytest.approx(-1.0 - 1.0 / math.log(10.0))

    def test_probe_writes_table(self, tmp_path):
        """ε × seed 행, 유한한 Γ̂"""
        cfg = build_config({
            "experiment": "smoothness",
            "epsilon_list": "0.5,5",
            "seeds": "0",
            "probe_pairs": "2",
            "probe_points": "5",
            "probe_dim": "2",
            "probe_iters": "300",
        })
        result = smoothness_probe(cfg, tmp_path)
        assert len(result.rows) == 2
        for row in result.rows:
            assert math.isfinite(row["gamma_hat"]) and row["gamma_hat"] >= 0.0
            assert math.isfinite(row["theory_log10"])
        assert (tmp_path / "smoothness.csv").exists()
        assert (tmp_path / "config.echo").exists()
        assert result.gamma(0.5, 0) == result.rows[0]["gamma_hat"]
