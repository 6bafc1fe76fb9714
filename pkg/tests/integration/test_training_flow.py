# -*- coding: utf-8 -*-
"""
Training Flow Integration Tests
===============================

학습 스텝 순서, 소형 실험 실행의 결정성과 출력 파일 검증.
판별자 갱신 → A_s 재계산 → 생성자 갱신 → metrics.csv / config.echo / 체크포인트.
"""

import math

import numpy as np
import pytest

from src.sinkdem.data import read_metrics_csv
from src.sinkdem.errors import TrainingDivergedError
from src.sinkdem.experiments import (
    DenoiseTrainer,
    build_config,
    evaluate_checkpoint,
    run_ablation,
    run_baselines,
    run_denoise,
    run_eps_sweep,
    run_sr_toy,
)
from src.sinkdem.losses import LossWeights
from src.sinkdem.model import MANIFEST_NAME, SiranConfig, SiranOptimizers, TrainOptions, build_siran, train_step
from src.sinkdem.ot import SinkhornConfig

TINY = SiranConfig(base_channels=4, n_dmrb_g=1, n_dmrb_d=1, rcb_per_dmrb=1, mlp_hidden=8)
WEIGHTS = LossWeights(lambda_DA=0.1, lambda_P=1.0, lambda_str=0.0, lambda_ADV=0.1, lambda_OT=1.0)


def _batch(seed: int = 0):
    rng = np.random.default_rng(seed)
    y = rng.random((2, 1, 8, 8)).astype(np.float32)
    x = np.clip(y + 0.1 * rng.standard_normal(y.shape), 0, 1).astype(np.float32)
    z = np.repeat(y, 3, axis=1)
    return {"x": x, "z": z, "y": y}


def _options(**changes) -> TrainOptions:
    base = dict(sinkhorn=SinkhornConfig(epsilon=1.0, max_iters=10), spec_iters=5)
    base.update(changes)
    return TrainOptions(**base)


class TestTrainStep:
    """SIRAN 학습 스텝 통합 테스트"""

    def test_discriminator_updates_before_generator(self):
        """D 갱신 시점에 G는 그대로, 스텝 후 G 갱신"""
        G, D = build_siran(TINY, seed=0)
        opt = SiranOptimizers.create(G, D, 1e-3)
        g0, d0 = G.net.fingerprint(), D.net.fingerprint()
        events = []

        def observer(event, payload):
            events.append((event, payload["generator"].net.fingerprint() if "generator" in payload else None,
                           D.net.fingerprint()))

        record = train_step(_batch(), (G, D), opt, WEIGHTS, _options(), epoch=1, observer=observer)
        assert [e[0] for e in events] == ["discriminator_updated", "generator_gradients"]
        assert events[0][1] == g0
        assert events[0][2] != d0
        assert G.net.fingerprint() != g0
        assert record.epoch == 1
        for name in ("L_P", "L_ADV", "L_OT", "L_DA", "g_first", "g_hidden"):
            assert math.isfinite(getattr(record, name))
        assert record.L_str is None

    def test_step_is_deterministic(self):
        """같은 seed와 배치 → 같은 레코드와 가중치"""
        results = []
        for _ in range(2):
            G, D = build_siran(TINY, seed=3)
            opt = SiranOptimizers.create(G, D, 1e-3)
            rec = train_step(_batch(1), (G, D), opt, WEIGHTS, _options(), epoch=1)
            results.append((rec.to_dict(), G.net.fingerprint(), D.net.fingerprint()))
        assert results[0] == results[1]

    def test_detached_attention_leaves_discriminator(self):
        """A_s 분리: 생성자 스텝이 판별자를 바꾸지 않음"""
        G, D = build_siran(TINY, seed=0)
        opt = SiranOptimizers.create(G, D, 1e-3)
        seen = {}

        def observer(event, payload):
            if event == "discriminator_updated":
                seen["d"] = D.net.fingerprint()

        train_step(_batch(), (G, D), opt, WEIGHTS, _options(detach_attention=True), epoch=1, observer=observer)
        assert D.net.fingerprint() == seen["d"]

    def test_attached_attention_updates_discriminator(self):
        """A_s 연결: 생성자 손실이 판별자까지 전파"""
        G, D = build_siran(TINY, seed=0)
        opt = SiranOptimizers.create(G, D, 1e-3)
        seen = {}

        def observer(event, payload):
            if event == "discriminator_updated":
                seen["d"] = D.net.fingerprint()

        train_step(_batch(), (G, D), opt, WEIGHTS, _options(detach_attention=False), epoch=1, observer=observer)
        assert D.net.fingerprint() != seen["d"]

    def test_discriminator_adam_counter_once_per_step(self):
        """A_s 연결이어도 opt.d 스텝 카운터는 스텝당 1 증가"""
        for detach in (True, False):
            G, D = build_siran(TINY, seed=0)
            opt = SiranOptimizers.create(G, D, 1e-3)
            for epoch in (1, 2):
                train_step(_batch(), (G, D), opt, WEIGHTS, _options(detach_attention=detach), epoch=epoch)
            assert opt.d.t == 2
            assert opt.d_attention.t == (0 if detach else 2)

    def test_sinkhorn_disabled(self):
        """use_sinkhorn=False → L_OT 0"""
        G, D = build_siran(TINY, seed=0)
        opt = SiranOptimizers.create(G, D, 1e-3)
        record = train_step(_batch(), (G, D), opt, WEIGHTS, _options(use_sinkhorn=False), epoch=1)
        assert record.L_OT == 0.0

    def test_without_prior(self):
        """prior 없는 구성 (기준선 행)"""
        cfg = SiranConfig(base_channels=4, n_dmrb_g=1, n_dmrb_d=1, rcb_per_dmrb=1, mlp_hidden=8, use_prior=False)
        G, D = build_siran(cfg, seed=0)
        opt = SiranOptimizers.create(G, D, 1e-3)
        batch = _batch()
        batch.pop("z")
        record = train_step(batch, (G, D), opt, WEIGHTS, _options(), epoch=1)
        assert math.isfinite(record.L_P)


class TestDenoiseRun:
    """MNIST형 디노이징 실행 통합 테스트"""

    def test_outputs(self, tmp_path, tiny_denoise_cfg, tiny_denoise_data):
        """metrics.csv (에포크별), config.echo, 체크포인트"""
        result = run_denoise(tiny_denoise_cfg, tmp_path, tiny_denoise_data)
        assert not result.failed
        assert result.epochs_to_target is None
        records = read_metrics_csv(tmp_path / "metrics.csv")
        assert [r.epoch for r in records] == [1, 2, 3]
        assert all(r.wallclock_s == 0.0 for r in records)
        assert all(r.ssim is None for r in records)
        assert (tmp_path / "config.echo").exists()
        assert (tmp_path / "generator.sdnc").exists()
        assert (tmp_path / "discriminator.sdnc").exists()

    def test_same_seed_same_metrics(self, tmp_path, tiny_denoise_cfg, tiny_denoise_data):
        """같은 설정 → metrics.csv 바이트 동일"""
        run_denoise(tiny_denoise_cfg, tmp_path / "a", tiny_denoise_data)
        run_denoise(tiny_denoise_cfg, tmp_path / "b", tiny_denoise_data)
        assert (tmp_path / "a" / "metrics.csv").read_bytes() == (tmp_path / "b" / "metrics.csv").read_bytes()

    def test_zero_transport_weight_equals_gan(self, tmp_path, tiny_denoise_cfg, tiny_denoise_data):
        """λ_OT = 0 인 sinkhorn_gan = gan"""
        gan = tiny_denoise_cfg.with_changes(method="gan")
        sink = tiny_denoise_cfg.with_changes(method="sinkhorn_gan", lambda_OT=0.0)
        run_denoise(gan, tmp_path / "gan", tiny_denoise_data)
        run_denoise(sink, tmp_path / "sink", tiny_denoise_data)
        assert (tmp_path / "gan" / "metrics.csv").read_bytes() == (tmp_path / "sink" / "metrics.csv").read_bytes()

    @pytest.mark.parametrize("method", ["gan", "wgan", "wgan_gp", "sinkhorn_gan"])
    def test_every_method_trains(self, tmp_path, tiny_denoise_cfg, tiny_denoise_data, method):
        """네 가지 목적함수 모두 유한한 지표"""
        cfg = tiny_denoise_cfg.with_changes(method=method, max_epochs=1)
        result = run_denoise(cfg, tmp_path, tiny_denoise_data)
        assert not result.failed
        rec = result.records[0]
        assert math.isfinite(rec.mse) and math.isfinite(rec.g_hidden)

    def test_target_reached_stops_early(self, tmp_path, tiny_denoise_cfg, tiny_denoise_data):
        """target_mse 도달 시 그 에포크에서 중단"""
        cfg = tiny_denoise_cfg.with_changes(target_mse=10.0)
        result = run_denoise(cfg, tmp_path, tiny_denoise_data)
        assert result.epochs_to_target == 1
        assert len(result.records) == 1

    def test_divergence_recorded(self, tmp_path, tiny_denoise_cfg, tiny_denoise_data, monkeypatch):
        """발산 → 실패 행, 체크포인트 없음"""
        calls = {"n": 0}
        original = DenoiseTrainer.step

        def step(self, x, y, epoch):
            calls["n"] += 1
            if epoch == 2:
                raise TrainingDivergedError("L_OT", float("nan"), iteration=epoch)
            return original(self, x, y, epoch)

        monkeypatch.setattr(DenoiseTrainer, "step", step)
        result = run_denoise(tiny_denoise_cfg, tmp_path, tiny_denoise_data)
        assert result.failed
        records = read_metrics_csv(tmp_path / "metrics.csv")
        assert [r.epoch for r in records] == [1, 2]
        assert records[1].failed and not records[0].failed
        assert not (tmp_path / "generator.sdnc").exists()

    def test_siran_architecture(self, tmp_path, tiny_denoise_cfg, tiny_denoise_data):
        """토이 SIRAN 생성자로 디노이징"""
        cfg = tiny_denoise_cfg.with_changes(
            denoise_architecture="siran", siran_base_channels=4, siran_n_dmrb=1,
            siran_rcb_per_dmrb=1, siran_mlp_hidden=8, max_epochs=1,
        )
        result = run_denoise(cfg, tmp_path, tiny_denoise_data)
        assert not result.failed
        assert (tmp_path / MANIFEST_NAME).exists()


class TestMultiRunExperiments:
    """ε 스윕과 기준선 비교 통합 테스트"""

    def test_eps_sweep(self, tmp_path, tiny_denoise_cfg, tiny_denoise_data):
        """ε × seed 실행, sweep.csv"""
        cfg = tiny_denoise_cfg.with_changes(experiment="eps_sweep", epsilon_list=[0.1, 10.0], seeds=[0], max_epochs=2)
        sweep = run_eps_sweep(cfg, tmp_path, tiny_denoise_data)
        assert [e.epsilon for e in sweep.entries] == [0.1, 10.0]
        assert all(len(e.runs) == 1 for e in sweep.entries)
        lines = (tmp_path / "sweep.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "epsilon,seed,epochs_to_target,near_opt_g_first,near_opt_g_hidden,failed"
        assert len(lines) == 3
        assert all("not reached" in line for line in lines[1:])
        assert (tmp_path / "eps_0.1" / "seed_0" / "metrics.csv").exists()
        assert sweep.entry(10.0).median_epochs(cfg.max_epochs) == cfg.max_epochs + 1

    def test_baselines(self, tmp_path, tiny_denoise_cfg, tiny_denoise_data):
        """methods × seeds, comparison.csv 에 방법별 중앙값 행"""
        cfg = tiny_denoise_cfg.with_changes(experiment="baselines", seeds=[0], max_epochs=1)
        comparison = run_baselines(cfg, tmp_path, tiny_denoise_data)
        assert set(comparison.runs) == {"sinkhorn_gan", "gan", "wgan", "wgan_gp"}
        text = (tmp_path / "comparison.csv").read_text(encoding="utf-8")
        assert text.count(",median,") == 4
        assert (tmp_path / "config.echo").exists()


def _sr_cfg(**changes):
    raw = {
        "name": "toy",
        "experiment": "sr_toy",
        "patch_size": "17",
        "degrade_factor": "4",
        "train_patches": "2",
        "test_patches": "2",
        "batch": "2",
        "max_epochs": "2",
        "siran_base_channels": "4",
        "siran_n_dmrb": "1",
        "siran_rcb_per_dmrb": "1",
        "siran_mlp_hidden": "8",
        "sinkhorn_iters": "5",
        "epsilon": "1.0",
        "lambda_P": "1",
        "lambda_OT": "0.1",
        "seeds": "0",
        "workers": "1",
    }
    raw.update(changes)
    return build_config(raw)


class TestSrToy:
    """합성 지형 토이 SIRAN 통합 테스트"""

    def test_run_and_reevaluate(self, tmp_path):
        """학습 → 체크포인트 → 재평가가 마지막 에포크 지표와 일치"""
        result = run_sr_toy(_sr_cfg(), tmp_path)
        assert not result.run.failed
        assert len(result.run.records) == 2
        for name in ("metrics.csv", "summary.csv", "config.echo", MANIFEST_NAME, "generator.sdnc"):
            assert (tmp_path / name).exists()
        assert (tmp_path / "samples" / "pred_000.sdem").exists()

        model, bicubic = evaluate_checkpoint(tmp_path)
        assert model.rmse == pytest.approx(result.final.rmse, rel=1e-5)
        assert bicubic.rmse == pytest.approx(result.baseline.rmse)
        assert model.ssim is not None

    def test_summary_rows(self, tmp_path):
        """bicubic, siran 두 행"""
        result = run_sr_toy(_sr_cfg(max_epochs="1"), tmp_path)
        assert [row["model"] for row in result.summary_rows()] == ["bicubic", "siran"]
        lines = (tmp_path / "summary.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "model,rmse,mae,psnr,ssim"

    def test_ablation_rows(self, tmp_path):
        """누적 모듈 5행, 행마다 중앙값"""
        cfg = _sr_cfg(experiment="ablation", max_epochs="1")
        ablation = run_ablation(cfg, tmp_path)
        assert list(ablation.rows) == ["baseline", "+prior", "+attention", "+psa", "+sinkhorn"]
        lines = (tmp_path / "ablation.csv").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 1 + 5 * 2
        assert math.isfinite(ablation.median_metric("+sinkhorn", "rmse"))
