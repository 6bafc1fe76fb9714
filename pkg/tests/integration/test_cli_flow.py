# -*- coding: utf-8 -*-
"""
CLI Flow Integration Tests
==========================

명령행 전체 흐름: gen-data → eval, sr-toy → eval, denoise → plot.
"""

import pytest

from src.cli import main
from src.cli.commands.common import EXIT_OK, EXIT_RUNTIME
from src.sinkdem.config import settings
from src.sinkdem.data import read_metrics_csv, read_raster
from src.sinkdem.errors import TrainingDivergedError
from src.sinkdem.experiments import DenoiseTrainer

SR_SET = [
    "patch_size=17", "degrade_factor=4", "train_patches=2", "test_patches=2", "batch=2",
    "max_epochs=1", "siran_base_channels=4", "siran_n_dmrb=1", "siran_rcb_per_dmrb=1",
    "siran_mlp_hidden=8", "sinkhorn_iters=5", "epsilon=1.0",
]

DENOISE_SET = [
    "max_epochs=2", "batch=4", "target_mse=1e-9", "lambda_P=1", "lambda_str=0", "lambda_ADV=0.1",
    "lambda_OT=1", "epsilon=1.0", "ae_channels=2,4", "disc_hidden=8,4", "spec_iters=5",
]


def _sets(items):
    args = []
    for item in items:
        args += ["--set", item]
    return args


def _values(text: str):
    out = {}
    for line in text.splitlines():
        for cell in line.split():
            key, sep, value = cell.partition("=")
            if sep:
                out.setdefault(key, []).append(value)
    return out


class TestTerrainFlow:
    """합성 지형 데이터와 평가"""

    def test_gen_data_then_eval(self, tmp_path, capsys):
        """gen-data 패치로 래스터 평가"""
        out = tmp_path / "data"
        assert main(["gen-data", "--set", "experiment=sr_toy", *_sets(SR_SET), "--out", str(out)]) == EXIT_OK
        for split in ("train", "test"):
            assert sorted(p.name for p in (out / split).glob("x_*.sdem")) == ["x_0000.sdem", "x_0001.sdem"]
        assert read_raster(out / "test" / "prior2_0001.sdem").data.shape == (17, 17)
        assert read_raster(out / "test" / "truth_0000.pgm").height == 17
        capsys.readouterr()

        code = main(["eval", str(out / "test" / "x_0000.sdem"), str(out / "test" / "truth_0000.sdem")])
        assert code == EXIT_OK
        values = _values(capsys.readouterr().out)
        assert float(values["rmse"][0]) > 0.0
        assert values["ssim"][0] != ""

    def test_gen_data_is_deterministic(self, tmp_path):
        """같은 data_seed → 같은 패치 바이트"""
        for name in ("a", "b"):
            assert main(["gen-data", *_sets(SR_SET), "--out", str(tmp_path / name)]) == EXIT_OK
        a = (tmp_path / "a" / "train" / "truth_0001.sdem").read_bytes()
        b = (tmp_path / "b" / "train" / "truth_0001.sdem").read_bytes()
        assert a == b

    def test_sr_toy_then_eval(self, tmp_path, capsys):
        """sr-toy 실행 디렉터리 재평가"""
        run = tmp_path / "run"
        assert main(["sr-toy", *_sets(SR_SET), "--out", str(run)]) == EXIT_OK
        trained = _values(capsys.readouterr().out)
        assert trained["model"] == ["bicubic", "siran"]

        assert main(["eval", str(run)]) == EXIT_OK
        evaluated = _values(capsys.readouterr().out)
        assert evaluated["model"] == ["siran", "bicubic"]
        # 저장된 모델 재평가 = 학습 직후 지표
        assert evaluated["rmse"][1] == trained["rmse"][0]
        assert float(evaluated["rmse"][0]) == pytest.approx(float(trained["rmse"][1]), rel=1e-5)


class TestDenoiseFlow:
    """디노이징 명령과 플롯"""

    def test_denoise_then_plot(self, tmp_path, capsys, monkeypatch, mnist_dir):
        """denoise → metrics.csv → plot"""
        monkeypatch.setattr(settings, "mnist_dir", str(mnist_dir))
        run = tmp_path / "run"
        assert main(["denoise", *_sets(DENOISE_SET), "--out", str(run)]) == EXIT_OK
        assert "epochs_to_target=not reached" in capsys.readouterr().out
        assert len(read_metrics_csv(run / "metrics.csv")) == 2
        assert "seed=0\n" in (run / "config.echo").read_text(encoding="utf-8")

        assert main(["plot", str(run / "metrics.csv")]) == EXIT_OK
        assert (run / "loss.svg").exists()

    def test_failed_run_exit_code(self, tmp_path, capsys, monkeypatch, mnist_dir):
        """단일 실행 발산 → 종료 코드 2, 실패 행 기록"""
        monkeypatch.setattr(settings, "mnist_dir", str(mnist_dir))

        def step(self, x, y, epoch):
            raise TrainingDivergedError("L_G", float("inf"), iteration=epoch)

        monkeypatch.setattr(DenoiseTrainer, "step", step)
        run = tmp_path / "run"
        assert main(["denoise", *_sets(DENOISE_SET), "--out", str(run)]) == EXIT_RUNTIME
        assert "status=failed" in capsys.readouterr().out
        records = read_metrics_csv(run / "metrics.csv")
        assert len(records) == 1 and records[0].failed

    def test_missing_mnist(self, tmp_path, monkeypatch):
        """MNIST 파일 없음 → 1"""
        monkeypatch.setattr(settings, "mnist_dir", str(tmp_path / "nowhere"))
        assert main(["denoise", "--out", str(tmp_path / "run")]) == 1


class TestSmoothnessFlow:
    """probe-smoothness 명령"""

    def test_probe(self, tmp_path, capsys):
        """ε별 행 출력, smoothness.csv"""
        args = ["probe-smoothness", *_sets([
            "epsilon_list=1,10", "seeds=0", "probe_pairs=2", "probe_points=4", "probe_dim=2", "probe_iters=200",
        ]), "--out", str(tmp_path)]
        assert main(args) == EXIT_OK
        values = _values(capsys.readouterr().out)
        assert values["epsilon"] == ["1", "10"]
        lines = (tmp_path / "smoothness.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "epsilon,seed,lipschitz_scale,gamma_hat,gamma_hat_2x,kappa_hat,theory_log10"
        assert len(lines) == 3
