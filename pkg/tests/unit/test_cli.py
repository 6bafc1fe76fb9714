# -*- coding: utf-8 -*-
"""
CLI Unit Tests
==============
"""

import math

import numpy as np
import pytest

from src.cli import build_parser, main
from src.cli.commands import ot as ot_command
from src.cli.commands.common import EXIT_OK, EXIT_VALIDATION
from src.sinkdem.config import Settings
from src.sinkdem.data import MetricsRecord, write_metrics_csv, write_raster


def _values(text: str):
    """key=value 출력 줄 → 딕셔너리"""
    out = {}
    for line in text.splitlines():
        for cell in line.split():
            key, sep, value = cell.partition("=")
            if sep:
                out[key] = value
    return out


class TestParser:
    """명령 등록 테스트"""

    def test_subcommands_registered(self):
        """모든 하위 명령 등록"""
        parser = build_parser()
        extra = {"ot-solve": ["--cost", "c.csv"], "plot": ["m.csv"], "eval": ["runs/a"]}
        for command in ("ot-solve", "denoise", "eps-sweep", "baselines", "sr-toy",
                        "gen-data", "probe-smoothness", "plot", "eval"):
            args = parser.parse_args([command, *extra.get(command, [])])
            assert args.command == command
            assert callable(args.handler)

    def test_set_is_repeatable(self):
        """--set 반복"""
        args = build_parser().parse_args(["denoise", "--set", "seed=1", "--set", "epsilon=2"])
        assert args.set == ["seed=1", "epsilon=2"]


class TestExitCodes:
    """종료 코드 매핑 테스트"""

    def test_unknown_subcommand(self):
        """알 수 없는 하위 명령 → 1"""
        assert main(["bogus"]) == EXIT_VALIDATION

    def test_missing_required_flag(self):
        """--cost 누락 → 1"""
        assert main(["ot-solve"]) == EXIT_VALIDATION

    def test_unknown_config_key(self, capsys):
        """알 수 없는 설정 키 → 1, 키 이름 출력"""
        assert main(["denoise", "--set", "epsilonn=0.1"]) == EXIT_VALIDATION
        assert "epsilonn" in capsys.readouterr().err

    def test_config_file_unknown_key(self, tmp_path):
        """설정 파일의 알 수 없는 키 → 1"""
        path = tmp_path / "cfg.txt"
        path.write_text("colour=blue\n", encoding="utf-8")
        assert main(["probe-smoothness", "--config", str(path)]) == EXIT_VALIDATION

    def test_experiment_mismatch(self):
        """하위 명령과 맞지 않는 experiment → 1"""
        assert main(["denoise", "--set", "experiment=sr_toy"]) == EXIT_VALIDATION

    def test_missing_cost_file(self, tmp_path):
        """없는 비용 파일 → 1"""
        assert main(["ot-solve", "--cost", str(tmp_path / "none.csv")]) == EXIT_VALIDATION

    def test_malformed_cost(self, tmp_path):
        """숫자가 아닌 비용 → 1"""
        path = tmp_path / "c.csv"
        path.write_text("a,b\n1,0\n", encoding="utf-8")
        assert main(["ot-solve", "--cost", str(path)]) == EXIT_VALIDATION

    def test_eval_argument_count(self, tmp_path):
        """eval 경로 3개 → 1"""
        assert main(["eval", "a", "b", "c"]) == EXIT_VALIDATION

    def test_invalid_settings_maps_to_validation(self, monkeypatch, capsys):
        """설정 검증 실패(pydantic) → 1"""

        def handle(args):
            Settings(threads=0)
            return EXIT_OK

        monkeypatch.setattr(ot_command, "handle", handle)
        assert main(["ot-solve", "--cost", "unused.csv"]) == EXIT_VALIDATION
        assert "invalid settings" in capsys.readouterr().err

    def test_os_error_maps_to_validation(self, monkeypatch):
        """프로세스 풀 등에서 올라온 OSError → 1"""

        def handle(args):
            raise OSError("cannot spawn workers")

        monkeypatch.setattr(ot_command, "handle", handle)
        assert main(["ot-solve", "--cost", "unused.csv"]) == EXIT_VALIDATION


class TestOtSolve:
    """ot-solve 명령 테스트"""

    def test_identity_optimal_problem(self, tmp_path, capsys):
        """[[0,1],[1,0]], ε=0.1 → dual ≤ ε·log 2, exact 0"""
        path = tmp_path / "c.csv"
        path.write_text("0,1\n1,0\n", encoding="utf-8")
        assert main(["ot-solve", "--cost", str(path), "--eps", "0.1", "--iters", "1000"]) == EXIT_OK
        values = _values(capsys.readouterr().out)
        assert float(values["dual_value"]) <= 0.1 * math.log(2.0) + 1e-9
        assert float(values["primal_cost"]) < 1e-3
        assert float(values["exact_ot"]) == 0.0
        assert int(values["iterations_used"]) <= 1000
        assert float(values["marginal_violation"]) < 1e-6

    def test_rectangular_cost(self, tmp_path, capsys):
        """정사각이 아니면 exact_ot 생략"""
        path = tmp_path / "c.csv"
        path.write_text("0,1,2\n2,1,0\n", encoding="utf-8")
        assert main(["ot-solve", "--cost", str(path)]) == EXIT_OK
        assert "exact_ot" not in capsys.readouterr().out


class TestEvalRasters:
    """래스터 두 개 평가 테스트"""

    def test_identical_rasters(self, tmp_path, capsys):
        """동일 래스터 → rmse 0, psnr inf"""
        data = np.random.default_rng(0).random((16, 16)).astype(np.float32)
        a = write_raster(data, tmp_path / "pred.sdem")
        b = write_raster(data, tmp_path / "truth.sdem")
        assert main(["eval", str(a), str(b)]) == EXIT_OK
        values = _values(capsys.readouterr().out)
        assert values["model"] == "raster"
        assert float(values["rmse"]) == 0.0
        assert values["psnr"] == "inf"

    def test_shape_mismatch(self, tmp_path):
        """형상 불일치 → 1"""
        a = write_raster(np.zeros((4, 4)), tmp_path / "a.sdem")
        b = write_raster(np.zeros((4, 5)), tmp_path / "b.sdem")
        assert main(["eval", str(a), str(b)]) == EXIT_VALIDATION


class TestPlotCommand:
    """plot 명령 테스트"""

    def test_writes_svgs(self, tmp_path, capsys):
        """기본 출력 위치는 CSV 디렉터리"""
        csv = write_metrics_csv(
            [MetricsRecord(epoch=1, mse=0.3, g_first=1.0), MetricsRecord(epoch=2, mse=0.2, g_first=0.9)],
            tmp_path / "metrics.csv",
        )
        assert main(["plot", str(csv), "--set", "plot_window=1"]) == EXIT_OK
        assert (tmp_path / "loss.svg").exists()
        assert (tmp_path / "grad_norms.svg").exists()
        assert "loss.svg" in capsys.readouterr().out

    def test_malformed_csv(self, tmp_path):
        """잘못된 CSV → 1"""
        path = tmp_path / "metrics.csv"
        path.write_text("epoch\n1\n", encoding="utf-8")
        assert main(["plot", str(path)]) == EXIT_VALIDATION
