# -*- coding: utf-8 -*-
"""
Training Commands
=================

denoise, eps-sweep, baselines, sr-toy, probe-smoothness.

단일 실행이 수치 실패로 중단되면 종료 코드 2, 다중 실행 요약은 실패 행을 기록하고 0.
"""

import argparse

from src.sinkdem.data import format_cell
from src.sinkdem.experiments import (
    NOT_REACHED,
    run_ablation,
    run_baselines,
    run_denoise,
    run_eps_sweep,
    run_sr_toy,
    smoothness_probe,
)

from .common import EXIT_OK, EXIT_RUNTIME, add_config_args, out_path, resolve_config


def _epochs(value: object) -> str:
    return NOT_REACHED if value is None else str(value)


# =============================================================================
# 디노이징
# =============================================================================


def handle_denoise(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, ("denoise",))
    result = run_denoise(cfg, out_path(args))
    mse = result.series("mse")
    print(f"run_dir={result.out_dir}")
    print(f"method={result.method} seed={result.seed} epsilon={result.epsilon:g}")
    print(f"epochs_to_target={_epochs(result.epochs_to_target)}")
    if mse:
        print(f"final_mse={mse[-1]:.6g}")
    if result.failed:
        print("status=failed")
        return EXIT_RUNTIME
    return EXIT_OK


def handle_eps_sweep(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, ("eps_sweep",))
    sweep = run_eps_sweep(cfg, out_path(args))
    print(f"run_dir={sweep.out_dir}")
    for entry in sweep.entries:
        print(
            f"epsilon={entry.epsilon:g} median_epochs={entry.median_epochs(cfg.max_epochs):g} "
            f"median_g_hidden={entry.median_near_optimum('g_hidden'):.6g}"
        )
    return EXIT_OK


def handle_baselines(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, ("baselines",))
    comparison = run_baselines(cfg, out_path(args))
    print(f"run_dir={comparison.out_dir}")
    for method in comparison.runs:
        print(f"method={method} median_epochs={comparison.median_epochs(method):g}")
    return EXIT_OK


# =============================================================================
# 토이 SIRAN
# =============================================================================


def handle_sr_toy(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, ("sr_toy", "ablation"))
    if cfg.experiment == "ablation":
        ablation = run_ablation(cfg, out_path(args))
        for row in ablation.rows:
            print(
                f"row={row} median_ssim={ablation.median_metric(row, 'ssim'):.6g} "
                f"median_rmse={ablation.median_metric(row, 'rmse'):.6g} "
                f"median_epochs={ablation.median_epochs(row):g}"
            )
        return EXIT_OK

    result = run_sr_toy(cfg, out_path(args))
    print(f"run_dir={result.run.out_dir}")
    for row in result.summary_rows():
        cells = " ".join(f"{name}={format_cell(row[name])}" for name in ("rmse", "mae", "psnr", "ssim"))
        print(f"model={row['model']} {cells}")
    print(f"epochs_to_threshold={_epochs(result.run.epochs_to_target)}")
    if result.run.failed:
        print("status=failed")
        return EXIT_RUNTIME
    return EXIT_OK


def handle_smoothness(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, ("smoothness",))
    result = smoothness_probe(cfg, out_path(args))
    print(f"run_dir={result.out_dir}")
    for row in result.rows:
        print(
            f"epsilon={row['epsilon']:g} seed={row['seed']} gamma_hat={row['gamma_hat']:.6g} "
            f"gamma_hat_2x={row['gamma_hat_2x']:.6g} theory_log10={row['theory_log10']:.6g}"
        )
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    commands = (
        ("denoise", "MNIST 디노이징 단일 실행", handle_denoise),
        ("eps-sweep", "ε 스윕 (epsilon_list × seeds)", handle_eps_sweep),
        ("baselines", "sinkhorn_gan / gan / wgan / wgan_gp 비교", handle_baselines),
        ("sr-toy", "토이 SIRAN 초해상도 (experiment=ablation 이면 모듈 제거 실험)", handle_sr_toy),
        ("probe-smoothness", "선형 생성자 기울기 립시츠 상수 탐침", handle_smoothness),
    )
    for name, help_text, handler in commands:
        parser = subparsers.add_parser(name, help=help_text)
        add_config_args(parser)
        parser.set_defaults(handler=handler)
