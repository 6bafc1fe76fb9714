# -*- coding: utf-8 -*-
"""
Data Commands
=============

gen-data: 합성 지형 패치를 SDEM 래스터 + PGM 미리보기로 기록
eval:     실행 디렉터리 (체크포인트) 또는 래스터 두 개 (pred, truth) 평가
"""

import argparse
import logging
from pathlib import Path

import numpy as np

from src.sinkdem.config import settings
from src.sinkdem.data import MetricsRecord, eval_metrics, format_cell, read_raster, write_pgm_preview, write_raster
from src.sinkdem.errors import ShapeError, ValidationError
from src.sinkdem.experiments import evaluate_checkpoint, make_terrain_set

from .common import EXIT_OK, add_config_args, resolve_config

logger = logging.getLogger(__name__)


def handle_gen_data(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, ("sr_toy", "ablation"))
    out = Path(args.out) if args.out else Path(settings.runs_dir) / cfg.name / "data"
    for split, count in (("train", cfg.train_patches), ("test", cfg.test_patches)):
        patches = make_terrain_set(cfg, count, split)
        base = out / split
        for i in range(len(patches)):
            write_raster(patches.x[i, 0], base / f"x_{i:04d}.sdem")
            write_raster(patches.y[i, 0], base / f"truth_{i:04d}.sdem")
            for c in range(patches.z.shape[1]):
                write_raster(patches.z[i, c], base / f"prior{c}_{i:04d}.sdem")
            write_pgm_preview(patches.y[i, 0], base / f"truth_{i:04d}.pgm")
            write_pgm_preview(patches.x[i, 0], base / f"x_{i:04d}.pgm")
        logger.info("gen-data split=%s patches=%d dir=%s", split, len(patches), base)
    print(f"data_dir={out}")
    print(f"train_patches={cfg.train_patches} test_patches={cfg.test_patches} patch_size={cfg.patch_size}")
    return EXIT_OK


# =============================================================================
# 평가
# =============================================================================


def _print_metrics(label: str, rec: MetricsRecord) -> None:
    cells = " ".join(f"{name}={format_cell(getattr(rec, name))}" for name in ("rmse", "mae", "psnr", "ssim"))
    print(f"{label} {cells}")


def evaluate_rasters(pred_path: Path, truth_path: Path) -> MetricsRecord:
    """truth 값 범위를 data_range 로 사용 (평탄하면 1)"""
    pred = read_raster(pred_path).data.astype(np.float64)
    truth = read_raster(truth_path).data.astype(np.float64)
    if pred.shape != truth.shape:
        raise ShapeError(f"prediction shape {pred.shape} does not match truth shape {truth.shape}")
    span = float(truth.max() - truth.min())
    return eval_metrics(pred, truth, data_range=span if span > 0 else 1.0)


def handle_eval(args: argparse.Namespace) -> int:
    paths = [Path(p) for p in args.paths]
    if len(paths) == 1:
        model, bicubic = evaluate_checkpoint(paths[0])
        _print_metrics("model=siran", model)
        _print_metrics("model=bicubic", bicubic)
    elif len(paths) == 2:
        _print_metrics("model=raster", evaluate_rasters(paths[0], paths[1]))
    else:
        raise ValidationError("eval takes a run directory or a prediction and a truth raster")
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    gen = subparsers.add_parser("gen-data", help="합성 지형 (x̃, prior, truth) 패치 생성")
    add_config_args(gen)
    gen.set_defaults(handler=handle_gen_data)

    ev = subparsers.add_parser("eval", help="RMSE / MAE / PSNR / SSIM 평가")
    ev.add_argument("paths", nargs="+", metavar="PATH", help="실행 디렉터리 하나, 또는 pred 와 truth 래스터")
    ev.set_defaults(handler=handle_eval)
