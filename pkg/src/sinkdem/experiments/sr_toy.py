# -*- coding: utf-8 -*-
"""
Toy Super-Resolution Module
===========================

합성 지형 패치로 토이 SIRAN 학습과 모듈 제거 실험.

데이터: gen_terrain → degrade (x̃) / hillshade_prior (z) / 원본 (y)
비교 기준: bicubic 입력 x̃ 자체
모듈 제거 행 (누적): baseline → +prior → +attention → +psa → +sinkhorn
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ..config import settings
from ..data import MetricsRecord, eval_metrics, make_patch_triplet, write_pgm_preview, write_raster
from ..errors import NumericalFailureError
from ..model import (
    DiscriminatorModel,
    GeneratorModel,
    SiranOptimizers,
    TrainOptions,
    build_siran,
    discriminator_attention,
    generator_forward,
    load_models,
    save_models,
    train_step,
)
from .config import ECHO_NAME, ExperimentConfig, load_config, write_echo
from .runner import NOT_REACHED, RunResult, map_runs, mean_record, median, run_dir, worker_count, write_run, write_table

logger = logging.getLogger(__name__)

SAMPLE_COUNT = 4

SUMMARY_COLUMNS = ("model", "rmse", "mae", "psnr", "ssim")
ABLATION_COLUMNS = ("row", "seed", "rmse", "mae", "psnr", "ssim", "epochs_to_threshold", "failed")

# 누적 모듈 제거 행
ABLATION_ROWS: Tuple[Tuple[str, Dict[str, bool]], ...] = (
    ("baseline", {"use_prior": False, "use_attention": False, "use_psa": False, "use_sinkhorn": False}),
    ("+prior", {"use_prior": True, "use_attention": False, "use_psa": False, "use_sinkhorn": False}),
    ("+attention", {"use_prior": True, "use_attention": True, "use_psa": False, "use_sinkhorn": False}),
    ("+psa", {"use_prior": True, "use_attention": True, "use_psa": True, "use_sinkhorn": False}),
    ("+sinkhorn", {"use_prior": True, "use_attention": True, "use_psa": True, "use_sinkhorn": True}),
)


# =============================================================================
# 데이터
# =============================================================================


@dataclass
class TerrainSet:
    """(x̃, z, y) 패치 묶음: (N,1,H,W), (N,3,H,W), (N,1,H,W)"""

    x: np.ndarray
    z: np.ndarray
    y: np.ndarray

    def __len__(self) -> int:
        return int(self.x.shape[0])

    def batch(self, idx: np.ndarray) -> Dict[str, np.ndarray]:
        return {"x": self.x[idx], "z": self.z[idx], "y": self.y[idx]}


def make_terrain_set(cfg: ExperimentConfig, count: int, split: str) -> TerrainSet:
    """패치 시드: data_seed·10⁶ + 2i (train) / 2i+1 (test)"""
    offset = 0 if split == "train" else 1
    xs, zs, ys = [], [], []
    for i in range(count):
        seed = cfg.data_seed * 1_000_000 + 2 * i + offset
        coarse, prior, truth = make_patch_triplet(
            seed, cfg.patch_size, cfg.degrade_factor, cfg.blur_sigma, cfg.roughness
        )
        xs.append(coarse.data.reshape(1, coarse.height, coarse.width))
        zs.append(prior.data)
        ys.append(truth.data.reshape(1, truth.height, truth.width))
    return TerrainSet(x=np.stack(xs), z=np.stack(zs), y=np.stack(ys))


def bicubic_baseline(test: TerrainSet) -> MetricsRecord:
    """열화 입력 x̃ 자체의 지표"""
    return eval_metrics(test.x, test.y)


def predict_patches(
    G: GeneratorModel, D: DiscriminatorModel, data: TerrainSet, use_attention: bool, use_psa: bool, chunk: int
) -> np.ndarray:
    """A_s 를 매 묶음 판별자에서 계산해 ŷ 예측"""
    parts = []
    for i in range(0, len(data), chunk):
        x, z = data.x[i:i + chunk], data.z[i:i + chunk]
        trace = discriminator_attention(D, x, use_psa) if use_attention and G.cfg.use_prior else None
        parts.append(generator_forward(G, x, z, trace.attention if trace else None))
    return np.concatenate(parts).astype(np.float32)


# =============================================================================
# 학습
# =============================================================================


@dataclass
class SrResult:
    """토이 SR 실행 결과와 기준선"""

    run: RunResult
    baseline: MetricsRecord
    final: Optional[MetricsRecord] = None
    predictions: Optional[np.ndarray] = field(default=None, repr=False)

    def summary_rows(self) -> List[Dict[str, Any]]:
        rows = [{"model": "bicubic", **_metric_cells(self.baseline)}]
        if self.final is not None:
            rows.append({"model": "siran", **_metric_cells(self.final)})
        return rows


def _metric_cells(rec: MetricsRecord) -> Dict[str, Any]:
    return {"rmse": rec.rmse, "mae": rec.mae, "psnr": rec.psnr, "ssim": rec.ssim}


class SrTrainer:
    """토이 SIRAN 학습기 (에포크 단위)"""

    def __init__(self, cfg: ExperimentConfig, train: TerrainSet, test: TerrainSet):
        self.cfg = cfg
        self.train = train
        self.test = test
        dtype = np.dtype(settings.float_dtype)
        self.G, self.D = build_siran(cfg.siran(), cfg.seed, dtype)
        self.opt = SiranOptimizers.create(self.G, self.D, cfg.learning_rate)
        self.weights = cfg.weights()
        self.options = TrainOptions(
            use_attention=cfg.use_attention,
            use_psa=cfg.use_psa,
            use_sinkhorn=cfg.use_sinkhorn,
            detach_attention=cfg.detach_attention,
            ot_mode=cfg.ot,
            sinkhorn=cfg.sinkhorn(),
            spec_iters=cfg.spec_iters,
        )
        self.rng = np.random.default_rng(cfg.seed)

    def predict_test(self) -> np.ndarray:
        return predict_patches(
            self.G, self.D, self.test, self.options.use_attention, self.options.use_psa, self.cfg.batch
        )

    def fit(self) -> SrResult:
        """max_epochs 학습, 학습 픽셀 손실이 pixel_threshold 이하가 된 첫 에포크 기록"""
        cfg = self.cfg
        run = RunResult(name=cfg.name, method="siran", seed=cfg.seed, epsilon=cfg.epsilon)
        result = SrResult(run=run, baseline=bicubic_baseline(self.test))
        started = time.perf_counter()

        def clock() -> float:
            return time.perf_counter() - started if cfg.record_wallclock else 0.0

        n = len(self.train)
        for epoch in range(1, cfg.max_epochs + 1):
            try:
                order = self.rng.permutation(n)
                steps = [
                    train_step(
                        self.train.batch(order[s:s + cfg.batch]), (self.G, self.D), self.opt,
                        self.weights, self.options, epoch=epoch,
                    )
                    for s in range(0, n, cfg.batch)
                ]
                pred = self.predict_test()
                record = mean_record(steps, epoch).merge(eval_metrics(pred, self.test.y))
            except NumericalFailureError as exc:
                logger.warning("sr_toy diverged name=%s seed=%d epoch=%d error=%s", cfg.name, cfg.seed, epoch, exc)
                run.records.append(MetricsRecord.failure(epoch, clock()))
                run.failed = True
                return result

            run.records.append(replace(record, wallclock_s=clock()))
            result.final = record
            result.predictions = pred
            if run.epochs_to_target is None and record.L_P is not None and record.L_P <= cfg.pixel_threshold:
                run.epochs_to_target = epoch
            logger.info(
                "sr_toy name=%s seed=%d epoch=%d L_P=%.6g rmse=%.6g ssim=%.4g",
                cfg.name, cfg.seed, epoch, record.L_P, record.rmse, record.ssim if record.ssim is not None else math.nan,
            )
        return result

    def save(self, out: Path, result: SrResult) -> None:
        """체크포인트 + 샘플 래스터 (SDEM, PGM 미리보기)"""
        save_models(self.G, self.D, self.cfg.seed, out)
        if result.predictions is None:
            return
        samples = out / "samples"
        for i in range(min(SAMPLE_COUNT, len(self.test))):
            write_raster(result.predictions[i, 0], samples / f"pred_{i:03d}.sdem")
            write_raster(self.test.x[i, 0], samples / f"input_{i:03d}.sdem")
            write_raster(self.test.y[i, 0], samples / f"truth_{i:03d}.sdem")
            write_pgm_preview(result.predictions[i, 0], samples / f"pred_{i:03d}.pgm")


def _datasets(cfg: ExperimentConfig) -> Tuple[TerrainSet, TerrainSet]:
    return make_terrain_set(cfg, cfg.train_patches, "train"), make_terrain_set(cfg, cfg.test_patches, "test")


def train_sr(
    cfg: ExperimentConfig,
    out: Path,
    data: Optional[Tuple[TerrainSet, TerrainSet]] = None,
) -> SrResult:
    train, test = data if data is not None else _datasets(cfg)
    trainer = SrTrainer(cfg, train, test)
    result = trainer.fit()
    write_run(result.run, cfg, out)
    write_table(result.summary_rows(), SUMMARY_COLUMNS, out / "summary.csv")
    if not result.run.failed:
        trainer.save(out, result)
    return result


def run_sr_toy(
    cfg: ExperimentConfig,
    out: Optional[Union[str, Path]] = None,
    data: Optional[Tuple[TerrainSet, TerrainSet]] = None,
) -> SrResult:
    """토이 SIRAN 학습, 지표 + bicubic 비교 + 샘플 래스터"""
    return train_sr(cfg, run_dir(cfg, out), data)


# =============================================================================
# 모듈 제거 실험
# =============================================================================


@dataclass
class SrJob:
    cfg: ExperimentConfig
    out_dir: Path
    train: TerrainSet
    test: TerrainSet


def sr_job(job: SrJob) -> SrResult:
    result = train_sr(job.cfg, job.out_dir, (job.train, job.test))
    # 예측 배열은 요약에 필요 없음 (프로세스 간 전송량 축소)
    result.predictions = None
    return result


@dataclass
class AblationResult:
    """행별 시드 결과"""

    rows: Dict[str, List[SrResult]] = field(default_factory=dict)
    max_epochs: int = 500

    def median_metric(self, row: str, name: str) -> float:
        values = [getattr(r.final, name) for r in self.rows[row] if r.final is not None and not r.run.failed]
        return median([float(v) for v in values if v is not None])

    def median_epochs(self, row: str) -> float:
        """임계값 미도달은 max_epochs + 1"""
        return median([
            r.run.epochs_to_target if r.run.epochs_to_target is not None else self.max_epochs + 1
            for r in self.rows[row]
        ])

    def table(self) -> List[Dict[str, Any]]:
        table: List[Dict[str, Any]] = []
        for row, results in self.rows.items():
            for res in results:
                cells = _metric_cells(res.final) if res.final is not None else {}
                table.append({
                    "row": row,
                    "seed": res.run.seed,
                    **cells,
                    "epochs_to_threshold": res.run.epochs_to_target if res.run.reached else NOT_REACHED,
                    "failed": "true" if res.run.failed else "false",
                })
            table.append({
                "row": row,
                "seed": "median",
                "rmse": self.median_metric(row, "rmse"),
                "mae": self.median_metric(row, "mae"),
                "psnr": self.median_metric(row, "psnr"),
                "ssim": self.median_metric(row, "ssim"),
                "epochs_to_threshold": self.median_epochs(row),
            })
        return table


def run_ablation(cfg: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> AblationResult:
    """누적 모듈 행 × seeds 학습 (공유 데이터/시드), ablation.csv 요약"""
    out_dir = run_dir(cfg, out)
    train, test = _datasets(cfg)

    jobs: List[SrJob] = []
    labels: List[str] = []
    for label, flags in ABLATION_ROWS:
        for seed in cfg.seeds:
            name = f"{label.lstrip('+')}/seed_{seed}"
            run_cfg = cfg.with_changes(name=f"{cfg.name}/{name}", seed=seed, **flags)
            jobs.append(SrJob(cfg=run_cfg, out_dir=out_dir / name, train=train, test=test))
            labels.append(label)

    results = map_runs(sr_job, jobs, worker_count(cfg, len(jobs)))
    ablation = AblationResult(max_epochs=cfg.max_epochs)
    for label, result in zip(labels, results):
        ablation.rows.setdefault(label, []).append(result)

    write_echo(cfg, out_dir)
    write_table(ablation.table(), ABLATION_COLUMNS, out_dir / "ablation.csv")
    for label, _ in ABLATION_ROWS:
        logger.info(
            "ablation row=%s median_ssim=%.4g median_rmse=%.6g median_epochs=%s",
            label, ablation.median_metric(label, "ssim"), ablation.median_metric(label, "rmse"),
            ablation.median_epochs(label),
        )
    return ablation


def evaluate_checkpoint(run_path: Union[str, Path]) -> Tuple[MetricsRecord, MetricsRecord]:
    """저장된 실행 (체크포인트 + config.echo) 을 합성 테스트 패치로 평가: (모델, bicubic)"""
    src = Path(run_path)
    cfg = load_config(src / ECHO_NAME)
    G, D, _ = load_models(src)
    test = make_terrain_set(cfg, cfg.test_patches, "test")
    pred = predict_patches(G, D, test, cfg.use_attention, cfg.use_psa, cfg.batch)
    return eval_metrics(pred, test.y), bicubic_baseline(test)
