# -*- coding: utf-8 -*-
"""
Epsilon Sweep Module
====================

ε 값별 Sinkhorn-GAN 디노이징 반복과 최적점 근방 기울기 탐침.

최적점 근방 구간: target_mse 도달 이전 에포크 중 마지막 10%
(미도달 시 전체 에포크의 마지막 10%), 최소 1 에포크.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from ..errors import ConfigError
from .config import ExperimentConfig, write_echo
from .denoise import DenoiseData, load_denoise_data, run_denoise
from .runner import NOT_REACHED, RunResult, map_runs, median, run_dir, worker_count, write_table

logger = logging.getLogger(__name__)

NEAR_OPTIMUM_FRACTION = 0.1

SWEEP_COLUMNS = ("epsilon", "seed", "epochs_to_target", "near_opt_g_first", "near_opt_g_hidden", "failed")


@dataclass
class DenoiseJob:
    """프로세스 풀로 보내는 단일 실행 단위"""

    cfg: ExperimentConfig
    out_dir: Path
    data: DenoiseData


def denoise_job(job: DenoiseJob) -> RunResult:
    return run_denoise(job.cfg, job.out_dir, job.data)


def near_optimum_window(result: RunResult) -> List[int]:
    """최적점 근방 구간의 레코드 인덱스"""
    usable = [i for i, rec in enumerate(result.records) if not rec.failed]
    if result.epochs_to_target is not None:
        usable = [i for i in usable if result.records[i].epoch <= result.epochs_to_target]
    if not usable:
        return []
    k = max(1, math.ceil(NEAR_OPTIMUM_FRACTION * len(usable)))
    return usable[-k:]


def near_optimum_norm(result: RunResult, column: str) -> float:
    """구간 내 기울기 스펙트럴 노름 평균 (구간이 비면 nan)"""
    values = [getattr(result.records[i], column) for i in near_optimum_window(result)]
    values = [float(v) for v in values if v is not None]
    return math.fsum(values) / len(values) if values else math.nan


@dataclass
class SweepEntry:
    """한 ε 값의 시드별 실행"""

    epsilon: float
    runs: List[RunResult] = field(default_factory=list)

    @property
    def epochs_to_target(self) -> List[Optional[int]]:
        return [r.epochs_to_target for r in self.runs]

    def near_optimum(self, column: str = "g_hidden") -> List[float]:
        return [near_optimum_norm(r, column) for r in self.runs]

    def median_near_optimum(self, column: str = "g_hidden") -> float:
        return median([v for v in self.near_optimum(column) if not math.isnan(v)])

    def median_epochs(self, max_epochs: int) -> float:
        """미도달은 max_epochs + 1 로 계산한 중앙값"""
        return median([e if e is not None else max_epochs + 1 for e in self.epochs_to_target])


@dataclass
class SweepResult:
    """ε별 학습 곡선, 도달 에포크, 최적점 근방 기울기"""

    entries: List[SweepEntry]
    out_dir: Optional[Path] = None

    def entry(self, epsilon: float) -> SweepEntry:
        for e in self.entries:
            if e.epsilon == epsilon:
                return e
        raise KeyError(epsilon)

    def rows(self) -> List[Dict[str, Any]]:
        rows: List[Dict[str, Any]] = []
        for entry in self.entries:
            for run in entry.runs:
                rows.append({
                    "epsilon": entry.epsilon,
                    "seed": run.seed,
                    "epochs_to_target": run.epochs_to_target if run.reached else NOT_REACHED,
                    "near_opt_g_first": near_optimum_norm(run, "g_first"),
                    "near_opt_g_hidden": near_optimum_norm(run, "g_hidden"),
                    "failed": "true" if run.failed else "false",
                })
        return rows


def sweep_jobs(cfg: ExperimentConfig, epsilons: Sequence[float], out: Path, data: DenoiseData) -> List[DenoiseJob]:
    jobs = []
    for eps in epsilons:
        for seed in cfg.seeds:
            name = f"eps_{eps:g}/seed_{seed}"
            run_cfg = cfg.with_changes(name=f"{cfg.name}/{name}", epsilon=eps, seed=seed)
            jobs.append(DenoiseJob(cfg=run_cfg, out_dir=out / name, data=data))
    return jobs


def run_eps_sweep(
    cfg: ExperimentConfig,
    out: Optional[Union[str, Path]] = None,
    data: Optional[DenoiseData] = None,
) -> SweepResult:
    """epsilon_list × seeds 디노이징, sweep.csv 요약"""
    if cfg.method != "sinkhorn_gan":
        raise ConfigError(f"epsilon sweep needs method=sinkhorn_gan, got {cfg.method}", key="method")
    out_dir = run_dir(cfg, out)
    data = data if data is not None else load_denoise_data(cfg)

    jobs = sweep_jobs(cfg, cfg.epsilon_list, out_dir, data)
    results = map_runs(denoise_job, jobs, worker_count(cfg, len(jobs)))

    entries = [SweepEntry(epsilon=eps) for eps in cfg.epsilon_list]
    for entry in entries:
        entry.runs = [r for r in results if r.epsilon == entry.epsilon]

    sweep = SweepResult(entries=entries, out_dir=out_dir)
    write_echo(cfg, out_dir)
    write_table(sweep.rows(), SWEEP_COLUMNS, out_dir / "sweep.csv")
    for entry in entries:
        logger.info(
            "eps_sweep eps=%g median_epochs=%s median_g_hidden=%.4g",
            entry.epsilon, entry.median_epochs(cfg.max_epochs), entry.median_near_optimum("g_hidden"),
        )
    return sweep
