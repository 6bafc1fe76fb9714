# -*- coding: utf-8 -*-
"""
Baselines Module
================

같은 생성자/판별자 본체와 같은 시드로 목적함수만 바꿔 수렴 비교.
plain GAN, WGAN (클리핑), WGAN-GP, Sinkhorn-GAN.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .config import ExperimentConfig, write_echo
from .denoise import DenoiseData, load_denoise_data
from .runner import NOT_REACHED, RunResult, map_runs, median, run_dir, worker_count, write_table
from .sweep import DenoiseJob, denoise_job, near_optimum_norm

logger = logging.getLogger(__name__)

COMPARISON_COLUMNS = ("method", "seed", "epochs_to_target", "final_mse", "near_opt_g_hidden", "failed")


@dataclass
class ComparisonResult:
    """방법별 시드 실행 묶음"""

    runs: Dict[str, List[RunResult]] = field(default_factory=dict)
    max_epochs: int = 500
    out_dir: Optional[Path] = None

    def median_epochs(self, method: str) -> float:
        """미도달은 max_epochs + 1"""
        return median([
            r.epochs_to_target if r.epochs_to_target is not None else self.max_epochs + 1
            for r in self.runs[method]
        ])

    def rows(self) -> List[Dict[str, Any]]:
        rows: List[Dict[str, Any]] = []
        for method, runs in self.runs.items():
            for run in runs:
                mse = run.series("mse")
                rows.append({
                    "method": method,
                    "seed": run.seed,
                    "epochs_to_target": run.epochs_to_target if run.reached else NOT_REACHED,
                    "final_mse": mse[-1] if mse else None,
                    "near_opt_g_hidden": near_optimum_norm(run, "g_hidden"),
                    "failed": "true" if run.failed else "false",
                })
            rows.append({"method": method, "seed": "median", "epochs_to_target": self.median_epochs(method)})
        return rows


def run_baselines(
    cfg: ExperimentConfig,
    out: Optional[Union[str, Path]] = None,
    data: Optional[DenoiseData] = None,
) -> ComparisonResult:
    """methods × seeds 디노이징, comparison.csv 요약"""
    out_dir = run_dir(cfg, out)
    data = data if data is not None else load_denoise_data(cfg)

    jobs: List[DenoiseJob] = []
    for method in cfg.methods:
        for seed in cfg.seeds:
            name = f"{method}/seed_{seed}"
            run_cfg = cfg.with_changes(name=f"{cfg.name}/{name}", method=method, seed=seed)
            jobs.append(DenoiseJob(cfg=run_cfg, out_dir=out_dir / name, data=data))

    results = map_runs(denoise_job, jobs, worker_count(cfg, len(jobs)))
    comparison = ComparisonResult(max_epochs=cfg.max_epochs, out_dir=out_dir)
    for method in cfg.methods:
        comparison.runs[method] = [r for r in results if r.method == method]

    write_echo(cfg, out_dir)
    write_table(comparison.rows(), COMPARISON_COLUMNS, out_dir / "comparison.csv")
    for method in cfg.methods:
        logger.info("baselines method=%s median_epochs=%s", method, comparison.median_epochs(method))
    return comparison
