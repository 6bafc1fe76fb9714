# -*- coding: utf-8 -*-
"""
Experiment Runner Module
========================

실행 결과 타입, 에포크 집계, 프로세스 풀 분산 실행, 출력 디렉터리 기록.
여러 (방법, ε, 시드) 실행은 독립적이며 결과는 작업 목록 순서로 병합된다.
"""

import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, TypeVar, Union

from ..config import settings
from ..data.metrics import MetricsRecord, format_cell, write_metrics_csv
from ..errors import DataIOError
from .config import ExperimentConfig, write_echo

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

NOT_REACHED = "not reached"

# 에포크 평균 대상 (학습 스텝에서 나오는 항)
STEP_FIELDS = ("g_first", "g_hidden", "L_P", "L_str", "L_ADV", "L_OT", "L_DA")


@dataclass
class RunResult:
    """단일 학습 실행 결과"""

    name: str
    method: str
    seed: int
    epsilon: float
    records: List[MetricsRecord] = field(default_factory=list)
    epochs_to_target: Optional[int] = None
    failed: bool = False
    out_dir: Optional[Path] = None

    @property
    def reached(self) -> bool:
        return self.epochs_to_target is not None

    def series(self, name: str) -> List[float]:
        """실패 행을 제외한 한 열의 값"""
        values = []
        for rec in self.records:
            v = getattr(rec, name)
            if not rec.failed and v is not None:
                values.append(float(v))
        return values

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "method": self.method,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "epochs": len(self.records),
            "epochs_to_target": self.epochs_to_target if self.reached else NOT_REACHED,
            "failed": self.failed,
        }


def mean_record(steps: Sequence[MetricsRecord], epoch: int) -> MetricsRecord:
    """스텝 레코드들의 항별 평균 (값이 없는 항은 None 유지)"""
    values: Dict[str, Optional[float]] = {}
    for name in STEP_FIELDS:
        vals = [float(getattr(s, name)) for s in steps if getattr(s, name) is not None]
        values[name] = math.fsum(vals) / len(vals) if vals else None
    return MetricsRecord(epoch=epoch, **values)  # type: ignore[arg-type]


def median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    if not ordered:
        return math.nan
    mid = len(ordered) // 2
    return ordered[mid] if len(ordered) % 2 else 0.5 * (ordered[mid - 1] + ordered[mid])


def run_dir(cfg: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> Path:
    """기본 출력 위치: <runs_dir>/<name>"""
    return Path(out) if out is not None else Path(settings.runs_dir) / cfg.name


def write_run(result: RunResult, cfg: ExperimentConfig, out_dir: Union[str, Path]) -> Path:
    """metrics.csv + config.echo 기록"""
    out = Path(out_dir)
    write_metrics_csv(result.records, out / "metrics.csv")
    write_echo(cfg, out)
    result.out_dir = out
    return out


def write_table(rows: Sequence[Mapping[str, Any]], columns: Sequence[str], path: Union[str, Path]) -> Path:
    """요약 CSV (sweep.csv, comparison.csv, ablation.csv, smoothness.csv)"""
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            value = row.get(col)
            cells.append(value if isinstance(value, str) else format_cell(value))
        lines.append(",".join(cells))
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    return path


def worker_count(cfg: ExperimentConfig, jobs: int) -> int:
    limit = cfg.workers if cfg.workers is not None else settings.threads
    return max(1, min(int(limit), jobs))


def map_runs(fn: Callable[[T], R], jobs: Sequence[T], workers: int) -> List[R]:
    """독립 실행을 프로세스 풀로 분산, 결과는 jobs 순서"""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    logger.info("map_runs jobs=%d workers=%d", len(jobs), workers)
    with Pool(processes=workers) as pool:
        return pool.map(fn, jobs)

