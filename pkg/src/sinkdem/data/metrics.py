# -*- coding: utf-8 -*-
"""
Metrics Module
==============

평가 지표 (RMSE/MAE/PSNR/SSIM) 와 에포크별 metrics.csv 기록.
CSV 헤더는 고정:
    epoch,wallclock_s,mse,rmse,mae,psnr,ssim,g_first,g_hidden,L_P,L_str,L_ADV,L_OT,L_DA
"""

import csv
import io
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np

from ..errors import DataIOError, FormatError, ShapeError
from ..losses import SsimConfig, mean_ssim

METRICS_HEADER = (
    "epoch", "wallclock_s", "mse", "rmse", "mae", "psnr", "ssim",
    "g_first", "g_hidden", "L_P", "L_str", "L_ADV", "L_OT", "L_DA",
)

PathLike = Union[str, Path]


@dataclass
class MetricsRecord:
    """에포크별 지표 행 (None = 해당 없음)"""

    epoch: int
    wallclock_s: float = 0.0
    mse: Optional[float] = None
    rmse: Optional[float] = None
    mae: Optional[float] = None
    psnr: Optional[float] = None
    ssim: Optional[float] = None
    g_first: Optional[float] = None
    g_hidden: Optional[float] = None
    L_P: Optional[float] = None
    L_str: Optional[float] = None
    L_ADV: Optional[float] = None
    L_OT: Optional[float] = None
    L_DA: Optional[float] = None
    failed: bool = False

    @classmethod
    def failure(cls, epoch: int, wallclock_s: float = 0.0) -> "MetricsRecord":
        """발산한 실행의 실패 행 (모든 지표 nan)"""
        nan = float("nan")
        values = {name: nan for name in METRICS_HEADER[2:]}
        return cls(epoch=epoch, wallclock_s=wallclock_s, failed=True, **values)

    def merge(self, other: "MetricsRecord") -> "MetricsRecord":
        """other의 값이 있는 필드로 덮어쓴 새 레코드"""
        changes = {
            f.name: getattr(other, f.name)
            for f in fields(other)
            if f.name not in ("epoch", "failed") and getattr(other, f.name) is not None
        }
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in METRICS_HEADER}


def eval_metrics(pred: Any, truth: Any, data_range: float = 1.0, ssim_cfg: Optional[SsimConfig] = None) -> MetricsRecord:
    """RMSE, MAE, PSNR(dB), SSIM(%) 계산 (mse 0이면 psnr = inf)"""
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if p.shape != t.shape:
        raise ShapeError(f"prediction shape {p.shape} != truth shape {t.shape}")

    diff = p - t
    mse = float(np.mean(diff * diff))
    mae = float(np.mean(np.abs(diff)))
    psnr = math.inf if mse == 0.0 else 10.0 * math.log10(data_range**2 / mse)

    cfg = ssim_cfg or SsimConfig(dynamic_range=data_range)
    ssim_pct: Optional[float] = None
    if min(p.shape[-2:]) >= cfg.window_size:
        ssim_pct = 100.0 * mean_ssim(p, t, cfg)

    return MetricsRecord(epoch=0, mse=mse, rmse=math.sqrt(mse), mae=mae, psnr=psnr, ssim=ssim_pct)


def format_cell(value: Any) -> str:
    """CSV 셀 표기 (None → 빈 칸, 실수는 %.10g)"""
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.10g}"


def format_metrics_csv(records: Iterable[MetricsRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRICS_HEADER)
    for rec in records:
        writer.writerow([format_cell(getattr(rec, name)) for name in METRICS_HEADER])
    return buf.getvalue()


def write_metrics_csv(records: Iterable[MetricsRecord], path: PathLike) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(format_metrics_csv(records), encoding="utf-8")
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    return path


def _parse(cell: str) -> Optional[float]:
    return None if cell == "" else float(cell)


def read_metrics_csv(path: PathLike) -> List[MetricsRecord]:
    """헤더가 정확히 일치해야 하며, 실패 행(nan)은 failed로 표시"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc

    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != METRICS_HEADER:
        raise FormatError(f"{path}: metrics header mismatch")

    records: List[MetricsRecord] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(METRICS_HEADER):
            raise FormatError(f"{path}:{lineno}: expected {len(METRICS_HEADER)} cells, got {len(row)}")
        try:
            values = {name: _parse(cell) for name, cell in zip(METRICS_HEADER[1:], row[1:])}
            epoch = int(row[0])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
        failed = all(v is not None and math.isnan(v) for k, v in values.items() if k != "wallclock_s")
        values["wallclock_s"] = values["wallclock_s"] or 0.0
        records.append(MetricsRecord(epoch=epoch, failed=failed, **values))  # type: ignore[arg-type]
    return records
