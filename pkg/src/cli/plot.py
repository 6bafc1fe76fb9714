# -*- coding: utf-8 -*-
"""
SVG Plot Module
===============

metrics.csv → 독립 SVG 패널. CSV만의 순수 함수이며 같은 입력이면 바이트 단위로 같다.

패널:
- loss.svg: 손실 항 (L_P, L_str, L_ADV, L_OT, L_DA) 과 테스트 mse
- grad_norms.svg: 첫 층/은닉층 기울기 스펙트럴 노름
- overlay_<열>.svg: 여러 CSV (예: ε별 실행) 겹쳐 그리기, 범례는 실행 디렉터리 이름
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape

from src.sinkdem.data import MetricsRecord, read_metrics_csv
from src.sinkdem.errors import DataIOError, ValidationError

WIDTH, HEIGHT = 640, 400
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 150, 40, 50

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")

LOSS_COLUMNS = ("L_P", "L_str", "L_ADV", "L_OT", "L_DA", "mse")
GRAD_COLUMNS = ("g_first", "g_hidden")
OVERLAY_COLUMNS = ("mse", "g_hidden", "g_first")

PathLike = Union[str, Path]


@dataclass
class Series:
    """그릴 (epoch, value) 점열"""

    label: str
    points: List[Tuple[float, float]]


def moving_average(values: Sequence[float], window: int) -> List[float]:
    """후행 이동 평균 (앞쪽은 가용 점만 평균)"""
    if window < 1:
        raise ValidationError(f"moving-average window must be >= 1, got {window}")
    out: List[float] = []
    for i in range(len(values)):
        chunk = values[max(0, i - window + 1): i + 1]
        out.append(math.fsum(chunk) / len(chunk))
    return out


def column_series(records: Sequence[MetricsRecord], column: str, label: str, window: int) -> Optional[Series]:
    """실패 행과 빈/비유한 값을 제외한 한 열 (점이 없으면 None)"""
    epochs: List[float] = []
    values: List[float] = []
    for rec in records:
        v = getattr(rec, column)
        if rec.failed or v is None or not math.isfinite(float(v)):
            continue
        epochs.append(float(rec.epoch))
        values.append(float(v))
    if not values:
        return None
    return Series(label=label, points=list(zip(epochs, moving_average(values, window))))


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick(v: float) -> str:
    return f"{v:.4g}"


def render_svg(title: str, series: Sequence[Series], x_label: str = "epoch", y_label: str = "value") -> str:
    """선 그래프 SVG 문자열 (축, 눈금, 범례 포함)"""
    xs = [x for s in series for x, _ in s.points] or [0.0, 1.0]
    ys = [y for s in series for _, y in s.points] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        pad = abs(y0) * 0.05 or 0.5
        y0, y1 = y0 - pad, y1 + pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x: float) -> float:
        return MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w

    def py(y: float) -> float:
        return MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * plot_h

    bottom = MARGIN_TOP + plot_h
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line class="axis" x1="{MARGIN_LEFT}" y1="{bottom}" x2="{MARGIN_LEFT + plot_w}" y2="{bottom}" stroke="black"/>',
        f'<line class="axis" x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}" stroke="black"/>',
        f'<text class="x-label" x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle" '
        f'font-size="12">{escape(x_label)}</text>',
        f'<text class="y-label" x="16" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.1f})">{escape(y_label)}</text>',
    ]

    for i in range(5):
        fx = x0 + (x1 - x0) * i / 4
        fy = y0 + (y1 - y0) * i / 4
        lines.append(
            f'<text x="{_fmt(px(fx))}" y="{bottom + 16}" text-anchor="middle" font-size="10">{_tick(fx)}</text>'
        )
        lines.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{_fmt(py(fy) + 3)}" text-anchor="end" font-size="10">{_tick(fy)}</text>'
        )

    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in s.points)
        lines.append(f'<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN_TOP + 14 + 18 * k
        lx = MARGIN_LEFT + plot_w + 12
        lines.append(
            f'<g class="legend-entry"><line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/><text x="{lx + 24}" y="{ly}" font-size="11">'
            f"{escape(s.label)}</text></g>"
        )

    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    return path


def _panel(records: Sequence[MetricsRecord], columns: Sequence[str], window: int) -> List[Series]:
    found = (column_series(records, c, c, window) for c in columns)
    return [s for s in found if s is not None]


def run_label(csv_path: Path) -> str:
    """겹쳐 그리기 범례: metrics.csv 의 상위 디렉터리 경로 일부"""
    parent = csv_path.parent
    return f"{parent.parent.name}/{parent.name}" if parent.parent.name else parent.name


def plot_metrics(csv_paths: Sequence[PathLike], out_dir: PathLike, window: int = 10) -> List[Path]:
    """CSV 하나면 loss/grad_norms, 여러 개면 열별 겹쳐 그리기 패널 추가"""
    paths = [Path(p) for p in csv_paths]
    if not paths:
        raise ValidationError("plot needs at least one metrics CSV")
    runs: Dict[str, List[MetricsRecord]] = {}
    for i, p in enumerate(paths):
        label = run_label(p) if len(paths) > 1 else p.stem
        if label in runs:
            label = f"{label} #{i + 1}"
        runs[label] = read_metrics_csv(p)

    out = Path(out_dir)
    written: List[Path] = []
    if len(paths) == 1:
        records = next(iter(runs.values()))
        written.append(_write(out / "loss.svg", render_svg("training losses", _panel(records, LOSS_COLUMNS, window),
                                                           y_label="loss")))
        written.append(_write(out / "grad_norms.svg",
                              render_svg("generator gradient spectral norms", _panel(records, GRAD_COLUMNS, window),
                                         y_label="spectral norm")))
        return written

    for column in OVERLAY_COLUMNS:
        series = [s for s in (column_series(recs, column, label, window) for label, recs in runs.items()) if s]
        written.append(_write(out / f"overlay_{column}.svg", render_svg(f"{column} per run", series, y_label=column)))
    return written
