# -*- coding: utf-8 -*-
"""
Data Package
============

데이터 입출력과 합성.
MNIST IDX, 합성 지형/열화/prior, SDEM·PGM 래스터, 평가 지표와 metrics.csv.
"""

from .metrics import (
    METRICS_HEADER,
    MetricsRecord,
    eval_metrics,
    format_cell,
    format_metrics_csv,
    read_metrics_csv,
    write_metrics_csv,
)
from .mnist import MnistSet, encode_idx, load_mnist, parse_idx, read_idx
from .rasters import RasterF32, read_raster, write_pgm_preview, write_raster
from .terrain import degrade, gen_terrain, hillshade_prior, make_patch_triplet

__all__ = [
    "MnistSet",
    "read_idx",
    "parse_idx",
    "encode_idx",
    "load_mnist",
    "RasterF32",
    "read_raster",
    "write_raster",
    "write_pgm_preview",
    "gen_terrain",
    "degrade",
    "hillshade_prior",
    "make_patch_triplet",
    "MetricsRecord",
    "METRICS_HEADER",
    "eval_metrics",
    "format_metrics_csv",
    "format_cell",
    "write_metrics_csv",
    "read_metrics_csv",
]
