# -*- coding: utf-8 -*-
"""
Plot Command
============

sinkdem plot runs/a/metrics.csv [runs/b/metrics.csv ...] [--out DIR]
"""

import argparse
from pathlib import Path

from ..plot import plot_metrics
from .common import EXIT_OK, resolve_config


def handle(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    out = Path(args.out) if args.out else Path(args.csv[0]).parent
    for path in plot_metrics(args.csv, out, window=cfg.plot_window):
        print(path)
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("plot", help="metrics.csv → SVG 그래프")
    parser.add_argument("csv", nargs="+", metavar="CSV", help="metrics.csv 경로 (여러 개면 겹쳐 그리기)")
    parser.add_argument("--out", metavar="DIR", help="SVG 출력 디렉터리 (기본: 첫 CSV 디렉터리)")
    parser.add_argument("--config", metavar="PATH", help="plot_window 등을 읽을 설정 파일")
    parser.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], help="설정 재정의")
    parser.set_defaults(handler=handle)
