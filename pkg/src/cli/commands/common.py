# -*- coding: utf-8 -*-
"""
Common Command Helpers
======================

공통 플래그 (--config, --set, --out), 설정 해석, 종료 코드.
"""

import argparse
from pathlib import Path
from typing import Dict, Optional, Sequence

from src.sinkdem.errors import ConfigError
from src.sinkdem.experiments import ExperimentConfig, build_config, parse_override, read_config_file

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="key=value 실험 설정 파일")
    parser.add_argument(
        "--set", metavar="KEY=VALUE", action="append", default=[],
        help="설정 재정의 (반복 가능, 파일 파싱 이후 적용)",
    )
    parser.add_argument("--out", metavar="DIR", help="출력 디렉터리 (기본: runs/<name>)")


def resolve_config(args: argparse.Namespace, kinds: Optional[Sequence[str]] = None) -> ExperimentConfig:
    """파일 → --set 순으로 병합, 실험 종류가 없으면 하위 명령 기본값"""
    raw: Dict[str, str] = read_config_file(args.config) if args.config else {}
    for item in args.set:
        key, value = parse_override(item)
        raw[key] = value
    if kinds:
        kind = raw.get("experiment")
        if kind is None:
            raw["experiment"] = kinds[0]
        elif kind not in kinds:
            raise ConfigError(
                f"experiment={kind} does not match subcommand '{args.command}' (expected {', '.join(kinds)})",
                key="experiment",
            )
    return build_config(raw)


def out_path(args: argparse.Namespace) -> Optional[Path]:
    return Path(args.out) if args.out else None
