# -*- coding: utf-8 -*-
"""
sinkdem CLI Application
=======================

메인 명령행 파서 및 하위 명령 등록.

종료 코드:
- 0: 성공
- 1: 입력/설정/포맷/입출력 오류
- 2: 런타임 수치 실패 (단일 실행 발산 포함)
"""

import argparse
import logging
import sys
from typing import NoReturn, Optional, Sequence

import pydantic

from src.sinkdem import __version__
from src.sinkdem.config import settings
from src.sinkdem.errors import DataIOError, FormatError, SinkdemError, ValidationError

from .commands import data, figures, ot, train
from .commands.common import EXIT_RUNTIME, EXIT_VALIDATION

logger = logging.getLogger("sinkdem")


class UsageError(ValidationError):
    """명령행 사용법 오류"""


class CliParser(argparse.ArgumentParser):
    """argparse 기본 종료 (코드 2) 대신 UsageError"""

    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(
        prog="sinkdem",
        description="Sinkhorn divergence training for generative models and DEM super-resolution",
    )
    parser.add_argument("--version", action="version", version=f"sinkdem {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    # 명령 등록
    ot.register(subparsers)
    train.register(subparsers)
    data.register(subparsers)
    figures.register(subparsers)
    return parser


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    try:
        args = build_parser().parse_args(argv)
        return int(args.handler(args))
    except (ValidationError, FormatError, DataIOError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except pydantic.ValidationError as exc:
        print(f"error: invalid settings: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        logger.error("i/o failure: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SinkdemError as exc:
        logger.error("runtime failure: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def run() -> NoReturn:
    sys.exit(main())
