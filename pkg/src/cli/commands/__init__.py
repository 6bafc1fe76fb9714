# -*- coding: utf-8 -*-
"""
CLI Commands Package
====================

모든 하위 명령 모듈 포함. 각 모듈은 register(subparsers) 로 명령을 등록한다.
"""

from . import data, figures, ot, train

__all__ = ["ot", "train", "data", "figures"]
