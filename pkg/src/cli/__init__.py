# -*- coding: utf-8 -*-
"""
sinkdem CLI Package
===================

명령행 진입점과 SVG 플롯.
"""

from .main import build_parser, main, run

__all__ = ["build_parser", "main", "run"]
