# -*- coding: utf-8 -*-
"""python -m src.cli"""

from .main import run

run()
