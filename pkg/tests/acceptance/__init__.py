# -*- coding: utf-8 -*-
"""
Acceptance Tests Package
========================
"""
