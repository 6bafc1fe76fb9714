# -*- coding: utf-8 -*-
"""
Tests Package
=============

sinkdem 테스트 스위트.
"""
