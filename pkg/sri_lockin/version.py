#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - a toolkit for stochastic recursive inclusions & their lock-in."""

__version__ = "0.1.0"
