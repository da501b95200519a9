#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Exception classes shared by the simulation modules.

Each class derives from the builtin exception a caller would already expect
(ValueError for bad inputs, ArithmeticError for non-finite numbers, RuntimeError
for a run that blew up), so code that catches the builtin keeps working.
"""


class DimensionError(ValueError):
    """A vector or matrix does not have the length or shape the operation needs."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or holds an invalid value."""


class AssumptionError(ValueError):
    """A known gain bound fell to or below its positive lower bound."""

    def __init__(self, message, level=None, t=None):
        super().__init__(message)
        self.level = level
        self.t = t


class NumericError(ArithmeticError):
    """A computation produced NaN or Inf."""

    def __init__(self, message, t=None, level=None):
        super().__init__(message)
        self.t = t
        self.level = level


class DivergenceError(RuntimeError):
    """A recorded norm crossed the blow-up guard during a simulation."""

    def __init__(self, message, t=None, quantity=None):
        super().__init__(message)
        self.t = t
        self.quantity = quantity
