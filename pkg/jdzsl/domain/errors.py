#!/usr/bin/env python3
"""
Error hierarchy shared by every layer

Data problems (bad shapes, invalid parameters, malformed files) and numerical
failures (divergence, degenerate problems) are kept apart so the entry point
can map them onto distinct exit codes.
"""


class JdzslError(Exception):
    pass


class UsageError(JdzslError):
    pass


class DataValidationError(JdzslError, ValueError):
    pass


class DimensionMismatchError(DataValidationError):
    pass


class UnderCompleteDictionaryError(DataValidationError):
    pass


class GraphConstructionError(DataValidationError):
    pass


class NumericalError(JdzslError, ArithmeticError):
    pass


class DegenerateDesignError(NumericalError):
    pass


class DivergenceError(NumericalError):
    pass


class DeadCodesError(NumericalError):
    pass
