"""Zigzag generalized rank invariant landscapes for time-varying data."""

from zzgril.errors import ParameterError, StructuralError, ZzGrilError

__version__ = "0.1.0"

__all__ = ["ParameterError", "StructuralError", "ZzGrilError", "__version__"]
