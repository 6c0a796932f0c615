"""Exception types shared across the package."""


class ZzGrilError(Exception):
    """Base class for all package errors."""


class ParameterError(ZzGrilError, ValueError):
    """A caller-supplied parameter is out of range or inconsistent."""


class StructuralError(ZzGrilError):
    """Input data violates a structural invariant (closure, legality, format)."""
