"""Exact finite metric spaces: amalgams, one-point extensions, discrete attachments and rigidity."""

from .space import MetricError, MetricSpace, make_space, restrict, validate_space

__all__ = ["MetricError", "MetricSpace", "make_space", "restrict", "validate_space"]
