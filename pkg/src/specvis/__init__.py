"""Visibility graphs of sequences and magnitude spectra."""

from .errors import ConfigError, IngestionError, SpecvisError, UsageError, ValidationError
from .vgraph import (
    VisibilityGraph,
    build,
    build_dc,
    build_naive,
    degree_distribution,
    degree_vector,
    sequence_degrees,
    visible,
)

__version__ = "0.1.0"
