"""Regenerates the experiment figures from persisted CSV/JSON artifacts.

This package never runs the solver: it consumes the artifact files emitted
by the experiment harness and fails loudly when they are missing or
malformed.
"""

from .errors import MissingSeries, SchemaError
from .figures import FigureRecipe, load_figure_data, render

__version__ = "0.1.0"
