"""Errors raised while reading experiment artifacts."""


class PlotError(Exception):
    """Base class for plotting failures."""


class SchemaError(PlotError):
    """An artifact file is missing, unreadable, or violates its schema."""


class MissingSeries(PlotError):
    """A figure needs a data series that the artifact directory lacks."""
