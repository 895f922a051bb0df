"""Figure regeneration for scanfdr experiment CSV outputs."""

from .render import KINDS, FigureSpec, SchemaError, read_gcurve, read_summary, render

__version__ = "0.1.0"
