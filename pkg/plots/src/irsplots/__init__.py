"""Figure rendering for the IRS experiment CSV tables."""

from .render import FIGURES, FigureSpec, SchemaMismatch, load_table, render

__all__ = ["FIGURES", "FigureSpec", "SchemaMismatch", "load_table", "render"]

__version__ = "0.1.0"
