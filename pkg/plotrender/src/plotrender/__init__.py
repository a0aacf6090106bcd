"""Figures from arraynmi sweep CSVs."""

from .render import FigureRecipe, RenderError, build_figure, main, render

__version__ = "0.1.0"

__all__ = ["FigureRecipe", "RenderError", "build_figure", "render", "main"]
