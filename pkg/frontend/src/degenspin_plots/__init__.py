"""Figure rendering for degenspin sweep outputs (CSV in, SVG/PNG out)."""

__version__ = "0.1.0"

from .figures import FIGURE_KINDS, FigureError, FigureSpec, render
from .cli import render_run_dir
