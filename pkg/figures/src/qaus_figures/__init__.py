"""Rendering layer for the adiabatic-search experiment artifacts.

Consumes only the CSV files written by the experiment drivers plus the
plot_params.json sidecar that sits next to them; no physics constants
are hard-coded here.
"""

from qaus_figures.render import FIGURES, SchemaError, render_figure

__all__ = ["FIGURES", "SchemaError", "render_figure"]
__version__ = "0.1.0"
