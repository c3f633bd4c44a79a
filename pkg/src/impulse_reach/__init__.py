"""Reachable and attraction sets for impulse-constrained linear control.

Fuel-expenditure programs are nonnegative step functions of fixed total
impulse; their generalized closure consists of finitely additive measures
(step densities plus one-sided Dirac atoms).  The library computes moment
images, epsilon-relaxed reachable sets and the limiting attraction sets
exactly where the data are rational, and exposes a scenario-driven CLI.
"""

from .intervals import Cell, Interval, Partition
from .measures import FAMeasure, Side, SideAtom
from .piecewise import PiecewiseFn

__all__ = [
    "Cell",
    "FAMeasure",
    "Interval",
    "Partition",
    "PiecewiseFn",
    "Side",
    "SideAtom",
]

__version__ = "0.1.0"
