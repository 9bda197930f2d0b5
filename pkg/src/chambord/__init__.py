"""Braided strand diagram calculus over arboreal semigroup presentations.

The package splits along the natural layers: ``grammar`` (presentations and
forests), ``braid`` (the cylinder braid groups and their word problem),
``diagram`` (closed diagrams, dipole reduction, the group law),
``complex`` (clopen diagrams and the vertex cube complex), ``action`` (the
group action, stabilisers, and the strand projection), and ``cli``.
"""

from . import action, braid, complex, diagram, grammar
from .diagram import ClosedDiagram
from .errors import ChambordError
from .grammar import PForest, Presentation, catalog, eta, parse_presentation

__all__ = [
    "ChambordError",
    "ClosedDiagram",
    "PForest",
    "Presentation",
    "action",
    "braid",
    "catalog",
    "complex",
    "diagram",
    "eta",
    "grammar",
    "parse_presentation",
]
