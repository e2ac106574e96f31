"""Isogeny graphs over finite fields and p-adic dynamics on residue discs.

Subpackages: fields (finite field towers), curves (elliptic curves and
isogenies), quadforms (class groups), volcano (ordinary isogeny volcanoes),
ssgraph (supersingular level graphs), padics (fixed-precision p-adics),
discdyn (disc automorphisms and unit-group walks), markov (exact chain
analysis), cli (the heckedyn command).
"""

__version__ = "0.1.0"

from .padics import DEFAULT_PRECISION, PadicNumber, WqElement  # noqa: F401
from .quadforms import QuadForm, class_group, hurwitz_class_number  # noqa: F401
from .ssgraph import build_ssgraph, graph_report  # noqa: F401
from .volcano import build_empirical, build_synthetic  # noqa: F401
