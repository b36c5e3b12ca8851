"""Validated numerics for concave kite central configurations of four bodies.

Modules: ``interval`` (outward-rounded arithmetic), ``autodiff`` (forward
derivatives and Taylor jets over intervals), ``cc_equations`` (the kite and
full planar equations), ``krawczyk`` (existence and uniqueness tests),
``prover`` (branch-and-prune campaigns), ``bifurcation`` (fold and pitchfork
tests), ``continuation`` (curve points and solution sets), ``runs`` and
``cli`` (named certification runs and their command line).
"""

from .interval import Box, DomainError, Interval

__all__ = ["Box", "DomainError", "Interval"]
__version__ = "0.1.0"
