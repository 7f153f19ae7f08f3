"""Ordinal-indexed family combinatorics on finite and lazy-infinite sets,
the repeated-averages hierarchy, explicit norms on finitely supported
rational vectors, and convex-minimization certificates."""

__version__ = "0.1.0"

from . import families, ordinals, ravg, spaces, weaknull  # noqa: F401
