"""
Utilities Package
=================

Console output and seeding helpers shared by every subpackage.
"""

from .console import console, set_verbose, is_verbose, progress
from .seeding import derive_seed, make_rng

__all__ = ['console', 'set_verbose', 'is_verbose', 'progress', 'derive_seed', 'make_rng']
