"""Finite and Artinian local rings, their unit groups, and sections of R -> R/M."""

from .errors import LRUError
from .rings import build_ring, ring_axioms_check
from .local import local_structure
from .splitting import coefficient_section, tower_lift_section, unit_decomposition, unit_section

__all__ = ["LRUError", "build_ring", "ring_axioms_check", "local_structure", "coefficient_section",
           "tower_lift_section", "unit_decomposition", "unit_section"]
