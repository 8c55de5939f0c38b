"""Isomorphism testing for Fitting-free groups given by Cayley tables."""

from __future__ import annotations

from .errors import FitFreeError
from .ff_iso import IsoSetReport, iso_fitting_free
from .group_core import CayleyGroup, group_from_permutations, group_from_table
from .perm_core import PermGroup
from .socle import decompose_socle, is_fitting_free

__all__ = [
    "CayleyGroup",
    "FitFreeError",
    "IsoSetReport",
    "PermGroup",
    "decompose_socle",
    "group_from_permutations",
    "group_from_table",
    "is_fitting_free",
    "iso_fitting_free",
]
__version__ = "0.1.0"
