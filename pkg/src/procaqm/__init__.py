"""Proca fields as a pseudo-Hermitian quantum system.

Per-mode operator algebra, inner products, Foldy wave functions,
observables on momentum lattices, localized states, Lorentz behaviour and
the probability-preserving gauge group.
"""

from . import (errors, fields, inner_products, localized, mode_algebra, observables, relativity, specfun,
               symmetry_gauge, transforms, verification)
from .fields import DiscreteModeField, GridField, Lattice, evolve, read_field_file, write_field_file
from .inner_products import CANONICAL, GENERAL, SIGMA3, inner
from .mode_algebra import MetricParams, PhysicsConfig

__version__ = "0.1.0"

__all__ = [
    "errors", "fields", "inner_products", "localized", "mode_algebra", "observables", "relativity", "specfun",
    "symmetry_gauge", "transforms", "verification",
    "DiscreteModeField", "GridField", "Lattice", "evolve", "read_field_file", "write_field_file",
    "CANONICAL", "GENERAL", "SIGMA3", "inner", "MetricParams", "PhysicsConfig",
]
