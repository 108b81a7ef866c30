"""Exact verification of polynomial and finite element elasticity complexes."""
from .exactpoly import MatPoly, Polynomial, Simplex, SymMatPoly, VecPoly
from .polyspaces import SpaceBasis, SpaceSpec, build_basis, operator_matrix, verify_complex

__version__ = "0.1.0"

__all__ = ["Polynomial", "VecPoly", "MatPoly", "SymMatPoly", "Simplex", "SpaceBasis", "SpaceSpec",
           "build_basis", "operator_matrix", "verify_complex", "__version__"]
