"""Exact desk-scale checks for hypercovers, basis refinements and hyperdescent
on finite topological spaces."""

from .descent import (
    SetPresheaf,
    check_hypersheaf,
    check_sheaf,
    check_sheaf_on_basis,
    hypercover_suite,
    limit_over_hypercover,
    limit_over_poset,
    right_kan_extend,
    roundtrip_theorem_check,
)
from .homotopy import FinitePoset, PosetMap, check_coinitial, is_weakly_contractible, nerve
from .hypercover import Hypercover, cech_from_cover, check_hypercover, refine_to_basis
from .simplicial import FiniteTypeSimplicialSet, SimplexRef
from .symmetrization import SymElement, minimal_representative, symmetrize
from .topology import Basis, FiniteSpace, minimal_basis

__version__ = "0.1.0"
