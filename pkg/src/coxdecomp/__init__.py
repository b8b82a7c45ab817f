"""Direct-product decompositions of Coxeter groups, with brute-force oracles.

Submodules: ``exact`` (cyclotomic arithmetic and exact signatures),
``coxeter`` (systems, classification, group enumeration), ``grouptheory``
(Cayley-table groups, Remak decomposition, invariants), ``decomp``
(factorization rules and cross-validation), ``liealg`` (Lie algebras of
B-isometries and centroid decomposition) and ``cli``.
"""

from .coxeter import CoxeterSystem, build_group, classify, finite_type, affine_type
from .decomp import cross_validate, decompose
from .errors import BudgetExceeded, ConsistencyError, CoxDecompError, ParseError, ValidationError
from .exact import CycloNumber, Signature, signature

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "ConsistencyError",
    "CoxDecompError",
    "CoxeterSystem",
    "CycloNumber",
    "ParseError",
    "Signature",
    "ValidationError",
    "affine_type",
    "build_group",
    "classify",
    "cross_validate",
    "decompose",
    "finite_type",
    "signature",
]
