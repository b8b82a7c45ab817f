"""Finite groups given by Cayley tables: lattices, decompositions, invariants."""

from .cayley import (
    CayleyGroup,
    Subgroup,
    abelian,
    all_subgroups,
    alternating,
    axiom_violation,
    center,
    centralizer,
    commutator_subgroup,
    cyclic,
    dicyclic,
    dihedral,
    direct_power,
    direct_product,
    from_permutations,
    hypercenter,
    is_internal_direct_product,
    normal_subgroups,
    quaternion,
    quotient,
    symmetric,
    upper_central_series,
)
from .invariants import FreeGroupSpec, kn, kn_free, qm_bound, small_group_catalog
from .iso import all_isomorphisms, automorphisms, fingerprint, is_isomorphic, isomorphism
from .remak import (
    FactorLabel,
    FactorMultiset,
    RemakDecomposition,
    all_decompositions,
    direct_factor_pairs,
    identify,
    image_law_holds,
    is_indecomposable,
    remak_decompose,
)
