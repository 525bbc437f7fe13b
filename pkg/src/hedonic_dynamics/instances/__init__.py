"""Bundled game instances: the verified catalog, problem reductions, and
seeded random generation.  Everything ships as a :class:`NamedInstance` whose
claims can be re-checked with :func:`verify_instance`.
"""

from .catalog import (
    CATALOG_IDS,
    Claim,
    ClaimFailed,
    NamedInstance,
    UnknownId,
    build,
    build_homogeneous_block_script,
    catalog_ids,
    check_claim,
    clique_blocks,
    script_directory,
    triangle_ring_weights,
    verify_instance,
    walk_moves,
)
from .randgen import GENERATOR_KINDS, InconsistentRestrictions, random
from .reductions import (
    ConstantInequalityViolation,
    FormulaClassViolation,
    REDUCTION_KINDS,
    ReductionError,
    ReductionTooLarge,
    SatFormula,
    UnknownReductionKind,
    X3CInstance,
    brute_force_sat,
    brute_force_x3c,
    reduce,
    toy_formula_catalog,
    variable_gadget_cycle,
)

__all__ = [
    "CATALOG_IDS",
    "Claim",
    "ClaimFailed",
    "ConstantInequalityViolation",
    "FormulaClassViolation",
    "GENERATOR_KINDS",
    "InconsistentRestrictions",
    "NamedInstance",
    "REDUCTION_KINDS",
    "ReductionError",
    "ReductionTooLarge",
    "SatFormula",
    "UnknownId",
    "UnknownReductionKind",
    "X3CInstance",
    "brute_force_sat",
    "brute_force_x3c",
    "build",
    "build_homogeneous_block_script",
    "catalog_ids",
    "check_claim",
    "clique_blocks",
    "random",
    "reduce",
    "script_directory",
    "toy_formula_catalog",
    "triangle_ring_weights",
    "variable_gadget_cycle",
    "verify_instance",
    "walk_moves",
]
