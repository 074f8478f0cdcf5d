"""Finite-model toolkit for De Morgan bisemilattices.

Submodules:

* :mod:`dmbl.terms` — term/identity syntax, polarity and identity classes
* :mod:`dmbl.finalg` — finite algebras: evaluation, congruences, isomorphism
* :mod:`dmbl.catalog` — the eleven subdirectly irreducible algebras & friends
* :mod:`dmbl.sums` — sums over involutive semilattice direct systems
* :mod:`dmbl.decomp` — band decomposition back into a direct system
* :mod:`dmbl.varieties` — the subvariety lattice and its verification
* :mod:`dmbl.cli` — command line interface
"""

from .terms import (
    Identity,
    IdentityClass,
    Meet,
    Join,
    Neg,
    ParseError,
    PolaritySets,
    Term,
    Var,
    classify,
    dualise,
    dualise_identity,
    parse,
    parse_identity,
    parse_term,
    polarities,
    print_identity,
    print_term,
    variables,
)

__all__ = [
    "Identity",
    "IdentityClass",
    "Meet",
    "Join",
    "Neg",
    "ParseError",
    "PolaritySets",
    "Term",
    "Var",
    "classify",
    "dualise",
    "dualise_identity",
    "parse",
    "parse_identity",
    "parse_term",
    "polarities",
    "print_identity",
    "print_term",
    "variables",
]

__version__ = "0.1.0"
