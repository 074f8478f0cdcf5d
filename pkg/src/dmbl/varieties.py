r"""The subvariety lattice of De Morgan bisemilattices.

Every variety handled here is recorded by its generators: the set of
subdirectly irreducible catalog algebras it contains (indices 1..11).  An
identity holds in such a variety iff it holds in every generator, so theory
questions reduce to finite table checks.  The module enumerates the
admissible generator sets, names the 23 resulting varieties, decides bounded
HSP membership with certificates, assembles the ordered lattice with a
verified separating identity on every covering pair, and re-checks the
generation results the whole picture rests on (:func:`verify_theorems`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .catalog import catalog_entries, entry, get_algebra
from .finalg import (
    CONGRUENCE_SIZE_LIMIT,
    FiniteAlgebra,
    ValidationError,
    congruences,
    is_isomorphic,
    is_subdirectly_irreducible,
    product,
    quotient,
    satisfies,
    subalgebra_generated,
)
from .sweep import (
    enumerate_terms,
    first_violation,
    partition_ids,
    same_partition,
    signatures,
    value_matrix,
)
from .terms import Identity, IdentityClass, classify, parse_identity

__all__ = [
    "ABSORPTION",
    "BISL_AXIOM",
    "B_ABS",
    "COLLAPSE",
    "CoverEdge",
    "HspResult",
    "R_ABS",
    "RB_ABS",
    "RBISL_AXIOM",
    "RISL_AXIOM",
    "SubvarietyLattice",
    "VarietyDescriptor",
    "all_varieties",
    "build_lattice",
    "classifier_sweep",
    "enumerate_generator_sets",
    "hsp_membership",
    "jonsson_check",
    "syntactic_vs_semantic",
    "variety",
    "variety_satisfies",
    "verify_theorems",
]


# ---------------------------------------------------------------------------
# named identities

ABSORPTION = "x = x /\\ (x \\/ y)"
R_ABS = "x /\\ (x \\/ y) = x /\\ (x \\/ ~y)"
B_ABS = "x /\\ (x \\/ ~x) = x /\\ (x \\/ ~x) /\\ (x \\/ ~x \\/ y)"
RB_ABS = "x /\\ (x \\/ ~x) /\\ (x \\/ ~x \\/ y) = x /\\ (x \\/ ~x) /\\ (x \\/ ~x \\/ ~y)"
COLLAPSE = "x /\\ y = x \\/ y"
RISL_AXIOM = "x = ~x"
BISL_AXIOM = "x \\/ ~x = (x \\/ ~x) \\/ y"
RBISL_AXIOM = "(x \\/ ~x) \\/ y = (x \\/ ~x) \\/ ~y"

#: the marker identities recorded on every descriptor, in this order
AXIOM_POOL = (
    ABSORPTION,
    R_ABS,
    B_ABS,
    RB_ABS,
    COLLAPSE,
    RISL_AXIOM,
    BISL_AXIOM,
    RBISL_AXIOM,
)

_BOOLEAN = "x /\\ (y \\/ ~y) = x"
_KLEENE = "(x /\\ ~x) /\\ (y \\/ ~y) = x /\\ ~x"
_ROW1 = "x /\\ ~x = y /\\ ~y"
_ROW2 = "x /\\ ~x = (x /\\ ~x) /\\ (y \\/ ~y)"
_ROW3 = "(x /\\ ~x) /\\ y = (x /\\ ~x) /\\ ~y"
_ROW4 = (
    "(x \\/ ~x) /\\ (y \\/ ~y) /\\ ((x /\\ ~x) \\/ (y /\\ ~y))"
    " = (x /\\ ~x) \\/ (y /\\ ~y)"
)
_ROW5 = (
    "(x /\\ ~x) /\\ ((x /\\ ~x) \\/ (y /\\ ~y))"
    " = (y /\\ ~y) /\\ ((y /\\ ~y) \\/ (x /\\ ~x))"
)
_DN_UP = "x /\\ ~x = y \\/ ~y"
_DN_EQ_UP = "x /\\ ~x = x \\/ ~x"
_BIP_VS_RBIP = "x /\\ (x \\/ y \\/ ~y) = x /\\ (x \\/ ~x)"
_BIP_VS_B = "x /\\ (x \\/ y \\/ ~y) = x /\\ (x \\/ ~x \\/ y)"

#: identities tried first when hunting a separating identity; the bounded
#: term sweep is the fallback, so this only needs the well-known witnesses
#: (several exceed the sweep's seven-node bound)
SEPARATOR_POOL = (
    "x = y",
    ABSORPTION,
    COLLAPSE,
    RISL_AXIOM,
    BISL_AXIOM,
    RBISL_AXIOM,
    R_ABS,
    B_ABS,
    RB_ABS,
    _BOOLEAN,
    _KLEENE,
    _ROW1,
    _ROW2,
    _ROW3,
    _ROW4,
    _ROW5,
    _DN_UP,
    _DN_EQ_UP,
    _BIP_VS_RBIP,
    _BIP_VS_B,
)


@lru_cache(maxsize=64)
def _parsed(text: str) -> Identity:
    return parse_identity(text)


# ---------------------------------------------------------------------------
# descriptors

@dataclass(frozen=True)
class VarietyDescriptor:
    """A variety given by name, generator set and its marker identities.

    `axioms` lists, in :data:`AXIOM_POOL` order, exactly the pool identities
    valid in the variety; it is derived from the generators, not chosen.
    """

    name: str
    generators: frozenset[int]
    axioms: tuple[str, ...]

    def generator_names(self) -> tuple[str, ...]:
        return tuple(entry(i).name for i in sorted(self.generators))

    def generator_algebras(self) -> tuple[FiniteAlgebra, ...]:
        return tuple(entry(i).algebra for i in sorted(self.generators))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "generators": sorted(self.generators),
            "generatorNames": list(self.generator_names()),
            "axioms": list(self.axioms),
        }


def _admissible(s: frozenset[int]) -> bool:
    # (a) the trivial algebra is in every variety
    if 1 not in s:
        return False
    # (b) only the varieties reaching outside the regular block are listed here
    if not s & {9, 10, 11}:
        return False
    # (c)-(i) subalgebra/quotient closure implications
    if 11 in s and not {9, 5} <= s:
        return False
    if 10 in s and 9 not in s:
        return False
    if 8 in s and not {7, 6, 5, 4, 3, 2} <= s:
        return False
    if 7 in s and not {6, 5, 3, 2} <= s:
        return False
    if 6 in s and not {5, 2} <= s:
        return False
    if 4 in s and not {3, 2} <= s:
        return False
    if 3 in s and 2 not in s:
        return False
    # (j)-(l) entry 10 is equationally inseparable from entry 9 beside 2,3,4
    if (10 in s and 2 in s) != (9 in s and 2 in s):
        return False
    if (10 in s and 3 in s) != (9 in s and 3 in s):
        return False
    if (10 in s and 4 in s) != (9 in s and 4 in s):
        return False
    # (m)-(o) a dagger algebra appears exactly when its two parts do
    if (6 in s) != ({2, 5} <= s):
        return False
    if (7 in s) != ({3, 5} <= s):
        return False
    if (8 in s) != ({4, 5} <= s):
        return False
    return True


def enumerate_generator_sets() -> list[frozenset[int]]:
    """All admissible generator sets meeting {9,10,11}, smallest first.

    Ordered by size, then lexicographically; there are exactly fifteen.
    """
    out = [
        s
        for bits in range(1, 1 << 11)
        if _admissible(s := frozenset(i + 1 for i in range(11) if bits >> i & 1))
    ]
    out.sort(key=lambda s: (len(s), tuple(sorted(s))))
    return out


# the eight varieties inside the regular block, with fixed generator sets
_REGULAR_BLOCK = (
    ("T", frozenset({1})),
    ("BA", frozenset({1, 2})),
    ("KL", frozenset({1, 2, 3})),
    ("DML", frozenset({1, 2, 3, 4})),
    ("R(T)", frozenset({1, 5})),
    ("R(BA)", frozenset({1, 2, 5, 6})),
    ("R(KL)", frozenset({1, 2, 3, 5, 6, 7})),
    ("R(DML)", frozenset({1, 2, 3, 4, 5, 6, 7, 8})),
)


def _reconstruct_name(s: frozenset[int]) -> str:
    base = "DML" if 4 in s else "KL" if 3 in s else "BA" if 2 in s else "T"
    if not s & {9, 10, 11}:
        return f"R({base})" if 5 in s else base
    if 10 in s and 2 not in s:
        if 11 in s:
            return "B^-(DML)"
        if 5 in s:
            return "R(Bip^-(DML))"
        return "Bip^-(DML)"
    if 11 in s:
        return f"B({base})"
    if 5 in s:
        return f"R(Bip({base}))"
    return f"Bip({base})"


def _axioms_for(gens: frozenset[int]) -> tuple[str, ...]:
    algebras = [entry(i).algebra for i in sorted(gens)]
    return tuple(
        text
        for text in AXIOM_POOL
        if all(satisfies(a, _parsed(text)) for a in algebras)
    )


@lru_cache(maxsize=1)
def all_varieties() -> tuple[VarietyDescriptor, ...]:
    """The 23 varieties, ordered by generator-set size then lexicographically."""
    named: list[tuple[str, frozenset[int]]] = list(_REGULAR_BLOCK)
    named += [(_reconstruct_name(s), s) for s in enumerate_generator_sets()]
    named.sort(key=lambda t: (len(t[1]), tuple(sorted(t[1]))))
    return tuple(
        VarietyDescriptor(name, gens, _axioms_for(gens)) for name, gens in named
    )


def variety(name: str) -> VarietyDescriptor:
    """Look a descriptor up by its exact name, e.g. "Bip^-(DML)"."""
    wanted = name.strip()
    for v in all_varieties():
        if v.name == wanted:
            return v
    known = ", ".join(v.name for v in all_varieties())
    raise ValidationError(f"unknown variety {name!r}; known: {known}")


def variety_satisfies(v: VarietyDescriptor | str, e: Identity | str) -> bool:
    """Does the identity hold in every generator of the variety?"""
    if isinstance(v, str):
        v = variety(v)
    if isinstance(e, str):
        e = parse_identity(e)
    return all(bool(satisfies(a, e)) for a in v.generator_algebras())


# ---------------------------------------------------------------------------
# syntactic classes against their test algebras

_SEMANTIC_TESTS = (
    ("regular", IdentityClass.REGULAR, "IS2"),
    ("balanced-regular", IdentityClass.BALANCED_REGULAR, "IS4"),
    ("bipolarly-balanced", IdentityClass.BIPOLARLY_BALANCED, "IS3"),
    ("regular-bipolarly-balanced", IdentityClass.REGULAR_BIPOLARLY_BALANCED, "IS2xIS3"),
)


@lru_cache(maxsize=1)
def _test_algebras() -> dict[str, FiniteAlgebra]:
    is2 = entry("IS2").algebra
    is3 = entry("IS3").algebra
    return {
        "IS2": is2,
        "IS4": entry("IS4").algebra,
        "IS3": is3,
        "IS2xIS3": product(is2, is3),
    }


def syntactic_vs_semantic(e: Identity | str) -> dict:
    """Compare each syntactic class of an identity with its semantic test.

    Each of the four classes is decided twice: once from the shape of the
    identity and once by checking it in the matching algebra (IS2, IS4, IS3,
    IS2xIS3).  The two verdicts are expected to agree in every row, always.
    """
    if isinstance(e, str):
        e = parse_identity(e)
    classes = classify(e)
    algebras = _test_algebras()
    checks = []
    agree = True
    for label, cls, alg_name in _SEMANTIC_TESTS:
        syntactic = cls in classes
        semantic = bool(satisfies(algebras[alg_name], e))
        ok = syntactic == semantic
        agree = agree and ok
        checks.append(
            {
                "class": label,
                "algebra": alg_name,
                "syntactic": syntactic,
                "semantic": semantic,
                "agree": ok,
            }
        )
    return {"identity": str(e), "checks": checks, "agree": agree}


def classifier_sweep(max_nodes: int = 7) -> dict:
    """Exhaustive syntactic-vs-semantic agreement over the bounded term space.

    Works pairwise-free: an identity built from two enumerated terms holds in
    the test algebra iff the terms share a value row, and lies in the class
    iff they share the syntactic key, so agreement over every pair is one
    partition comparison per class.
    """
    terms = enumerate_terms(max_nodes)
    sig = signatures(terms)
    keys = {
        "regular": [v for (v, _, _) in sig],
        "balanced-regular": [(p, m) for (_, p, m) in sig],
        "bipolarly-balanced": ["b" if p & m else (p, m) for (_, p, m) in sig],
        "regular-bipolarly-balanced": [
            ("b", v) if p & m else (p, m) for (v, p, m) in sig
        ],
    }
    algebras = _test_algebras()
    out: dict = {"terms": len(terms), "agree": True, "classes": {}}
    for label, _, alg_name in _SEMANTIC_TESTS:
        syntactic = partition_ids(keys[label])
        semantic = partition_ids(value_matrix(algebras[alg_name], terms))
        ok = same_partition(syntactic, semantic)
        row: dict = {"algebra": alg_name, "agree": ok}
        if not ok:
            viol = first_violation(syntactic, semantic) or first_violation(
                semantic, syntactic
            )
            row["disagreement"] = str(Identity(terms[viol[0]], terms[viol[1]]))
        out["classes"][label] = row
        out["agree"] = out["agree"] and ok
    return out


# ---------------------------------------------------------------------------
# bounded HSP membership

@dataclass(frozen=True)
class HspResult:
    """Three-valued membership verdict with evidence.

    verdict "in" carries a certificate (product factors, subalgebra,
    congruence blocks, isomorphism); "out" carries an identity valid in the
    generators but failing in the candidate, with a counterexample.
    """

    verdict: str
    certificate: dict | None = None
    identity: str | None = None
    counterexample: dict[str, str] | None = None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "certificate": self.certificate,
            "identity": self.identity,
            "counterexample": self.counterexample,
        }


_MATRICES: dict[tuple, np.ndarray] = {}


def _matrix(a: FiniteAlgebra) -> np.ndarray:
    key = (a.meet, a.join, a.neg)
    if key not in _MATRICES:
        _MATRICES[key] = value_matrix(a, enumerate_terms())
    return _MATRICES[key]


def _theory_partition(algebras: Sequence[FiniteAlgebra]) -> np.ndarray:
    mats = [_matrix(a) for a in algebras]
    return partition_ids(mats[0] if len(mats) == 1 else np.hstack(mats))


def _resolve(g) -> FiniteAlgebra:
    if isinstance(g, FiniteAlgebra):
        return g
    if isinstance(g, int):
        return entry(g).algebra
    return get_algebra(g)


def _sweep_separator(
    holds_in: Sequence[FiniteAlgebra], fails_in: Sequence[FiniteAlgebra]
) -> tuple[Identity, FiniteAlgebra] | None:
    """A bounded-space identity valid in all of `holds_in` but not everywhere
    in `fails_in`, with the offending algebra."""
    joint = _theory_partition(holds_in)
    terms = enumerate_terms()
    for a in fails_in:
        viol = first_violation(joint, _theory_partition([a]))
        if viol is not None:
            return Identity(terms[viol[0]], terms[viol[1]]), a
    return None


def _pool_separator(
    holds_in: Sequence[FiniteAlgebra], fails_in: Sequence[FiniteAlgebra]
) -> tuple[str, FiniteAlgebra, dict[str, str]] | None:
    for text in SEPARATOR_POOL:
        e = _parsed(text)
        if not all(satisfies(g, e) for g in holds_in):
            continue
        for a in fails_in:
            res = satisfies(a, e)
            if not res:
                return text, a, res.counterexample or {}
    return None


def _subuniverses(P: FiniteAlgebra, max_generators: int) -> list[tuple[int, ...]]:
    """Subuniverses generated by up to `max_generators` elements, plus the
    whole carrier; deduplicated, smallest first."""
    n = P.size
    take = max_generators if n <= 20 else min(max_generators, 2)
    seen: set[frozenset[int]] = set()
    for size in range(1, take + 1):
        for seed in itertools.combinations(range(n), size):
            _, incl = subalgebra_generated(P, seed)
            seen.add(frozenset(incl))
    seen.add(frozenset(range(n)))
    return sorted((tuple(sorted(s)) for s in seen), key=lambda s: (len(s), s))


def hsp_membership(
    algebra: FiniteAlgebra,
    generators,
    *,
    max_factors: int = 3,
    product_budget: int = 100,
    max_subalgebra_generators: int = 3,
    congruence_budget: int = CONGRUENCE_SIZE_LIMIT,
) -> HspResult:
    """Bounded search for `algebra` in the variety of the given generators.

    "out": an identity valid in every generator but failing in the algebra,
    from the curated pool or the bounded term sweep.  "in": the algebra is
    isomorphic to a quotient of a subalgebra of a product of at most
    `max_factors` generators (products over `product_budget` elements are not
    formed; subalgebras are taken generated by at most
    `max_subalgebra_generators` elements -- pairs only on products above 20
    elements -- plus the full product; congruences are enumerated on
    subalgebras up to `congruence_budget` elements).  "unknown": both
    searches exhausted.  Generators may be algebras, catalog indices or
    known algebra names.
    """
    gens = (
        [_resolve(generators)]
        if isinstance(generators, (FiniteAlgebra, int, str))
        else [_resolve(g) for g in generators]
    )
    if not gens:
        raise ValidationError("need at least one generator")
    cap = max(product_budget, 1)
    oversized = [a.name for a in [algebra, *gens] if a.size > cap]
    if oversized:
        raise ValidationError(
            f"size budget exceeded: {', '.join(oversized)} larger than {cap} elements"
        )

    found = _pool_separator(gens, [algebra])
    if found is not None:
        text, _, cex = found
        return HspResult("out", identity=text, counterexample=cex)
    swept = _sweep_separator(gens, [algebra])
    if swept is not None:
        e, _ = swept
        res = satisfies(algebra, e)
        return HspResult("out", identity=str(e), counterexample=res.counterexample)

    # membership search, smallest products first
    multisets = [
        ms
        for k in range(1, max_factors + 1)
        for ms in itertools.combinations_with_replacement(range(len(gens)), k)
    ]

    def prod_size(ms):
        size = 1
        for i in ms:
            size *= gens[i].size
        return size

    multisets.sort(key=lambda ms: (prod_size(ms), len(ms), ms))
    for ms in multisets:
        if prod_size(ms) > product_budget:
            continue
        P = gens[ms[0]]
        for i in ms[1:]:
            P = product(P, gens[i])
        for sub in _subuniverses(P, max_subalgebra_generators):
            if len(sub) < algebra.size or len(sub) > congruence_budget:
                continue
            S, inclusion = subalgebra_generated(P, sub)
            for theta in congruences(S):
                if theta.num_blocks != algebra.size:
                    continue
                Q = quotient(S, theta)
                iso = is_isomorphic(algebra, Q)
                if iso is None:
                    continue
                certificate = {
                    "factors": [gens[i].name for i in ms],
                    "factorIndices": list(ms),
                    "subalgebra": [P.elements[x] for x in inclusion],
                    "congruence": None
                    if theta.is_identity()
                    else [
                        [S.elements[x] for x in block] for block in theta.blocks
                    ],
                    "isomorphism": iso,
                }
                return HspResult("in", certificate=certificate)
    return HspResult("unknown")


# ---------------------------------------------------------------------------
# the lattice

@dataclass(frozen=True)
class CoverEdge:
    """A covering pair with its separating identity: the identity holds in
    the lower variety and fails in the named generator of the upper one."""

    lower: str
    upper: str
    identity: str
    fails_in: str
    counterexample: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "identity": self.identity,
            "failsIn": self.fails_in,
            "counterexample": self.counterexample,
        }


# transcription of the expected diagram: (lower, upper, identity, generator
# of the upper variety in which the identity fails)
_EXPECTED_COVERS: tuple[tuple[str, str, str, str], ...] = (
    ("T", "BA", "x = y", "B2"),
    ("T", "R(T)", ABSORPTION, "IS2"),
    ("T", "Bip(T)", RISL_AXIOM, "IS3"),
    ("BA", "KL", _BOOLEAN, "K3"),
    ("BA", "R(BA)", ABSORPTION, "IS2"),
    ("BA", "Bip(BA)", _BOOLEAN, "IS3"),
    ("KL", "DML", _KLEENE, "DM4"),
    ("KL", "R(KL)", ABSORPTION, "IS2"),
    ("KL", "Bip(KL)", ABSORPTION, "IS3"),
    ("DML", "R(DML)", ABSORPTION, "IS2"),
    ("DML", "Bip(DML)", ABSORPTION, "IS3"),
    ("R(T)", "R(BA)", RISL_AXIOM, "B2"),
    ("R(T)", "R(Bip(T))", RISL_AXIOM, "IS3"),
    ("R(BA)", "R(KL)", _ROW3, "K3"),
    ("R(BA)", "R(Bip(BA))", R_ABS, "IS3"),
    ("R(KL)", "R(DML)", _ROW4, "DM4"),
    ("R(KL)", "R(Bip(KL))", R_ABS, "IS3"),
    ("R(DML)", "R(Bip(DML))", R_ABS, "IS3"),
    ("Bip(T)", "R(Bip(T))", _DN_UP, "IS2"),
    ("Bip(T)", "Bip^-(DML)", COLLAPSE, "A5"),
    ("R(Bip(T))", "R(Bip^-(DML))", COLLAPSE, "A5"),
    ("R(Bip(T))", "B(T)", RBISL_AXIOM, "IS4"),
    ("B(T)", "B^-(DML)", COLLAPSE, "A5"),
    ("Bip^-(DML)", "R(Bip^-(DML))", _DN_UP, "IS2"),
    ("Bip^-(DML)", "Bip(BA)", _DN_UP, "B2"),
    ("R(Bip^-(DML))", "R(Bip(BA))", _DN_EQ_UP, "B2"),
    ("R(Bip^-(DML))", "B^-(DML)", _ROW3, "IS4"),
    ("B^-(DML)", "B(BA)", _DN_EQ_UP, "B2"),
    ("Bip(BA)", "Bip(KL)", _ROW1, "K3"),
    ("Bip(BA)", "R(Bip(BA))", B_ABS, "IS2"),
    ("R(Bip(BA))", "R(Bip(KL))", _ROW3, "K3"),
    ("R(Bip(BA))", "B(BA)", RB_ABS, "IS4"),
    ("B(BA)", "B(KL)", _ROW5, "K3"),
    ("Bip(KL)", "Bip(DML)", _ROW2, "DM4"),
    ("Bip(KL)", "R(Bip(KL))", B_ABS, "IS2"),
    ("R(Bip(KL))", "R(Bip(DML))", _ROW4, "DM4"),
    ("R(Bip(KL))", "B(KL)", RB_ABS, "IS4"),
    ("B(KL)", "B(DML)", _ROW4, "DM4"),
    ("Bip(DML)", "R(Bip(DML))", B_ABS, "IS2"),
    ("R(Bip(DML))", "B(DML)", RB_ABS, "IS4"),
)


@dataclass(frozen=True)
class SubvarietyLattice:
    """All 23 varieties with their containment order and annotated covers."""

    nodes: tuple[VarietyDescriptor, ...]
    order: frozenset[tuple[str, str]]  # non-strict: (below, above)
    covers: tuple[CoverEdge, ...]

    def node(self, name: str) -> VarietyDescriptor:
        for v in self.nodes:
            if v.name == name:
                return v
        raise ValidationError(f"unknown variety {name!r}")

    def leq(self, below: str, above: str) -> bool:
        return (self.node(below).name, self.node(above).name) in self.order

    def below(self, name: str) -> tuple[str, ...]:
        """Every variety contained in the named one, in node order."""
        return tuple(v.name for v in self.nodes if self.leq(v.name, name))

    def to_json(self) -> dict:
        return {
            "nodes": [v.to_json() for v in self.nodes],
            "order": sorted([a, b] for a, b in self.order),
            "covers": [e.to_json() for e in self.covers],
        }

    def to_dot(self) -> str:
        def quote(s: str) -> str:
            return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

        lines = ["digraph subvarieties {", "  rankdir=BT;"]
        for v in self.nodes:
            gens = ",".join(str(i) for i in sorted(v.generators))
            lines.append(f"  {quote(v.name)} [tooltip={quote('{' + gens + '}')}];")
        for e in self.covers:
            lines.append(
                f"  {quote(e.lower)} -> {quote(e.upper)} "
                f"[label={quote(e.identity)}];"
            )
        lines.append("}")
        return "\n".join(lines) + "\n"


def _verify_non_containment(v: VarietyDescriptor, w: VarietyDescriptor) -> None:
    """Certify v is not contained in w: an identity valid in all of w's
    generators must fail in one of v's."""
    w_algebras = list(w.generator_algebras())
    v_only = [entry(i).algebra for i in sorted(v.generators - w.generators)]
    if _pool_separator(w_algebras, v_only) is not None:
        return
    if _sweep_separator(w_algebras, v_only) is not None:
        return
    raise ValidationError(
        f"no identity separates {v.name} from {w.name}; expected {v.name} "
        f"not below {w.name}"
    )


@lru_cache(maxsize=1)
def build_lattice() -> SubvarietyLattice:
    """Assemble and certify the 23-node lattice.

    Containments follow generator-set inclusion (each generator of the lower
    variety is literally a generator of the upper one); every non-containment
    is certified by a separating identity; the covering pairs must match the
    expected diagram, each with its recorded identity re-verified: valid in
    the lower variety, refuted in the stated generator of the upper one.
    Any disagreement raises with the offending pair.
    """
    nodes = all_varieties()
    rank = {v.name: k for k, v in enumerate(nodes)}

    order: set[tuple[str, str]] = set()
    for v in nodes:
        for w in nodes:
            if v.generators <= w.generators:
                order.add((v.name, w.name))
            else:
                _verify_non_containment(v, w)

    strict = {(a, b) for a, b in order if a != b}
    covers = {
        (a, b)
        for a, b in strict
        if not any((a, c) in strict and (c, b) in strict for c in rank)
    }

    expected = {(lo, up) for lo, up, _, _ in _EXPECTED_COVERS}
    if covers != expected:
        missing = sorted(expected - covers)
        extra = sorted(covers - expected)
        raise ValidationError(
            f"cover relation deviates from the expected diagram; "
            f"missing {missing}, unexpected {extra}"
        )

    edges = []
    by_name = {v.name: v for v in nodes}
    for lo, up, text, witness in _EXPECTED_COVERS:
        e = _parsed(text)
        for a in by_name[lo].generator_algebras():
            if not satisfies(a, e):
                raise ValidationError(
                    f"separating identity {text!r} for {lo} < {up} fails in "
                    f"{a.name}, a generator of {lo}"
                )
        if entry(witness).index not in by_name[up].generators:
            raise ValidationError(
                f"{witness} is not a generator of {up} (cover {lo} < {up})"
            )
        res = satisfies(entry(witness).algebra, e)
        if res:
            raise ValidationError(
                f"separating identity {text!r} for {lo} < {up} unexpectedly "
                f"holds in {witness}"
            )
        edges.append(CoverEdge(lo, up, text, witness, dict(res.counterexample)))
    edges.sort(key=lambda e: (rank[e.lower], rank[e.upper]))
    return SubvarietyLattice(nodes, frozenset(order), tuple(edges))


# ---------------------------------------------------------------------------
# generation results

def _bipolar_flags(terms) -> list[bool]:
    return [bool(p & m) for (_, p, m) in signatures(terms)]


def _theory_formula_check(
    joint: Sequence[FiniteAlgebra], keyed_by, label: str
) -> dict:
    """Compare the joint bounded theory of `joint` with a syntactic keying."""
    terms = enumerate_terms()
    semantic = _theory_partition(list(joint))
    syntactic = partition_ids(keyed_by)
    ok = same_partition(semantic, syntactic)
    out = {"check": label, "ok": ok, "detail": f"{len(terms)} terms"}
    if not ok:
        viol = first_violation(semantic, syntactic) or first_violation(
            syntactic, semantic
        )
        out["detail"] = f"disagree at {Identity(terms[viol[0]], terms[viol[1]])}"
    return out


def _si_quotients_embed(
    U: FiniteAlgebra,
    powers: Iterable[int],
    generator_count: int,
    congruence_cap: int,
) -> dict:
    """Search quotients of small-generated subalgebras of powers of U for
    subdirectly irreducible members; each must embed into U itself.

    Subalgebras are generated by up to `generator_count` elements, with seed
    tuples deduplicated under coordinate permutations; subalgebras above
    `congruence_cap` elements are skipped (and counted).
    """
    # every subalgebra of U, as targets for the embedding check
    u_subs: dict[frozenset[int], FiniteAlgebra] = {}
    for size in range(1, U.size + 1):
        for seed in itertools.combinations(range(U.size), size):
            sub, incl = subalgebra_generated(U, seed)
            u_subs.setdefault(frozenset(incl), sub)
    targets = list(u_subs.values())

    report = {
        "subalgebras": 0,
        "skipped_large": 0,
        "quotients": 0,
        "si_quotients": 0,
        "failures": [],
    }
    si_verdicts: list[tuple[FiniteAlgebra, bool]] = []  # iso representatives

    for k in powers:
        P = U
        for _ in range(k - 1):
            P = product(P, U)
        n = P.size
        meet, join, neg = P.arrays()
        base = U.size

        def digits(x: int) -> tuple[int, ...]:
            out = []
            for _ in range(k):
                out.append(x % base)
                x //= base
            return tuple(reversed(out))

        def undigits(ds: Sequence[int]) -> int:
            x = 0
            for d in ds:
                x = x * base + d
            return x

        perms = list(itertools.permutations(range(k)))

        def canonical_seed(seed: tuple[int, ...]) -> tuple[int, ...]:
            best = None
            for perm in perms:
                mapped = tuple(
                    sorted(
                        undigits([digits(x)[p] for p in perm]) for x in seed
                    )
                )
                if best is None or mapped < best:
                    best = mapped
            return best

        def closure(seed: Sequence[int]) -> frozenset[int]:
            mask = np.zeros(n, dtype=bool)
            mask[list(seed)] = True
            while True:
                idx = np.flatnonzero(mask)
                new = np.unique(
                    np.concatenate(
                        (
                            meet[np.ix_(idx, idx)].ravel(),
                            join[np.ix_(idx, idx)].ravel(),
                            neg[idx],
                        )
                    )
                )
                fresh = new[~mask[new]]
                if fresh.size == 0:
                    return frozenset(int(v) for v in np.flatnonzero(mask))
                mask[fresh] = True

        subuniverses: set[tuple[int, ...]] = set()
        for size in range(1, generator_count + 1):
            for seed in itertools.combinations(range(n), size):
                if canonical_seed(seed) != tuple(sorted(seed)):
                    continue
                closed = closure(seed)
                canon = canonical_seed(tuple(closed))
                subuniverses.add(canon)

        # group by isomorphism before the expensive congruence scan
        reps: list[FiniteAlgebra] = []
        for sub in sorted(subuniverses, key=lambda s: (len(s), s)):
            report["subalgebras"] += 1
            if len(sub) > congruence_cap:
                report["skipped_large"] += 1
                continue
            S, _ = subalgebra_generated(P, sub)
            if any(
                r.size == S.size and is_isomorphic(S, r) is not None for r in reps
            ):
                continue
            reps.append(S)
            for theta in congruences(S):
                Q = quotient(S, theta)
                report["quotients"] += 1
                if not is_subdirectly_irreducible(Q):
                    continue
                report["si_quotients"] += 1
                known = next(
                    (
                        ok
                        for rep, ok in si_verdicts
                        if rep.size == Q.size and is_isomorphic(Q, rep) is not None
                    ),
                    None,
                )
                if known is None:
                    known = any(
                        t.size == Q.size and is_isomorphic(Q, t) is not None
                        for t in targets
                    )
                    si_verdicts.append((Q, known))
                if not known:
                    report["failures"].append(
                        {
                            "power": k,
                            "subalgebra_size": S.size,
                            "quotient_size": Q.size,
                            "blocks": theta.num_blocks,
                        }
                    )
    report["ok"] = not report["failures"]
    return report


def jonsson_check(
    max_power: int = 2,
    generator_count: int = 2,
    congruence_cap: int = CONGRUENCE_SIZE_LIMIT,
) -> dict:
    """Subdirectly irreducible quotients of subalgebras of U, U^2 (and up to
    U^`max_power`) all embed into U -- the bounded sanity check behind using
    generator sets of subdirectly irreducibles.  Returns search counts and
    failures (expected none)."""
    U = get_algebra("U")
    return _si_quotients_embed(
        U, range(1, max_power + 1), generator_count, congruence_cap
    )


def _membership_entry(label: str, result: HspResult) -> dict:
    detail = result.verdict
    if result.verdict == "in" and result.certificate:
        cert = result.certificate
        detail = (
            f"in via {' x '.join(cert['factors'])}, subalgebra of size "
            f"{len(cert['subalgebra'])}"
            + (", quotient" if cert["congruence"] else "")
        )
    elif result.verdict == "out":
        detail = f"out via {result.identity}"
    return {"check": label, "ok": result.verdict == "in", "detail": detail}


def verify_theorems(include_jonsson: bool = True) -> dict:
    """Re-check the generation results: mutual membership certificates for
    the named generator-set equalities, the syntactic descriptions of the
    key theories over the bounded term space, the lattice assembly, the
    absorption-family alignment, and (optionally) the subdirect
    irreducibility sanity search over powers of U."""
    checks: list[dict] = []
    basics = {name: entry(name).algebra for name in ("B2", "K3", "DM4", "IS2", "IS3", "IS4")}
    U = get_algebra("U")
    terms = enumerate_terms()
    bip = _bipolar_flags(terms)
    sig = signatures(terms)

    def theory_groups(a: FiniteAlgebra) -> np.ndarray:
        return _theory_partition([a])

    # regularised De Morgan lattices: V(A+) = V(A, IS2)
    for name in ("B2", "K3", "DM4"):
        plus = entry(f"{name}+").algebra
        A = basics[name]
        checks.append(
            _membership_entry(
                f"{name}+ in HSP({name}, IS2)",
                hsp_membership(plus, [A, basics["IS2"]]),
            )
        )
        checks.append(
            _membership_entry(f"{name} in HSP({name}+)", hsp_membership(A, [plus]))
        )
        checks.append(
            _membership_entry(
                f"IS2 in HSP({name}+)", hsp_membership(basics["IS2"], [plus])
            )
        )
        joint = _theory_partition([A, basics["IS2"]])
        ok = same_partition(joint, _theory_partition([plus]))
        checks.append(
            {
                "check": f"bounded theory of {name}+ equals that of {{{name}, IS2}}",
                "ok": ok,
                "detail": f"{len(terms)} terms",
            }
        )

    # U generates the same variety as {DM4, IS4}
    checks.append(
        _membership_entry(
            "U in HSP(DM4, IS4)", hsp_membership(U, [basics["DM4"], basics["IS4"]])
        )
    )
    checks.append(_membership_entry("DM4 in HSP(U)", hsp_membership(basics["DM4"], [U])))
    checks.append(_membership_entry("IS4 in HSP(U)", hsp_membership(basics["IS4"], [U])))
    checks.append(
        {
            "check": "bounded theory of U equals that of {DM4, IS4}",
            "ok": same_partition(
                _theory_partition([U]),
                _theory_partition([basics["DM4"], basics["IS4"]]),
            ),
            "detail": f"{len(terms)} terms",
        }
    )

    # ... and as the single product DM4 x IS4 (a sum with its bottom fibre
    # bilateralised): both factors are homomorphic images of the product, so
    # the two memberships above close the circle through U
    dm4xis4 = product(basics["DM4"], basics["IS4"])
    checks.append(
        _membership_entry("U in HSP(DM4 x IS4)", hsp_membership(U, [dm4xis4]))
    )
    checks.append(
        _membership_entry(
            "DM4 in HSP(DM4 x IS4)", hsp_membership(basics["DM4"], [dm4xis4])
        )
    )
    checks.append(
        _membership_entry(
            "IS4 in HSP(DM4 x IS4)", hsp_membership(basics["IS4"], [dm4xis4])
        )
    )
    checks.append(
        {
            "check": "bounded theory of U equals that of DM4 x IS4",
            "ok": same_partition(
                _theory_partition([U]), _theory_partition([dm4xis4])
            ),
            "detail": f"{len(terms)} terms",
        }
    )

    # A5 sits between IS3 and B2 x IS3
    checks.append(
        _membership_entry(
            "A5 in HSP(B2, IS3)",
            hsp_membership(entry("A5").algebra, [basics["B2"], basics["IS3"]]),
        )
    )
    checks.append(
        _membership_entry(
            "IS3 in HSP(A5)", hsp_membership(basics["IS3"], [entry("A5").algebra])
        )
    )

    # syntactic descriptions of the bipolar theories
    dm4_groups = theory_groups(basics["DM4"]).tolist()
    checks.append(
        _theory_formula_check(
            [entry("A5").algebra],
            [
                "b" if b else (p, m, g)
                for b, (_, p, m), g in zip(bip, sig, dm4_groups)
            ],
            "identities of A5 = bipolar ones plus balanced ones valid in DM4",
        )
    )
    checks.append(
        _theory_formula_check(
            [entry("A5").algebra, basics["IS2"]],
            [
                ("b", v) if b else (p, m, g)
                for b, (v, p, m), g in zip(bip, sig, dm4_groups)
            ],
            "identities of {A5, IS2} = regular bipolar plus balanced DM4-valid",
        )
    )
    checks.append(
        _theory_formula_check(
            [entry("A5").algebra, basics["IS4"]],
            [
                ("b", p, m) if b else (p, m, g)
                for b, (_, p, m), g in zip(bip, sig, dm4_groups)
            ],
            "identities of {A5, IS4} = balanced bipolar plus balanced DM4-valid",
        )
    )

    # regularisation operators on the lattice-generated varieties
    for name in ("B2", "K3", "DM4"):
        groups = theory_groups(basics[name]).tolist()
        checks.append(
            _theory_formula_check(
                [basics[name], basics["IS3"]],
                [
                    (g, "b") if b else (g, p, m)
                    for b, (_, p, m), g in zip(bip, sig, groups)
                ],
                f"identities of {{{name}, IS3}} = bipolarly balanced ones of {name}",
            )
        )
        checks.append(
            _theory_formula_check(
                [basics[name], basics["IS2"], basics["IS3"]],
                [
                    (g, "b", v) if b else (g, p, m)
                    for b, (v, p, m), g in zip(bip, sig, groups)
                ],
                f"identities of {{{name}, IS2, IS3}} = regular bipolarly "
                f"balanced ones of {name}",
            )
        )
        checks.append(
            _theory_formula_check(
                [basics[name], basics["IS4"]],
                [(g, p, m) for (_, p, m), g in zip(sig, groups)],
                f"identities of {{{name}, IS4}} = balanced ones of {name}",
            )
        )

    # the lattice itself, plus the absorption-family alignment
    try:
        lattice = build_lattice()
        checks.append(
            {
                "check": "subvariety lattice assembles with verified covers",
                "ok": True,
                "detail": f"{len(lattice.nodes)} nodes, {len(lattice.covers)} covers",
            }
        )
    except ValidationError as exc:
        lattice = None
        checks.append(
            {
                "check": "subvariety lattice assembles with verified covers",
                "ok": False,
                "detail": str(exc),
            }
        )
    if lattice is not None:
        for axiom, label, top in (
            (R_ABS, "R-absorption", "R(DML)"),
            (B_ABS, "B-absorption", "Bip(DML)"),
            (RB_ABS, "RB-absorption", "R(Bip(DML))"),
        ):
            expected = set(lattice.below(top))
            actual = {
                v.name for v in lattice.nodes if variety_satisfies(v, axiom)
            }
            ok = expected == actual
            detail = f"{len(expected)} varieties below {top}"
            if not ok:
                detail = (
                    f"mismatch: only-below {sorted(expected - actual)}, "
                    f"only-satisfying {sorted(actual - expected)}"
                )
            checks.append(
                {
                    "check": f"{label} holds exactly below {top}",
                    "ok": ok,
                    "detail": detail,
                }
            )

    if include_jonsson:
        jn = jonsson_check()
        checks.append(
            {
                "check": "subdirectly irreducible quotients inside powers of U "
                "embed into U",
                "ok": jn["ok"],
                "detail": (
                    f"{jn['subalgebras']} subalgebras, {jn['quotients']} quotients, "
                    f"{jn['si_quotients']} subdirectly irreducible, "
                    f"{len(jn['failures'])} failures"
                ),
            }
        )

    return {"ok": all(c["ok"] for c in checks), "checks": checks}
