r"""Band structure inside a De Morgan bisemilattice and its decomposition.

The derived operation x.y := x /\ (x \/ y) turns a De Morgan bisemilattice
into a left-normal band whose natural Green's relation partitions the carrier
into the fibres of a direct-system presentation; the quotient by that relation
is the involutive semilattice of indices.  `decompose` recovers the whole
system (fibres, transitions, dualisers) and `dpl_sum` inverts it up to
isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass

from .finalg import FiniteAlgebra, ValidationError, is_class, satisfies
from .sums import InvSemilatticeSystem, validate
from .terms import parse

__all__ = [
    "Band",
    "GreenData",
    "band_of",
    "check_ailnb",
    "decompose",
    "greens",
    "index_subvariety",
]


@dataclass(frozen=True, slots=True)
class Band:
    """An idempotent semigroup given by its multiplication table, plus an
    optional involution carried over from the source algebra."""

    size: int
    dot: tuple[tuple[int, ...], ...]
    neg: tuple[int, ...] | None = None

    def __post_init__(self):
        n = self.size
        d = self.dot
        if len(d) != n or any(len(r) != n for r in d):
            raise ValidationError("dot table must be n x n")
        if any(not (0 <= v < n) for r in d for v in r):
            raise ValidationError("dot table entry out of range")
        for x in range(n):
            if d[x][x] != x:
                raise ValidationError(f"not idempotent at {x}")
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    if d[d[x][y]][z] != d[x][d[y][z]]:
                        raise ValidationError(
                            f"not associative at ({x},{y},{z})"
                        )
        if self.neg is not None and sorted(self.neg) != list(range(n)):
            raise ValidationError("neg must be a bijection")


@dataclass(frozen=True, slots=True)
class GreenData:
    """Green's preorders of a band and the D-class partition.

    leqL: a ab=a; leqR: ba=a; leqD: aba=a; leqH = leqL intersect leqR.
    """

    leqL: tuple[tuple[bool, ...], ...]
    leqR: tuple[tuple[bool, ...], ...]
    leqD: tuple[tuple[bool, ...], ...]
    leqH: tuple[tuple[bool, ...], ...]
    d_classes: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        as_int = lambda rel: [[int(v) for v in row] for row in rel]
        return {
            "leqL": as_int(self.leqL),
            "leqR": as_int(self.leqR),
            "leqD": as_int(self.leqD),
            "leqH": as_int(self.leqH),
            "dClasses": [list(c) for c in self.d_classes],
        }


def band_of(algebra: FiniteAlgebra) -> Band:
    r"""The band term reduct x.y := x /\ (x \/ y) of a De Morgan
    bisemilattice (negation carried along when present)."""
    if not is_class(algebra, "De Morgan bisemilattice"):
        raise ValidationError(f"{algebra.name} is not a De Morgan bisemilattice")
    n = algebra.size
    meet, join = algebra.meet, algebra.join
    dot = tuple(
        tuple(meet[x][join[x][y]] for y in range(n)) for x in range(n)
    )
    return Band(n, dot, algebra.neg)


def greens(band: Band) -> GreenData:
    """Compute and sanity-check Green's preorders and the D-classes."""
    n, d = band.size, band.dot
    leqL = tuple(tuple(d[a][b] == a for b in range(n)) for a in range(n))
    leqR = tuple(tuple(d[b][a] == a for b in range(n)) for a in range(n))
    leqD = tuple(
        tuple(d[d[a][b]][a] == a for b in range(n)) for a in range(n)
    )
    leqH = tuple(
        tuple(leqL[a][b] and leqR[a][b] for b in range(n)) for a in range(n)
    )

    for name, rel in (("L", leqL), ("R", leqR), ("D", leqD)):
        for a in range(n):
            if not rel[a][a]:
                raise ValidationError(f"leq{name} not reflexive at {a}")
        for a in range(n):
            for b in range(n):
                if not rel[a][b]:
                    continue
                for c in range(n):
                    if rel[b][c] and not rel[a][c]:
                        raise ValidationError(
                            f"leq{name} not transitive at ({a},{b},{c})"
                        )
    for a in range(n):
        for b in range(n):
            if leqH[a][b] and leqH[b][a] and a != b:
                raise ValidationError("leqH not antisymmetric")

    block_of = [-1] * n
    classes: list[list[int]] = []
    for a in range(n):
        if block_of[a] != -1:
            continue
        cls = [x for x in range(n) if leqD[a][x] and leqD[x][a]]
        for x in cls:
            block_of[x] = len(classes)
        classes.append(cls)

    # D is a congruence of the band...
    for a in range(n):
        for b in range(n):
            if block_of[a] != block_of[b]:
                continue
            for c in range(n):
                if block_of[d[a][c]] != block_of[d[b][c]] or block_of[
                    d[c][a]
                ] != block_of[d[c][b]]:
                    raise ValidationError("D-classes not a band congruence")
    # ...and of the involution when present
    if band.neg is not None:
        for a in range(n):
            for b in range(n):
                if block_of[a] == block_of[b] and block_of[
                    band.neg[a]
                ] != block_of[band.neg[b]]:
                    raise ValidationError("D-classes not a neg congruence")

    return GreenData(leqL, leqR, leqD, leqH, tuple(tuple(c) for c in classes))


def check_ailnb(algebra: FiniteAlgebra) -> list[str]:
    r"""Violations (with witnesses) of the a-involutive left-normal-band
    conditions for the derived x.y := x /\ (x \/ y), including the
    compatibility of . with the algebra's own operations.  Empty = ok."""
    n = algebra.size
    meet, join, neg = algebra.meet, algebra.join, algebra.neg
    names = algebra.elements
    dot = [[meet[x][join[x][y]] for y in range(n)] for x in range(n)]
    out: list[str] = []

    for x in range(n):
        if dot[x][x] != x:
            out.append(f"dot not idempotent at {names[x]}")
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if dot[dot[x][y]][z] != dot[x][dot[y][z]]:
                    out.append(
                        "dot not associative at "
                        f"({names[x]},{names[y]},{names[z]})"
                    )
                    break
            else:
                continue
            break
        else:
            continue
        break
    if out:
        return out  # no point checking band identities on a non-band

    for x in range(n):
        for y in range(n):
            for z in range(n):
                if dot[dot[x][y]][z] != dot[dot[x][z]][y]:
                    out.append(
                        "not left-normal: x.y.z != x.z.y at "
                        f"({names[x]},{names[y]},{names[z]})"
                    )
                    break
            else:
                continue
            break
        else:
            continue
        break

    if neg is None:
        out.append("algebra has no negation")
        return out

    for x in range(n):
        if neg[neg[x]] != x:
            out.append(f"negation not involutive at {names[x]}")
    for x in range(n):
        for y in range(n):
            if neg[dot[x][y]] != dot[neg[x]][neg[y]]:
                out.append(
                    "not a-involutive: ~(x.y) != ~x.~y at "
                    f"({names[x]},{names[y]})"
                )
                break
        else:
            continue
        break

    # compatibility of the band with the original operations:
    #   a.(b1 g b2) = a.b1.b2   and   (b1 g b2).a = (b1.a) g (b2.a)
    for g_name, g in (("/\\", meet), ("\\/", join)):
        for a in range(n):
            for b1 in range(n):
                for b2 in range(n):
                    if dot[a][g[b1][b2]] != dot[dot[a][b1]][b2]:
                        out.append(
                            f"compatibility a.g(b1,b2) fails for {g_name} at "
                            f"({names[a]},{names[b1]},{names[b2]})"
                        )
                        break
                    if dot[g[b1][b2]][a] != g[dot[b1][a]][dot[b2][a]]:
                        out.append(
                            f"compatibility g(b1,b2).a fails for {g_name} at "
                            f"({names[a]},{names[b1]},{names[b2]})"
                        )
                        break
                else:
                    continue
                break
            else:
                continue
            break
    return out


def decompose(algebra: FiniteAlgebra) -> InvSemilatticeSystem:
    """Present a De Morgan bisemilattice as a direct system over its
    involutive semilattice of D-classes; `dpl_sum` inverts this up to
    isomorphism."""
    problems = check_ailnb(algebra)
    if problems:
        raise ValidationError(
            f"{algebra.name} is not decomposable:\n  - " + "\n  - ".join(problems)
        )
    band = band_of(algebra)
    green = greens(band)
    classes = green.d_classes
    n = algebra.size
    block_of = [0] * n
    for b, cls in enumerate(classes):
        for x in cls:
            block_of[x] = b
    names = algebra.elements
    key_of = [names[cls[0]] for cls in classes]
    nblocks = len(classes)

    # index involutive semilattice: quotient of the band by D
    idx_op = tuple(
        tuple(block_of[band.dot[classes[i][0]][classes[j][0]]] for j in range(nblocks))
        for i in range(nblocks)
    )
    idx_neg = tuple(block_of[band.neg[cls[0]]] for cls in classes)
    index = FiniteAlgebra(
        f"{algebra.name}/D", tuple(key_of), idx_op, idx_op, idx_neg
    )

    # fibres: the sliced <meet, join> tables, negation-free
    fibres: dict[str, FiniteAlgebra] = {}
    pos_in_class = {}
    for b, cls in enumerate(classes):
        for p, x in enumerate(cls):
            pos_in_class[x] = p
        for x in cls:
            for y in cls:
                if block_of[algebra.meet[x][y]] != b or block_of[algebra.join[x][y]] != b:
                    raise ValidationError(
                        f"D-class of {key_of[b]} not closed under the lattice inside"
                    )
        fmeet = tuple(
            tuple(pos_in_class[algebra.meet[x][y]] for y in cls) for x in cls
        )
        fjoin = tuple(
            tuple(pos_in_class[algebra.join[x][y]] for y in cls) for x in cls
        )
        fibres[key_of[b]] = FiniteAlgebra(
            f"{algebra.name}[{key_of[b]}]",
            tuple(names[x] for x in cls),
            fmeet,
            fjoin,
        )

    # transitions p_ij(a) = a.b for any b in class j; the choice of b must
    # not matter -- checked, not assumed
    transitions: dict[tuple[str, str], tuple[int, ...]] = {}
    for i in range(nblocks):
        for j in range(nblocks):
            if idx_op[i][j] != j:
                continue
            table = []
            for x in classes[i]:
                images = {band.dot[x][b] for b in classes[j]}
                if len(images) != 1:
                    raise ValidationError(
                        f"transition {key_of[i]} -> {key_of[j]} not well-defined "
                        f"at {names[x]}"
                    )
                img = images.pop()
                if block_of[img] != j:
                    raise ValidationError(
                        f"transition {key_of[i]} -> {key_of[j]} leaves the target class"
                    )
                table.append(pos_in_class[img])
            transitions[(key_of[i], key_of[j])] = tuple(table)

    # dualisers: the algebra's own negation, restricted per class
    dualisers: dict[str, tuple[int, ...]] = {}
    for i in range(nblocks):
        table = []
        for x in classes[i]:
            img = band.neg[x]
            if block_of[img] != idx_neg[i]:
                raise ValidationError(
                    f"negation of {names[x]} leaves class ~{key_of[i]}"
                )
            table.append(pos_in_class[img])
        dualisers[key_of[i]] = tuple(table)

    system = InvSemilatticeSystem(index, fibres, transitions, dualisers)
    problems = validate(system)
    if problems:
        raise ValidationError(
            f"decomposition of {algebra.name} is not a valid system:\n  - "
            + "\n  - ".join(problems)
        )
    return system


def _dot_eval(dot, *chain):
    acc = chain[0]
    for v in chain[1:]:
        acc = dot[acc][v]
    return acc


def index_subvariety(algebra: FiniteAlgebra) -> str:
    """Where the involutive semilattice of indices sits: T, RISL, BISL,
    RBISL, or ISL -- decided on the band reduct and cross-checked on the
    quotient against the matching relative axioms."""
    problems = check_ailnb(algebra)
    if problems:
        raise ValidationError(
            f"{algebra.name} fails the band conditions:\n  - "
            + "\n  - ".join(problems)
        )
    band = band_of(algebra)
    green = greens(band)
    n, d, neg = band.size, band.dot, band.neg

    def risl() -> bool:
        return all(_dot_eval(d, x, neg[x]) == x for x in range(n))

    def bisl() -> bool:
        return all(
            _dot_eval(d, x, neg[x]) == _dot_eval(d, x, neg[x], y)
            for x in range(n)
            for y in range(n)
        )

    def rbisl() -> bool:
        return all(
            _dot_eval(d, x, neg[x], y) == _dot_eval(d, x, neg[x], neg[y])
            for x in range(n)
            for y in range(n)
        )

    if len(green.d_classes) == 1:
        by_band = "T"
    elif risl():
        by_band = "RISL"
    elif bisl():
        by_band = "BISL"
    elif rbisl():
        by_band = "RBISL"
    else:
        by_band = "ISL"

    # independent route: quotient, then the relative axioms
    index = decompose(algebra).index
    if index.size == 1:
        by_axioms = "T"
    elif satisfies(index, parse("x = ~x")):
        by_axioms = "RISL"
    elif satisfies(index, parse("x \\/ ~x = (x \\/ ~x) \\/ y")):
        by_axioms = "BISL"
    elif satisfies(index, parse("(x \\/ ~x) \\/ y = (x \\/ ~x) \\/ ~y")):
        by_axioms = "RBISL"
    else:
        by_axioms = "ISL"

    if by_band != by_axioms:
        raise ValidationError(
            f"band test says {by_band} but the quotient's axioms say "
            f"{by_axioms} for {algebra.name}"
        )
    return by_band
