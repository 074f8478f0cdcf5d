r"""Finite algebras with two binary operations and an optional involution.

The carrier is always ``range(n)`` with a parallel list of element names;
operation tables are dense ``n x n`` (or length ``n``) integer tables.
Everything downstream (catalog, sums, decompositions, variety checks) works
on these tables.

Element order matters for one thing only: :func:`satisfies` reports the
*least* counterexample in the lexicographic order of assignments, variables
sorted by name, elements by index.  ``DMBL_THREADS`` may split the assignment
scan across a thread pool; the reported counterexample is the same regardless
of the schedule.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .terms import Identity, Meet, Join, Neg, Term, Var, variables

__all__ = [
    "CONGRUENCE_SIZE_LIMIT",
    "Congruence",
    "FiniteAlgebra",
    "SatisfactionResult",
    "ValidationError",
    "algebra_from_json",
    "algebra_to_json",
    "congruences",
    "dual",
    "eval_term",
    "is_class",
    "is_isomorphic",
    "is_subdirectly_irreducible",
    "load_algebra",
    "monolith",
    "power",
    "product",
    "quotient",
    "satisfies",
    "save_algebra",
    "subalgebra_generated",
]


class ValidationError(ValueError):
    """Structurally bad input data (tables, partitions, systems)."""


class FiniteAlgebra:
    """A finite algebra of type <2,2> or <2,2,1>.

    `meet` and `join` are n x n tables, `neg` an optional length-n table.
    Construction checks shapes, ranges and that `neg` is a bijection; it does
    *not* impose any equational laws — use :func:`is_class` for that.
    """

    __slots__ = ("name", "elements", "meet", "join", "neg", "_index", "_np")

    def __init__(
        self,
        name: str,
        elements: Sequence[str],
        meet: Sequence[Sequence[int]],
        join: Sequence[Sequence[int]],
        neg: Sequence[int] | None = None,
    ):
        elements = tuple(elements)
        n = len(elements)
        if n == 0:
            raise ValidationError("algebra needs at least one element")
        if len(set(elements)) != n:
            raise ValidationError("element names must be distinct")

        def check_table(tbl, label):
            tbl = tuple(tuple(int(v) for v in row) for row in tbl)
            if len(tbl) != n or any(len(row) != n for row in tbl):
                raise ValidationError(f"{label} table must be {n}x{n}")
            for row in tbl:
                for v in row:
                    if not 0 <= v < n:
                        raise ValidationError(
                            f"{label} table entry {v} out of range [0,{n})"
                        )
            return tbl

        self.name = str(name)
        self.elements = elements
        self.meet = check_table(meet, "meet")
        self.join = check_table(join, "join")
        if neg is None:
            self.neg = None
        else:
            neg = tuple(int(v) for v in neg)
            if len(neg) != n:
                raise ValidationError(f"neg table must have length {n}")
            if any(not 0 <= v < n for v in neg):
                raise ValidationError("neg table entry out of range")
            if len(set(neg)) != n:
                raise ValidationError("neg table must be a bijection")
            self.neg = neg
        self._index = {name_: i for i, name_ in enumerate(elements)}
        self._np = None

    # -- basics ---------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, element: str | int) -> int:
        """Resolve an element name (or index) to its index."""
        if isinstance(element, str):
            try:
                return self._index[element]
            except KeyError:
                raise ValidationError(
                    f"{self.name} has no element named {element!r}"
                ) from None
        i = int(element)
        if not 0 <= i < self.size:
            raise ValidationError(f"element index {i} out of range for {self.name}")
        return i

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
        """numpy views of (meet, join, neg), cached."""
        if self._np is None:
            m = np.array(self.meet, dtype=np.int16)
            j = np.array(self.join, dtype=np.int16)
            g = None if self.neg is None else np.array(self.neg, dtype=np.int16)
            self._np = (m, j, g)
        return self._np

    def __repr__(self) -> str:
        sig = "<2,2,1>" if self.neg is not None else "<2,2>"
        return f"FiniteAlgebra({self.name!r}, {self.size} elements, {sig})"

    def rename(self, name: str) -> "FiniteAlgebra":
        return FiniteAlgebra(name, self.elements, self.meet, self.join, self.neg)

    def rename_elements(self, mapping: Mapping[str, str]) -> "FiniteAlgebra":
        new = [mapping.get(e, e) for e in self.elements]
        return FiniteAlgebra(self.name, new, self.meet, self.join, self.neg)

    def permute(self, order: Sequence[str | int]) -> "FiniteAlgebra":
        """Reorder the carrier; `order` lists every element exactly once."""
        perm = [self.index(e) for e in order]
        if sorted(perm) != list(range(self.size)):
            raise ValidationError("permutation must mention every element once")
        pos = {old: new for new, old in enumerate(perm)}
        n = self.size
        meet = [[pos[self.meet[perm[a]][perm[b]]] for b in range(n)] for a in range(n)]
        join = [[pos[self.join[perm[a]][perm[b]]] for b in range(n)] for a in range(n)]
        neg = None if self.neg is None else [pos[self.neg[perm[a]]] for a in range(n)]
        return FiniteAlgebra(
            self.name, [self.elements[p] for p in perm], meet, join, neg
        )


# ---------------------------------------------------------------------------
# evaluation and satisfaction

def eval_term(algebra: FiniteAlgebra, term: Term, assignment: Mapping[str, str | int]) -> str:
    """Evaluate `term` under `assignment` (names or indices); returns a name."""
    return algebra.elements[_eval_idx(algebra, term, assignment)]


def _eval_idx(A: FiniteAlgebra, t: Term, asg: Mapping[str, str | int]) -> int:
    if isinstance(t, Var):
        if t.name not in asg:
            raise ValidationError(f"no assignment for variable {t.name!r}")
        return A.index(asg[t.name])
    if isinstance(t, Neg):
        if A.neg is None:
            raise ValidationError(
                f"term uses ~ but {A.name} has no negation"
            )
        return A.neg[_eval_idx(A, t.child, asg)]
    if isinstance(t, Meet):
        return A.meet[_eval_idx(A, t.left, asg)][_eval_idx(A, t.right, asg)]
    if isinstance(t, Join):
        return A.join[_eval_idx(A, t.left, asg)][_eval_idx(A, t.right, asg)]
    raise TypeError(f"not a term: {t!r}")


@dataclass(frozen=True)
class SatisfactionResult:
    """Outcome of checking one identity: truth plus a least counterexample."""

    holds: bool
    counterexample: dict[str, str] | None = None

    def __bool__(self) -> bool:
        return self.holds


def _grid_eval(A: FiniteAlgebra, t: Term, grids: dict[str, np.ndarray]) -> np.ndarray:
    meet, join, neg = A.arrays()
    if isinstance(t, Var):
        return grids[t.name]
    if isinstance(t, Neg):
        if neg is None:
            raise ValidationError(f"term uses ~ but {A.name} has no negation")
        return neg[_grid_eval(A, t.child, grids)]
    if isinstance(t, Meet):
        return meet[_grid_eval(A, t.left, grids), _grid_eval(A, t.right, grids)]
    if isinstance(t, Join):
        return join[_grid_eval(A, t.left, grids), _grid_eval(A, t.right, grids)]
    raise TypeError(f"not a term: {t!r}")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DMBL_THREADS", "1")))
    except ValueError:
        return 1


def satisfies(algebra: FiniteAlgebra, identity: Identity) -> SatisfactionResult:
    """Check an identity over all assignments.

    The counterexample, when there is one, is the lexicographically least
    assignment (variables sorted by name, elements ordered as in the algebra),
    independent of DMBL_THREADS.
    """
    names = sorted(variables(identity.lhs) | variables(identity.rhs))
    k = len(names)
    n = algebra.size
    if k == 0:
        raise ValidationError("identity contains no variables")

    ar = np.arange(n, dtype=np.int16)

    def scan(first_range: np.ndarray) -> int | None:
        # axis 0 runs over first_range for the first variable, the remaining
        # variables get a full axis each; returns a flat offset or None
        grids = {}
        for axis, v in enumerate(names):
            shape = [1] * k
            shape[axis] = -1
            base = first_range if axis == 0 else ar
            grids[v] = base.reshape(shape)
        lhs = _grid_eval(algebra, identity.lhs, grids)
        rhs = _grid_eval(algebra, identity.rhs, grids)
        bad = lhs != rhs
        if not bad.any():
            return None
        flat = int(np.argmax(bad.reshape(first_range.size, -1).reshape(-1)))
        return flat

    workers = _threads()
    hit: int | None = None
    if workers == 1 or n < 2 or k == 1:
        hit = scan(ar)
    else:
        chunks = np.array_split(ar, min(workers, n))
        block = n ** (k - 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(scan, chunks))
        offset = 0
        for chunk, res in zip(chunks, results):
            if res is not None:
                hit = offset * block + res
                break
            offset += chunk.size
    if hit is None:
        return SatisfactionResult(True, None)
    coords = np.unravel_index(hit, (n,) * k)
    cex = {v: algebra.elements[int(c)] for v, c in zip(names, coords)}
    return SatisfactionResult(False, cex)


def satisfies_all(algebra: FiniteAlgebra, identities: Iterable[Identity]) -> SatisfactionResult:
    for e in identities:
        res = satisfies(algebra, e)
        if not res:
            return res
    return SatisfactionResult(True, None)


# ---------------------------------------------------------------------------
# constructions

def product(a: FiniteAlgebra, b: FiniteAlgebra) -> FiniteAlgebra:
    """Direct product; both factors must have negation, or neither."""
    if (a.neg is None) != (b.neg is None):
        raise ValidationError("cannot form a product of a <2,2,1> and a <2,2> algebra")
    na, nb = a.size, b.size
    names = [f"({p},{q})" for p in a.elements for q in b.elements]

    def pair(i, j):
        return i * nb + j

    meet = [[0] * (na * nb) for _ in range(na * nb)]
    join = [[0] * (na * nb) for _ in range(na * nb)]
    for i in range(na):
        for j in range(nb):
            for k in range(na):
                for l in range(nb):
                    meet[pair(i, j)][pair(k, l)] = pair(a.meet[i][k], b.meet[j][l])
                    join[pair(i, j)][pair(k, l)] = pair(a.join[i][k], b.join[j][l])
    neg = None
    if a.neg is not None:
        neg = [pair(a.neg[i], b.neg[j]) for i in range(na) for j in range(nb)]
    return FiniteAlgebra(f"{a.name}x{b.name}", names, meet, join, neg)


def power(a: FiniteAlgebra, k: int) -> FiniteAlgebra:
    """Direct power with flat tuple names "(a,b,...)"."""
    if k < 1:
        raise ValidationError("power needs k >= 1")
    out = a
    for _ in range(k - 1):
        out = product(out, a)
    if k > 1:
        # flatten "((a,b),c)"-style names
        flat = [
            "(" + nm.replace("(", "").replace(")", "") + ")" for nm in out.elements
        ]
        out = FiniteAlgebra(f"{a.name}^{k}", flat, out.meet, out.join, out.neg)
    return out


def subalgebra_generated(
    algebra: FiniteAlgebra, seed: Iterable[str | int]
) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    """Smallest subuniverse containing `seed`, as an algebra plus inclusion.

    The returned tuple maps local indices to parent indices; element names are
    inherited, and the local order follows the parent order.
    """
    idx = sorted({algebra.index(e) for e in seed})
    if not idx:
        raise ValidationError("seed must be nonempty")
    current = set(idx)
    while True:
        new = set()
        for a in current:
            if algebra.neg is not None:
                new.add(algebra.neg[a])
            for b in current:
                new.add(algebra.meet[a][b])
                new.add(algebra.join[a][b])
        if new <= current:
            break
        current |= new
    inclusion = tuple(sorted(current))
    pos = {p: i for i, p in enumerate(inclusion)}
    meet = [[pos[algebra.meet[p][q]] for q in inclusion] for p in inclusion]
    join = [[pos[algebra.join[p][q]] for q in inclusion] for p in inclusion]
    neg = None
    if algebra.neg is not None:
        neg = [pos[algebra.neg[p]] for p in inclusion]
    names = [algebra.elements[p] for p in inclusion]
    sub = FiniteAlgebra(f"<{algebra.name}:{len(inclusion)}>", names, meet, join, neg)
    return sub, inclusion


# ---------------------------------------------------------------------------
# congruences

CONGRUENCE_SIZE_LIMIT = 32


@dataclass(frozen=True)
class Congruence:
    """A congruence, stored as a canonical partition.

    ``block_of[x]`` is the block id of element x; ids are numbered by first
    occurrence, so equal partitions are equal tuples.  ``blocks`` groups the
    element indices.
    """

    block_of: tuple[int, ...]

    @staticmethod
    def from_blocks(n: int, blocks: Iterable[Iterable[int]]) -> "Congruence":
        bo = [-1] * n
        for b, members in enumerate(blocks):
            for x in members:
                if bo[x] != -1:
                    raise ValidationError("blocks overlap")
                bo[x] = b
        if any(v == -1 for v in bo):
            raise ValidationError("blocks must cover every element")
        return Congruence(_canon(bo))

    @property
    def size(self) -> int:
        return len(self.block_of)

    @property
    def num_blocks(self) -> int:
        return max(self.block_of) + 1

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for x, b in enumerate(self.block_of):
            out[b].append(x)
        return tuple(tuple(b) for b in out)

    def related(self, a: int, b: int) -> bool:
        return self.block_of[a] == self.block_of[b]

    def is_identity(self) -> bool:
        return self.num_blocks == self.size

    def is_total(self) -> bool:
        return self.num_blocks == 1

    def refines(self, other: "Congruence") -> bool:
        seen: dict[int, int] = {}
        for mine, theirs in zip(self.block_of, other.block_of):
            if mine in seen:
                if seen[mine] != theirs:
                    return False
            else:
                seen[mine] = theirs
        return True


def _canon(block_of: Sequence[int]) -> tuple[int, ...]:
    relabel: dict[int, int] = {}
    out = []
    for b in block_of:
        if b not in relabel:
            relabel[b] = len(relabel)
        out.append(relabel[b])
    return tuple(out)


def _ops_of(A: FiniteAlgebra) -> list[tuple[int, Sequence]]:
    ops: list[tuple[int, Sequence]] = [(2, A.meet), (2, A.join)]
    if A.neg is not None:
        ops.append((1, A.neg))
    return ops


def principal_congruence_ops(n: int, ops: Sequence[tuple[int, Sequence]], a: int, b: int) -> Congruence:
    """Cg(a,b) for an algebra given as (arity, table) pairs."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = [(a, b)]
    while queue:
        u, v = queue.pop()
        ru, rv = find(u), find(v)
        if ru == rv:
            continue
        parent[ru] = rv
        # propagate along every operation applied to the newly merged pair
        for arity, table in ops:
            if arity == 1:
                queue.append((table[u], table[v]))
            else:
                for c in range(n):
                    queue.append((table[u][c], table[v][c]))
                    queue.append((table[c][u], table[c][v]))
    return Congruence(_canon([find(x) for x in range(n)]))


def _join_partitions(p: Congruence, q: Congruence) -> Congruence:
    # transitive closure of the union; for congruences this is their join
    n = p.size
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for part in (p, q):
        first: dict[int, int] = {}
        for x, b in enumerate(part.block_of):
            if b in first:
                union(first[b], x)
            else:
                first[b] = x
    return Congruence(_canon([find(x) for x in range(n)]))


def meet_partitions(p: Congruence, q: Congruence) -> Congruence:
    pairs = {}
    out = []
    for a, b in zip(p.block_of, q.block_of):
        key = (a, b)
        if key not in pairs:
            pairs[key] = len(pairs)
        out.append(pairs[key])
    return Congruence(tuple(out))


def is_congruence(algebra: FiniteAlgebra, part: Congruence) -> bool:
    if part.size != algebra.size:
        return False
    bo = part.block_of
    n = algebra.size
    for arity, table in _ops_of(algebra):
        if arity == 1:
            for a in range(n):
                for b in range(n):
                    if bo[a] == bo[b] and bo[table[a]] != bo[table[b]]:
                        return False
        else:
            for a in range(n):
                for b in range(n):
                    if bo[a] != bo[b]:
                        continue
                    for c in range(n):
                        if bo[table[a][c]] != bo[table[b][c]]:
                            return False
                        if bo[table[c][a]] != bo[table[c][b]]:
                            return False
    return True


def congruences_ops(n: int, ops: Sequence[tuple[int, Sequence]]) -> list[Congruence]:
    """All congruences: principal ones closed under join."""
    if n > CONGRUENCE_SIZE_LIMIT:
        raise ValidationError(
            f"congruence enumeration limited to {CONGRUENCE_SIZE_LIMIT} elements, got {n}"
        )
    delta = Congruence(tuple(range(n)))
    found = {delta}
    principals = set()
    for a in range(n):
        for b in range(a + 1, n):
            principals.add(principal_congruence_ops(n, ops, a, b))
    found |= principals
    frontier = set(found)
    while frontier:
        new = set()
        for p in frontier:
            for q in principals:
                j = _join_partitions(p, q)
                if j not in found:
                    new.add(j)
        found |= new
        frontier = new
    return sorted(found, key=lambda c: (c.num_blocks, c.block_of), reverse=True)


def congruences(algebra: FiniteAlgebra) -> list[Congruence]:
    """Every congruence of the algebra, identity first, total last."""
    out = congruences_ops(algebra.size, _ops_of(algebra))
    out.sort(key=lambda c: (-c.num_blocks, c.block_of))
    return out


def principal_congruence(algebra: FiniteAlgebra, a: str | int, b: str | int) -> Congruence:
    return principal_congruence_ops(
        algebra.size, _ops_of(algebra), algebra.index(a), algebra.index(b)
    )


def monolith(algebra: FiniteAlgebra) -> Congruence | None:
    """Least nontrivial congruence, or None if the principals don't intersect
    above the identity (i.e. the algebra is not subdirectly irreducible)."""
    n = algebra.size
    if n == 1:
        return None
    mono: Congruence | None = None
    for a in range(n):
        for b in range(a + 1, n):
            cg = principal_congruence(algebra, a, b)
            mono = cg if mono is None else meet_partitions(mono, cg)
            if mono.is_identity():
                return None
    return mono


def is_subdirectly_irreducible(algebra: FiniteAlgebra) -> bool:
    """True when the algebra has a least nontrivial congruence.

    One-element algebras count as subdirectly irreducible (the usual
    convention: they have no pair of distinct congruences to separate).
    """
    if algebra.size == 1:
        return True
    return monolith(algebra) is not None


def quotient(algebra: FiniteAlgebra, part: Congruence) -> FiniteAlgebra:
    if not is_congruence(algebra, part):
        raise ValidationError("partition is not a congruence of the algebra")
    blocks = part.blocks
    reps = [b[0] for b in blocks]
    names = []
    for b in blocks:
        if len(b) == 1:
            names.append(algebra.elements[b[0]])
        else:
            names.append("{" + ",".join(algebra.elements[x] for x in b) + "}")
    bo = part.block_of
    meet = [[bo[algebra.meet[r][s]] for s in reps] for r in reps]
    join = [[bo[algebra.join[r][s]] for s in reps] for r in reps]
    neg = None if algebra.neg is None else [bo[algebra.neg[r]] for r in reps]
    return FiniteAlgebra(f"{algebra.name}/~", names, meet, join, neg)


# ---------------------------------------------------------------------------
# isomorphism

def _generating_set(A: FiniteAlgebra) -> list[int]:
    # greedy small generating set
    gens: list[int] = []
    have: set[int] = set()
    while len(have) < A.size:
        # pick the element whose addition grows the closure the most
        best, best_cl = None, None
        for x in range(A.size):
            if x in have:
                continue
            _, incl = subalgebra_generated(A, list(have) + [x]) if have else subalgebra_generated(A, [x])
            cl = set(incl)
            if best_cl is None or len(cl) > len(best_cl):
                best, best_cl = x, cl
        gens.append(best)  # type: ignore[arg-type]
        have = best_cl  # type: ignore[assignment]
    return gens


def _colors(A: FiniteAlgebra) -> list[int]:
    # iterated structural refinement; the re-encoding sorts the distinct keys
    # so that equal structures get equal colors in *different* algebras
    n = A.size
    colors: list[int] = [0] * n
    if A.neg is not None:
        colors = [int(A.neg[x] == x) for x in range(n)]
    for _ in range(n):
        nxt = []
        for x in range(n):
            row = sorted(
                (colors[y], colors[A.meet[x][y]], colors[A.meet[y][x]],
                 colors[A.join[x][y]], colors[A.join[y][x]])
                for y in range(n)
            )
            key = (colors[x], colors[A.neg[x]] if A.neg is not None else -1, tuple(row))
            nxt.append(key)
        ranks = {k: r for r, k in enumerate(sorted(set(nxt)))}
        fresh = [ranks[k] for k in nxt]
        if fresh == colors:
            break
        colors = fresh
        if len(ranks) == n:
            break
    return colors


def _extend_map(A: FiniteAlgebra, B: FiniteAlgebra, gen_map: dict[int, int]) -> dict[int, int] | None:
    # grow gen_map homomorphically over the closure; None on conflict
    mapping = dict(gen_map)
    frontier = list(mapping)
    while frontier:
        new: dict[int, int] = {}

        def put(src: int, dst: int) -> bool:
            if src in mapping:
                return mapping[src] == dst
            if src in new:
                return new[src] == dst
            new[src] = dst
            return True

        known = list(mapping.items())
        for a, u in known:
            if A.neg is not None:
                if not put(A.neg[a], B.neg[u]):  # type: ignore[index]
                    return None
            for b, v in known:
                if not put(A.meet[a][b], B.meet[u][v]):
                    return None
                if not put(A.join[a][b], B.join[u][v]):
                    return None
        if not new:
            break
        mapping.update(new)
        frontier = list(new)
    if len(mapping) != A.size:
        return None  # gens did not generate (shouldn't happen) or map partial
    # bijectivity + full homomorphism check
    image = set(mapping.values())
    if len(image) != A.size:
        return None
    for a in range(A.size):
        for b in range(A.size):
            if mapping[A.meet[a][b]] != B.meet[mapping[a]][mapping[b]]:
                return None
            if mapping[A.join[a][b]] != B.join[mapping[a]][mapping[b]]:
                return None
        if A.neg is not None and mapping[A.neg[a]] != B.neg[mapping[a]]:  # type: ignore[index]
            return None
    return mapping


def is_isomorphic(a: FiniteAlgebra, b: FiniteAlgebra) -> dict[str, str] | None:
    """An isomorphism as a name->name dict, or None."""
    if a.size != b.size or (a.neg is None) != (b.neg is None):
        return None
    ca, cb = _colors(a), _colors(b)
    if sorted(ca) != sorted(cb):
        return None
    gens = _generating_set(a)
    by_color: dict[int, list[int]] = {}
    for x in range(b.size):
        by_color.setdefault(cb[x], []).append(x)

    def backtrack(i: int, gen_map: dict[int, int], used: set[int]) -> dict[int, int] | None:
        if i == len(gens):
            return _extend_map(a, b, gen_map)
        g = gens[i]
        for cand in by_color.get(ca[g], ()):
            if cand in used:
                continue
            gen_map[g] = cand
            used.add(cand)
            res = backtrack(i + 1, gen_map, used)
            if res is not None:
                return res
            used.discard(cand)
            del gen_map[g]
        return None

    found = backtrack(0, {}, set())
    if found is None:
        return None
    return {a.elements[x]: b.elements[y] for x, y in found.items()}


# ---------------------------------------------------------------------------
# duality and class membership

def dual(algebra: FiniteAlgebra) -> FiniteAlgebra:
    """Same carrier, meet and join tables swapped."""
    return FiniteAlgebra(
        f"{algebra.name}^op", algebra.elements, algebra.join, algebra.meet, algebra.neg
    )


def _parse_axioms(texts: Sequence[str]) -> tuple[Identity, ...]:
    from .terms import parse_identity

    return tuple(parse_identity(t) for t in texts)


_BISEMILATTICE = (
    "x /\\ x = x",
    "x /\\ y = y /\\ x",
    "(x /\\ y) /\\ z = x /\\ (y /\\ z)",
    "x \\/ x = x",
    "x \\/ y = y \\/ x",
    "(x \\/ y) \\/ z = x \\/ (y \\/ z)",
)
_DISTRIBUTIVITY = (
    "x /\\ (y \\/ z) = (x /\\ y) \\/ (x /\\ z)",
    "x \\/ (y /\\ z) = (x \\/ y) /\\ (x \\/ z)",
)
_ABSORPTION = (
    "x /\\ (x \\/ y) = x",
    "x \\/ (x /\\ y) = x",
)
_DE_MORGAN = (
    "~~x = x",
    "~(x /\\ y) = ~x \\/ ~y",
    "~(x \\/ y) = ~x /\\ ~y",
)

_CLASS_AXIOMS: dict[str, tuple[tuple[str, ...], bool]] = {
    # name -> (axioms, needs negation)
    "distributive lattice": (_BISEMILATTICE + _ABSORPTION + _DISTRIBUTIVITY, False),
    "distributive bisemilattice": (_BISEMILATTICE + _DISTRIBUTIVITY, False),
    "De Morgan bisemilattice": (_BISEMILATTICE + _DISTRIBUTIVITY + _DE_MORGAN, True),
    "De Morgan lattice": (
        _BISEMILATTICE + _ABSORPTION + _DISTRIBUTIVITY + _DE_MORGAN,
        True,
    ),
    "involutive semilattice": (
        _BISEMILATTICE + _DISTRIBUTIVITY + _DE_MORGAN + ("x /\\ y = x \\/ y",),
        True,
    ),
    "Kleene lattice": (
        _BISEMILATTICE + _ABSORPTION + _DISTRIBUTIVITY + _DE_MORGAN
        + ("(x /\\ ~x) /\\ (y \\/ ~y) = x /\\ ~x",),
        True,
    ),
    "Boolean-algebra-reduct": (
        _BISEMILATTICE + _ABSORPTION + _DISTRIBUTIVITY + _DE_MORGAN
        + ("x /\\ (y \\/ ~y) = x",),
        True,
    ),
}

ALGEBRA_CLASSES = tuple(_CLASS_AXIOMS)

_AXIOM_CACHE: dict[str, tuple[Identity, ...]] = {}


def is_class(algebra: FiniteAlgebra, cls: str) -> bool:
    """Does the algebra lie in one of the named equational classes?

    Classes: distributive lattice, distributive bisemilattice, De Morgan
    bisemilattice, De Morgan lattice, involutive semilattice, Kleene lattice,
    Boolean-algebra-reduct.
    """
    if cls not in _CLASS_AXIOMS:
        raise ValidationError(
            f"unknown class {cls!r}; expected one of {', '.join(_CLASS_AXIOMS)}"
        )
    texts, needs_neg = _CLASS_AXIOMS[cls]
    if needs_neg and algebra.neg is None:
        return False
    if cls not in _AXIOM_CACHE:
        _AXIOM_CACHE[cls] = _parse_axioms(texts)
    return bool(satisfies_all(algebra, _AXIOM_CACHE[cls]))


# ---------------------------------------------------------------------------
# JSON round trip

def algebra_to_json(algebra: FiniteAlgebra) -> dict:
    return {
        "name": algebra.name,
        "elements": list(algebra.elements),
        "meet": [list(r) for r in algebra.meet],
        "join": [list(r) for r in algebra.join],
        "neg": None if algebra.neg is None else list(algebra.neg),
    }


def algebra_from_json(data: Mapping) -> FiniteAlgebra:
    try:
        return FiniteAlgebra(
            data["name"], data["elements"], data["meet"], data["join"], data.get("neg")
        )
    except KeyError as exc:
        raise ValidationError(f"algebra JSON missing key {exc}") from None


def save_algebra(algebra: FiniteAlgebra, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(algebra_to_json(algebra), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_algebra(path: str) -> FiniteAlgebra:
    with open(path, encoding="utf-8") as fh:
        return algebra_from_json(json.load(fh))
