"""Finitely generated abelian groups with exact integer arithmetic.

A group is Z^rank + Z/t1 + ... + Z/tk; elements are integer coordinate
vectors, canonical means each torsion coordinate is reduced mod its order.
Homomorphisms are integer matrices acting on coordinates.  Everything that
matters downstream (indices, transversals, coset decompositions, kernels)
comes out of one column-style Hermite normal form with its unimodular
transform, so all answers are exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Tuple

Matrix = Tuple[Tuple[int, ...], ...]


class AbelianError(ValueError):
    """Raised for malformed groups, elements, or homomorphisms."""


@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^rank + Z/torsion[0] + Z/torsion[1] + ...  Coordinates: free first."""

    rank: int
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise AbelianError("rank must be >= 0")
        for t in self.torsion:
            if t < 2:
                raise AbelianError(f"torsion order must be >= 2, got {t}")

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def canonical(self, coords) -> Tuple[int, ...]:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.ngens:
            raise AbelianError(
                f"expected {self.ngens} coordinates, got {len(coords)}")
        free = coords[: self.rank]
        tors = tuple(c % t for c, t in zip(coords[self.rank:], self.torsion))
        return free + tors

    def element(self, coords) -> "AbElement":
        return AbElement(self, self.canonical(coords))

    def identity(self) -> "AbElement":
        return self.element((0,) * self.ngens)

    def generators(self) -> Tuple["AbElement", ...]:
        n = self.ngens
        return tuple(
            self.element(tuple(1 if j == i else 0 for j in range(n)))
            for i in range(n)
        )

    def elements(self) -> Iterator["AbElement"]:
        """All elements; only valid for finite groups."""
        if self.rank > 0:
            raise AbelianError("cannot enumerate an infinite group")
        for coords in itertools.product(*(range(t) for t in self.torsion)):
            yield self.element(coords)

    def order(self) -> Optional[int]:
        if self.rank > 0:
            return None
        n = 1
        for t in self.torsion:
            n *= t
        return n

    def __str__(self) -> str:
        return format_group(self)


@dataclass(frozen=True)
class AbElement:
    group: FgAbelianGroup
    coords: Tuple[int, ...]

    def __add__(self, other: "AbElement") -> "AbElement":
        if self.group != other.group:
            raise AbelianError("cannot add elements of different groups")
        return self.group.element(
            tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "AbElement":
        return self.group.element(tuple(-a for a in self.coords))

    def __sub__(self, other: "AbElement") -> "AbElement":
        return self + (-other)

    def scale(self, k: int) -> "AbElement":
        return self.group.element(tuple(k * a for a in self.coords))

    def is_identity(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __str__(self) -> str:
        return format_element(self)


def ab_op(op: str, a: AbElement, b: Optional[AbElement] = None) -> AbElement:
    """Exact group arithmetic: op in {'add', 'sub', 'neg'}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "neg":
        return -a
    raise AbelianError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# integer matrices / Hermite form


def _check_matrix(matrix, nrows: int, ncols: int) -> Matrix:
    rows = tuple(tuple(int(x) for x in row) for row in matrix)
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        raise AbelianError(
            f"matrix must be {nrows}x{ncols}, got "
            f"{len(rows)}x{[len(r) for r in rows]}")
    return rows


def column_hermite(mat_cols):
    """Column-style Hermite form of an integer matrix given as columns.

    Returns (h_cols, u_cols, pivots) with h = mat * u (column operations),
    u unimodular, pivots a list of (row, col) pairs with ascending rows,
    pivot entries positive, entries to the left of a pivot in its row lying
    in [0, pivot), and all columns beyond the last pivot zero.
    """
    cols = [list(c) for c in mat_cols]
    k = len(cols)
    m = len(cols[0]) if k else 0
    u = [[1 if i == j else 0 for i in range(k)] for j in range(k)]
    cur = 0
    pivots = []

    def addmul(dst, src, q):
        if q == 0:
            return
        cd, cs = cols[dst], cols[src]
        for i in range(m):
            cd[i] -= q * cs[i]
        ud, us = u[dst], u[src]
        for i in range(k):
            ud[i] -= q * us[i]

    for row in range(m):
        while True:
            nz = [j for j in range(cur, k) if cols[j][row] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: (abs(cols[j][row]), j))
            if j0 != cur:
                cols[cur], cols[j0] = cols[j0], cols[cur]
                u[cur], u[j0] = u[j0], u[cur]
            done = True
            for j in range(cur + 1, k):
                if cols[j][row] == 0:
                    continue
                q = cols[j][row] // cols[cur][row]
                addmul(j, cur, q)
                if cols[j][row] != 0:
                    done = False
            if done:
                break
        if cur < k and cols[cur][row] != 0:
            if cols[cur][row] < 0:
                cols[cur] = [-x for x in cols[cur]]
                u[cur] = [-x for x in u[cur]]
            piv = cols[cur][row]
            for c in range(cur):
                q = cols[c][row] // piv
                addmul(c, cur, q)
            pivots.append((row, cur))
            cur += 1
            if cur == k:
                break
    return [tuple(c) for c in cols], [tuple(c) for c in u], pivots


class _CosetMachine:
    """Coset data for the image lattice of a homomorphism inside its target.

    The lattice is spanned by the matrix columns together with the target's
    torsion relations; cosets of that lattice in Z^m are exactly cosets of
    the image subgroup in the target group.
    """

    def __init__(self, hom: "AbHom"):
        src, tgt = hom.source, hom.target
        m, n = tgt.ngens, src.ngens
        acols = [tuple(hom.matrix[i][j] for i in range(m)) for j in range(n)]
        for idx, t in enumerate(tgt.torsion):
            col = [0] * m
            col[tgt.rank + idx] = t
            acols.append(tuple(col))
        self.m = m
        self.n = n
        self.hom = hom
        self.h, self.u, self.pivots = column_hermite(acols)
        self.full_rank = len(self.pivots) == m

    @property
    def index(self) -> Optional[int]:
        if not self.full_rank:
            return None
        out = 1
        for row, col in self.pivots:
            out *= self.h[col][row]
        return out

    def box_reduce(self, coords):
        """Reduce a target coordinate vector into the Hermite residue box.

        Returns (residue vector, pivot-column coefficients used).
        """
        if not self.full_rank:
            raise AbelianError("infinite index: no finite residue box")
        x = list(coords)
        qs = []
        for row, col in self.pivots:
            piv = self.h[col][row]
            q = x[row] // piv
            if q:
                hc = self.h[col]
                for i in range(self.m):
                    x[i] -= q * hc[i]
            qs.append(q)
        return tuple(x), qs

    def preimage_part(self, qs) -> AbElement:
        """Source element h with alpha(h) = (reduced-away part), from box_reduce."""
        v = [0] * (self.n + len(self.hom.target.torsion))
        for (row, col), q in zip(self.pivots, qs):
            if q:
                uc = self.u[col]
                for i in range(len(v)):
                    v[i] += q * uc[i]
        return self.hom.source.element(tuple(v[: self.n]))

    @cached_property
    def transversal(self) -> Tuple[AbElement, ...]:
        if not self.full_rank:
            raise AbelianError("infinite index: no finite transversal")
        ranges = [range(self.h[col][row]) for row, col in self.pivots]
        out = []
        for point in itertools.product(*ranges):
            vec = [0] * self.m
            for (row, _col), val in zip(self.pivots, point):
                vec[row] = val
            out.append(self.hom.target.element(tuple(vec)))
        return tuple(out)

    def kernel_generators(self):
        r = len(self.pivots)
        gens = []
        for j in range(r, len(self.u)):
            proj = self.u[j][: self.n]
            gens.append(self.hom.source.element(proj))
        return gens


@dataclass(frozen=True)
class AbHom:
    """Homomorphism between f.g. abelian groups, as an integer matrix.

    matrix has target.ngens rows and source.ngens columns; it sends the i-th
    source generator to the element with coordinates matrix[:, i].
    """

    source: FgAbelianGroup
    target: FgAbelianGroup
    matrix: Matrix

    def __post_init__(self):
        mat = _check_matrix(self.matrix, self.target.ngens, self.source.ngens)
        object.__setattr__(self, "matrix", mat)
        # well-definedness: source torsion relations must map into target
        # relations, otherwise the matrix does not define a homomorphism.
        for idx, t in enumerate(self.source.torsion):
            col = self.source.rank + idx
            for i in range(self.target.rank):
                if t * self.matrix[i][col] != 0:
                    raise AbelianError(
                        "matrix does not respect source torsion "
                        f"(free target row {i}, source generator {col})")
            for j, tt in enumerate(self.target.torsion):
                if (t * self.matrix[self.target.rank + j][col]) % tt != 0:
                    raise AbelianError(
                        "matrix does not respect source torsion "
                        f"(torsion target row {j}, source generator {col})")

    @cached_property
    def _machine(self) -> _CosetMachine:
        return _CosetMachine(self)

    def apply(self, g: AbElement) -> AbElement:
        if g.group != self.source:
            raise AbelianError("element not in the source group")
        coords = tuple(
            sum(self.matrix[i][j] * g.coords[j] for j in range(self.source.ngens))
            for i in range(self.target.ngens)
        )
        return self.target.element(coords)

    def is_injective(self) -> bool:
        return all(g.is_identity() for g in self._machine.kernel_generators())

    def kernel_witness(self) -> Optional[AbElement]:
        """A nontrivial kernel element, or None when injective."""
        for g in self._machine.kernel_generators():
            if not g.is_identity():
                return g
        return None

    def is_surjective(self) -> bool:
        return self._machine.index == 1


def hom_apply(hom: AbHom, g: AbElement) -> AbElement:
    return hom.apply(g)


def subgroup_index(hom: AbHom) -> Optional[int]:
    """Index of the image subgroup in the target; None means infinite."""
    return hom._machine.index


def transversal(hom: AbHom) -> Tuple[AbElement, ...]:
    """Canonical coset representatives for target / image, identity first.

    Lexicographic enumeration of the Hermite residue box; for Z with
    multiplier w this is 0, 1, ..., |w|-1.
    """
    return hom._machine.transversal


def coset_decompose(hom: AbHom, g: AbElement) -> Tuple[AbElement, AbElement]:
    """Write g = t + hom(h) with t the canonical representative of g's coset.

    Returns (t, h); h is unique when hom is injective.
    """
    if g.group != hom.target:
        raise AbelianError("element not in the target group")
    machine = hom._machine
    residue, qs = machine.box_reduce(g.coords)
    t = hom.target.element(residue)
    h = machine.preimage_part(qs)
    return t, h


# ---------------------------------------------------------------------------
# parsing / formatting


def parse_group_spec(text: str) -> FgAbelianGroup:
    """Parse '1', 'Z', 'Z/4', 'Z^2', 'Z^2 + Z/3 + Z/3' and friends."""
    s = text.strip()
    if not s:
        raise AbelianError("empty group spec")
    if s == "1":
        return FgAbelianGroup(0, ())
    rank = 0
    torsion = []
    for term in s.split("+"):
        term = term.strip()
        if term == "Z":
            rank += 1
        elif term.startswith("Z^"):
            r = _parse_int(term[2:], term)
            if r < 1:
                raise AbelianError(f"bad free rank in {term!r}")
            rank += r
        elif term.startswith("Z/"):
            t = _parse_int(term[2:], term)
            if t < 2:
                raise AbelianError(f"bad torsion order in {term!r}")
            torsion.append(t)
        else:
            raise AbelianError(f"bad group term {term!r}")
    return FgAbelianGroup(rank, tuple(torsion))


def _parse_int(text: str, context: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise AbelianError(f"bad integer in {context!r}") from None


def format_group(group: FgAbelianGroup) -> str:
    terms = []
    if group.rank == 1:
        terms.append("Z")
    elif group.rank > 1:
        terms.append(f"Z^{group.rank}")
    terms.extend(f"Z/{t}" for t in group.torsion)
    return " + ".join(terms) if terms else "1"


def parse_element_literal(group: FgAbelianGroup, text: str) -> AbElement:
    """Parse '(1,0)', '(2)', '()' as coordinates in the given group."""
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise AbelianError(f"element literal must be parenthesized: {text!r}")
    inner = s[1:-1].strip()
    if not inner:
        coords = ()
    else:
        coords = tuple(_parse_int(p, text) for p in inner.split(","))
    return group.element(coords)


def format_element(g: AbElement) -> str:
    return "(" + ",".join(str(c) for c in g.coords) + ")"
