"""Exact models of the operator family generating the boundary algebra.

The boundary action is implemented by one shift per oriented edge and
one partial unitary per vertex-group element, tied together by four
relations: fibre projections are orthogonal (G1), group elements pass
through a shift along the edge inclusions (G2), the two directions of
an edge split its source fibre (G3), and the range of a shift refines
into the cylinder projections one level down (G4).  This module
realizes the family in two independent ways and checks them against
each other:

* symbolically, as a product calculus on the spanning monomials
  s_mu u_g s_nu* over reduced paths, and
* concretely, as sparse rational matrices acting on a finite slice of
  the orbit of an eventually periodic boundary ray.

It also builds the directed graph whose vertices are the depth-one
paths and whose edges are the depth-two paths, and verifies the
Cuntz-Krieger identities presenting the boundary algebra as a graph
algebra.  All arithmetic is exact.  Truncation never fakes a zero: a
basis vector whose image falls off the slice is marked as boundary
and excluded from every check instead of being rounded away.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

from .abelian import AbElement, format_element
from .bstree import enumerate_paths
from .gog import GraphOfGroups, baumslag_solitar
from .words import (GWord, Pair, ReducedGWord, WordError, concat, format_word,
                    group_word, parse_word_literal, reduce, trivial_path)


class GfamilyError(ValueError):
    pass


class DepthGuardExceeded(GfamilyError):
    """A product needed monomials deeper than the caller allowed."""


class CarryOverflow(GfamilyError):
    """A pushed group element failed to settle into a repeating state,
    so the resulting boundary point has no finite description here."""


DEFAULT_CAP = 4096
DEFAULT_DEPTH_GUARD = 8


# ---------------------------------------------------------------------------
# boundary points with eventually periodic tails


def _primitive(cycle: tuple[Pair, ...]) -> tuple[Pair, ...]:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle[:d] * (n // d) == cycle:
            return cycle[:d]
    return cycle


@dataclass(frozen=True, eq=False)
class OrbitPoint:
    """An infinite reduced word written as prefix + cycle + cycle + ...

    The stored form is canonical: the cycle is primitive and the
    prefix is as short as possible (a prefix letter matching the last
    cycle letter is absorbed by rotating the cycle), so two points are
    equal exactly when their fields are.  Every letter must carry the
    chosen coset representative for its edge, and no identity letter
    may follow the reverse of the previous edge, including across the
    wrap from the end of the cycle back to its start.
    """

    gog: GraphOfGroups = field(repr=False)
    range_vertex: str
    prefix: tuple[Pair, ...]
    cycle: tuple[Pair, ...]

    def __post_init__(self):
        prefix = tuple(self.prefix)
        cycle = _primitive(tuple(self.cycle))
        if not cycle:
            raise GfamilyError("a boundary point needs a repeating block")
        while prefix and prefix[-1] == cycle[-1]:
            prefix = prefix[:-1]
            cycle = cycle[-1:] + cycle[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)
        self._validate()

    def _validate(self):
        g = self.gog
        seq = self.prefix + self.cycle + (self.cycle[0],)
        at = self.range_vertex
        prev_edge = None
        for elem, e in seq:
            if not g.has_edge(e):
                raise GfamilyError(f"unknown edge {e!r}")
            if g.range(e) != at:
                raise GfamilyError(f"edge {e!r} has range {g.range(e)!r} "
                                   f"but the point is at {at!r}")
            if elem.group != g.vertex_group(at):
                raise GfamilyError(f"letter {format_element(elem)} does not "
                                   f"live in the group at {at!r}")
            if g.decompose(e, elem)[0] != elem:
                rep = g.decompose(e, elem)[0]
                raise GfamilyError(
                    f"letter {format_element(elem)} at {e} is not the "
                    f"chosen coset representative {format_element(rep)}")
            if prev_edge is not None and elem.is_identity() and \
                    e == g.reverse(prev_edge):
                raise GfamilyError(f"identity letter before {e} backtracks "
                                   f"over {prev_edge}; the tail is not "
                                   "reduced")
            prev_edge = e
            at = g.source(e)

    def __eq__(self, other):
        if not isinstance(other, OrbitPoint):
            return NotImplemented
        return (self.range_vertex, self.prefix, self.cycle) == \
            (other.range_vertex, other.prefix, other.cycle)

    def __hash__(self):
        return hash((self.range_vertex, self.prefix, self.cycle))

    @property
    def first(self) -> Pair:
        return self.prefix[0] if self.prefix else self.cycle[0]

    def letters(self, n: int) -> tuple[Pair, ...]:
        """The first n letters of the infinite word."""
        out = list(self.prefix[:n])
        i = 0
        while len(out) < n:
            out.append(self.cycle[i % len(self.cycle)])
            i += 1
        return tuple(out)

    def head(self, n: int) -> ReducedGWord:
        """The length-n path cut off the front of the point."""
        if n == 0:
            return trivial_path(self.gog, self.range_vertex)
        return ReducedGWord(self.gog, self.range_vertex, self.letters(n))

    def __str__(self) -> str:
        return format_tail(self)


def format_tail(p: OrbitPoint) -> str:
    def chunk(pairs):
        if not pairs:
            return "1"
        return " ".join(f"{format_element(g)} {e}" for g, e in pairs)
    return f"{chunk(p.prefix)} ; {chunk(p.cycle)}"


def parse_tail(gog: GraphOfGroups, range_vertex: str, text: str) -> OrbitPoint:
    """Parse 'prefix ; cycle' where both halves use the word-literal
    syntax; the prefix may be '1'.  Letters must already be coset
    representatives (the error says which representative to use)."""
    if text.count(";") != 1:
        raise GfamilyError("a tail literal is 'prefix ; cycle' with "
                           "exactly one ';'")
    left, right = (part.strip() for part in text.split(";"))
    pre = parse_word_literal(gog, range_vertex, left or "1")
    if pre.tail is not None:
        raise GfamilyError("the prefix of a tail must end with an edge")
    cyc = parse_word_literal(gog, pre.source_vertex, right)
    if cyc.tail is not None or not cyc.pairs:
        raise GfamilyError("the cycle of a tail must be a nonempty path")
    return OrbitPoint(gog, range_vertex, pre.pairs, cyc.pairs)


def default_tail(gog: GraphOfGroups, x: Optional[str] = None) -> OrbitPoint:
    """A deterministic purely periodic boundary point: the first
    reduced cycle, by length then by formatted name."""
    starts = (x,) if x is not None else gog.vertices
    for depth in range(1, 2 * len(gog.edge_names()) + 2):
        found = []
        for v in starts:
            for p in enumerate_paths(gog, v, depth):
                if p.source_vertex != v:
                    continue
                try:
                    found.append(OrbitPoint(gog, v, (), p.pairs))
                except GfamilyError:
                    continue
        if found:
            return min(found, key=lambda q: str(q))
    raise GfamilyError("no repeatable tail exists; the graph has no "
                       "reduced cycle")


# -- the concrete family acting on points ----------------------------------


def apply_shift(gog: GraphOfGroups, e: str,
                p: OrbitPoint) -> Optional[OrbitPoint]:
    """s_e: prepend the identity letter over e.  Zero (None) off the
    source fibre and on the cylinder of the reversed identity letter."""
    if p.range_vertex != gog.source(e):
        return None
    g0, e0 = p.first
    if e0 == gog.reverse(e) and g0.is_identity():
        return None
    ident = gog.vertex_group(gog.range(e)).identity()
    return OrbitPoint(gog, gog.range(e), ((ident, e),) + p.prefix, p.cycle)


def apply_coshift(gog: GraphOfGroups, e: str,
                  p: OrbitPoint) -> Optional[OrbitPoint]:
    """s_e*: strip an exact identity letter over e; zero elsewhere."""
    if p.range_vertex != gog.range(e):
        return None
    g0, e0 = p.first
    if e0 != e or not g0.is_identity():
        return None
    if p.prefix:
        return OrbitPoint(gog, gog.source(e), p.prefix[1:], p.cycle)
    return OrbitPoint(gog, gog.source(e), (),
                      p.cycle[1:] + p.cycle[:1])


def apply_unitary(gog: GraphOfGroups, x: str, g: AbElement, p: OrbitPoint,
                  cap: int = DEFAULT_CAP) -> Optional[OrbitPoint]:
    """u_{x,g}: multiply g into the point; zero off the fibre at x.

    The multiplied prefix is reduced exactly; the leftover element is
    then pushed around the cycle until the (position, carry) state
    repeats, which pins down the new prefix and cycle.  Raises
    CarryOverflow if no state repeats within cap steps or a pushed
    letter would cancel an edge of the tail.
    """
    if p.range_vertex != x:
        return None
    if g.is_identity():
        return p
    if p.prefix:
        w = concat(gog, group_word(gog, x, g),
                   ReducedGWord(gog, x, p.prefix))
        out, carry = list(w.pairs), w.tail
    else:
        out, carry = [], g
    cyc, L = p.cycle, len(p.cycle)
    seen: dict[tuple[int, AbElement], int] = {}
    emitted: list[Pair] = []
    state = (0, carry)
    while state not in seen:
        if len(emitted) >= cap:
            raise CarryOverflow(
                f"the pushed element did not settle within {cap} letters")
        seen[state] = len(emitted)
        pos, c = state
        sg, se = cyc[pos]
        t, h = gog.decompose(se, c + sg)
        prev_edge = emitted[-1][1] if emitted else \
            (out[-1][1] if out else None)
        if t.is_identity() and prev_edge is not None and \
                se == gog.reverse(prev_edge):
            raise CarryOverflow("the pushed element cancels an edge of "
                                "the repeating tail")
        emitted.append((t, se))
        state = ((pos + 1) % L, gog.alpha(gog.reverse(se)).apply(h))
    start = seen[state]
    return OrbitPoint(gog, x,
                      tuple(out) + tuple(emitted[:start]),
                      tuple(emitted[start:]))


def apply_path_isometry(gog: GraphOfGroups, path: ReducedGWord,
                        p: Optional[OrbitPoint],
                        cap: int = DEFAULT_CAP) -> Optional[OrbitPoint]:
    """s_path applied to a point: shifts and unitaries from the inside
    out.  None propagates as the zero vector."""
    for g, e in reversed(path.pairs):
        if p is None:
            return None
        p = apply_shift(gog, e, p)
        if p is None:
            return None
        p = apply_unitary(gog, gog.range(e), g, p, cap)
    if p is not None and p.range_vertex != path.source_vertex:
        return None
    return p


def apply_path_coisometry(gog: GraphOfGroups, path: ReducedGWord,
                          p: Optional[OrbitPoint],
                          cap: int = DEFAULT_CAP) -> Optional[OrbitPoint]:
    """s_path* applied to a point."""
    for g, e in path.pairs:
        if p is None:
            return None
        p = apply_unitary(gog, gog.range(e), -g, p, cap)
        if p is None:
            return None
        p = apply_coshift(gog, e, p)
    if p is not None and p.range_vertex != path.source_vertex:
        return None
    return p


# ---------------------------------------------------------------------------
# sparse rational matrices over a finite basis


class SparseOp:
    """Column-sparse matrix over the rationals with boundary marking.

    A column listed in ``boundary`` has an image that leaves the
    truncated basis (or could not be computed); it carries no entries,
    and every composition, sum, or comparison excludes it instead of
    pretending the column is zero.
    """

    __slots__ = ("dim", "cols", "boundary")

    def __init__(self, dim: int, cols, boundary: Iterable[int] = ()):
        self.dim = dim
        self.boundary = frozenset(boundary)
        self.cols = {j: dict(col) for j, col in cols.items()
                     if col and j not in self.boundary}

    @classmethod
    def zero(cls, dim: int) -> "SparseOp":
        return cls(dim, {})

    def entry(self, i: int, j: int) -> Fraction:
        return self.cols.get(j, {}).get(i, Fraction(0))

    def compose(self, other: "SparseOp") -> "SparseOp":
        """self applied after other."""
        if self.dim != other.dim:
            raise GfamilyError("dimension mismatch")
        boundary = set(other.boundary)
        cols: dict[int, dict[int, Fraction]] = {}
        for j, col in other.cols.items():
            if any(k in self.boundary for k in col):
                boundary.add(j)
                continue
            acc: dict[int, Fraction] = {}
            for k, v in col.items():
                for i, w in self.cols.get(k, {}).items():
                    acc[i] = acc.get(i, Fraction(0)) + v * w
            acc = {i: q for i, q in acc.items() if q}
            if acc:
                cols[j] = acc
        return SparseOp(self.dim, cols, boundary)

    def add(self, other: "SparseOp") -> "SparseOp":
        if self.dim != other.dim:
            raise GfamilyError("dimension mismatch")
        boundary = self.boundary | other.boundary
        cols: dict[int, dict[int, Fraction]] = {}
        for j in set(self.cols) | set(other.cols):
            if j in boundary:
                continue
            acc = dict(self.cols.get(j, {}))
            for i, v in other.cols.get(j, {}).items():
                acc[i] = acc.get(i, Fraction(0)) + v
            acc = {i: q for i, q in acc.items() if q}
            if acc:
                cols[j] = acc
        return SparseOp(self.dim, cols, boundary)

    def scale(self, q) -> "SparseOp":
        q = Fraction(q)
        if not q:
            return SparseOp(self.dim, {}, self.boundary)
        cols = {j: {i: q * v for i, v in col.items()}
                for j, col in self.cols.items()}
        return SparseOp(self.dim, cols, self.boundary)

    def defect(self, other: "SparseOp") -> tuple[Fraction, int, int]:
        """(max |self - other| over shared interior columns, interior
        count, boundary count)."""
        if self.dim != other.dim:
            raise GfamilyError("dimension mismatch")
        boundary = self.boundary | other.boundary
        worst = Fraction(0)
        for j in (set(self.cols) | set(other.cols)) - boundary:
            a = self.cols.get(j, {})
            b = other.cols.get(j, {})
            for i in set(a) | set(b):
                d = abs(a.get(i, Fraction(0)) - b.get(i, Fraction(0)))
                if d > worst:
                    worst = d
        return worst, self.dim - len(boundary), len(boundary)

    def triplets(self) -> list[str]:
        """Entries as 'row col value' lines, row-major, exact."""
        out = []
        for j in sorted(self.cols):
            for i in sorted(self.cols[j]):
                out.append(f"{i} {j} {self.cols[j][i]}")
        out.sort(key=lambda line: tuple(map(str, line.split()[:2])))
        return sorted(out, key=lambda line: (int(line.split()[0]),
                                             int(line.split()[1])))


# ---------------------------------------------------------------------------
# truncated regular representation


class TruncatedRep:
    """A finite slice of the orbit of an eventually periodic ray,
    with the family realized as sparse matrices over it.

    The basis holds every point reached from the ray by at most
    ``depth`` generator moves.  Generator matrices are built lazily
    and cached; a column whose image leaves the basis (or whose carry
    computation overflows) is marked boundary, never zeroed.
    """

    def __init__(self, gog: GraphOfGroups, xi: OrbitPoint, depth: int,
                 basis: Iterable[OrbitPoint], cap: int = DEFAULT_CAP):
        self.gog = gog
        self.xi = xi
        self.depth = depth
        self.cap = cap
        self.basis = tuple(basis)
        self.index = {p: i for i, p in enumerate(self.basis)}
        self._cache: dict = {}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def _from_pointmap(self, fn) -> SparseOp:
        cols: dict[int, dict[int, Fraction]] = {}
        boundary = set()
        for j, p in enumerate(self.basis):
            try:
                q = fn(p)
            except CarryOverflow:
                boundary.add(j)
                continue
            if q is None:
                continue
            i = self.index.get(q)
            if i is None:
                boundary.add(j)
            else:
                cols[j] = {i: Fraction(1)}
        return SparseOp(self.dimension, cols, boundary)

    def shift(self, e: str) -> SparseOp:
        key = ("s", e)
        if key not in self._cache:
            self._cache[key] = self._from_pointmap(
                lambda p: apply_shift(self.gog, e, p))
        return self._cache[key]

    def coshift(self, e: str) -> SparseOp:
        key = ("s*", e)
        if key not in self._cache:
            self._cache[key] = self._from_pointmap(
                lambda p: apply_coshift(self.gog, e, p))
        return self._cache[key]

    def unitary(self, x: str, g: AbElement) -> SparseOp:
        key = ("u", x, g)
        if key not in self._cache:
            self._cache[key] = self._from_pointmap(
                lambda p: apply_unitary(self.gog, x, g, p, self.cap))
        return self._cache[key]

    def fiber_projection(self, x: str) -> SparseOp:
        return self.unitary(x, self.gog.vertex_group(x).identity())

    def path_isometry(self, path: ReducedGWord) -> SparseOp:
        """The matrix of s_path = u_{g1} s_{e1} ... u_{gn} s_{en}."""
        op = self.fiber_projection(path.range_vertex)
        for g, e in path.pairs:
            op = op.compose(self.unitary(self.gog.range(e), g))
            op = op.compose(self.shift(e))
        return op

    def path_coisometry(self, path: ReducedGWord) -> SparseOp:
        """The adjoint strips letters front first, so it is built by
        left-multiplying in forward letter order."""
        op = self.fiber_projection(path.range_vertex)
        for g, e in path.pairs:
            step = self.coshift(e).compose(
                self.unitary(self.gog.range(e), -g))
            op = step.compose(op)
        return op

    def monomial_matrix(self, m: "Monomial") -> SparseOp:
        x = m.mu.source_vertex
        op = self.path_isometry(m.mu).compose(self.unitary(x, m.middle))
        return op.compose(self.path_coisometry(m.nu)).scale(m.scalar)


def _generator_moves(gog: GraphOfGroups, cap: int):
    """One move per letter isometry u_h s_e (h over the transversal of
    e) and its adjoint, plus a stock of partial unitaries: every
    nontrivial element when the vertex group is finite, otherwise the
    generators and the edge-inclusion images in both signs."""
    moves: list[Callable[[OrbitPoint], Optional[OrbitPoint]]] = []
    for e in gog.edge_names():
        x = gog.range(e)
        for h in gog.sigma(e):
            def prepend(p, e=e, x=x, h=h):
                q = apply_shift(gog, e, p)
                return None if q is None else apply_unitary(gog, x, h, q, cap)

            def strip(p, e=e, x=x, h=h):
                q = apply_unitary(gog, x, -h, p, cap)
                return None if q is None else apply_coshift(gog, e, q)

            moves.append(prepend)
            moves.append(strip)
    elems: dict[tuple[str, AbElement], None] = {}

    def note(x, g):
        if not g.is_identity():
            elems.setdefault((x, g), None)
            elems.setdefault((x, -g), None)

    for x in gog.vertices:
        group = gog.vertex_group(x)
        if group.rank == 0:
            for g in group.elements():
                note(x, g)
        else:
            for g in group.generators():
                note(x, g)
    for e in gog.edge_names():
        x = gog.range(e)
        for h in gog.sigma(e):
            note(x, h)
        for b in gog.edge_group(e).generators():
            note(x, gog.alpha(e).apply(b))
    for x, g in elems:
        moves.append(lambda p, x=x, g=g: apply_unitary(gog, x, g, p, cap))
    return moves


def build_truncated_rep(gog: GraphOfGroups, xi: OrbitPoint, depth: int,
                        cap: int = DEFAULT_CAP) -> TruncatedRep:
    """Breadth-first orbit slice around xi, closed under at most
    ``depth`` applications of the generating moves (shifts, their
    adjoints, and a fixed stock of partial unitaries)."""
    if xi.gog is not gog:
        raise GfamilyError("the ray belongs to a different graph")
    if depth < 2:
        raise GfamilyError("the truncation depth must be at least 2")
    moves = _generator_moves(gog, cap)
    seen: dict[OrbitPoint, None] = {xi: None}
    frontier = [xi]
    for _ in range(depth):
        fresh = []
        for p in frontier:
            for move in moves:
                try:
                    q = move(p)
                except CarryOverflow:
                    continue
                if q is not None and q not in seen:
                    seen[q] = None
                    fresh.append(q)
        frontier = fresh
    basis = sorted(seen, key=lambda p: (len(p.prefix), len(p.cycle), str(p)))
    return TruncatedRep(gog, xi, depth, basis, cap)


# ---------------------------------------------------------------------------
# relation reports


@dataclass(frozen=True)
class RelationCheck:
    relation: str
    instances: int
    max_defect: str
    interior: Optional[int] = None
    boundary: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.max_defect == "0"

    def as_dict(self) -> dict:
        return {"relation": self.relation, "instances": self.instances,
                "max_defect": self.max_defect, "interior": self.interior,
                "boundary": self.boundary}


@dataclass(frozen=True)
class RelationReport:
    route: str
    subject: str
    dimension: Optional[int]
    checks: tuple[RelationCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def interior_dimension(self) -> Optional[int]:
        known = [c.interior for c in self.checks if c.interior is not None]
        if known:
            return min(known)
        return self.dimension

    def as_dict(self) -> dict:
        return {"route": self.route, "subject": self.subject,
                "dimension": self.dimension,
                "interior_dimension": self.interior_dimension,
                "ok": self.ok,
                "checks": [c.as_dict() for c in self.checks]}


def _aggregate(name: str, results: list[tuple[Fraction, int, int]],
               dim: int) -> RelationCheck:
    if not results:
        return RelationCheck(name, 0, "0", dim, 0)
    worst = max(r[0] for r in results)
    return RelationCheck(name, len(results), str(worst),
                         min(r[1] for r in results),
                         max(r[2] for r in results))


def verify_relations(rep: TruncatedRep) -> RelationReport:
    """Check (G1) through (G4) as exact matrix identities on the
    interior columns of the truncated representation."""
    gog = rep.gog
    dim = rep.dimension
    zero = SparseOp.zero(dim)
    checks = []

    results = []
    for x, y in itertools.combinations(gog.vertices, 2):
        lhs = rep.fiber_projection(x).compose(rep.fiber_projection(y))
        results.append(lhs.defect(zero))
    checks.append(_aggregate("G1", results, dim))

    results = []
    for e in gog.edge_names():
        group = gog.edge_group(e)
        gens = group.generators() or (group.identity(),)
        rev = gog.reverse(e)
        for b in gens:
            lhs = rep.unitary(gog.range(e), gog.alpha(e).apply(b)) \
                .compose(rep.shift(e))
            rhs = rep.shift(e).compose(
                rep.unitary(gog.source(e), gog.alpha(rev).apply(b)))
            results.append(lhs.defect(rhs))
    checks.append(_aggregate("G2", results, dim))

    results = []
    for e in gog.edge_names():
        rev = gog.reverse(e)
        lhs = rep.fiber_projection(gog.source(e))
        rhs = rep.coshift(e).compose(rep.shift(e)).add(
            rep.shift(rev).compose(rep.coshift(rev)))
        results.append(lhs.defect(rhs))
    checks.append(_aggregate("G3", results, dim))

    results = []
    for e in gog.edge_names():
        x = gog.source(e)
        rev = gog.reverse(e)
        lhs = rep.coshift(e).compose(rep.shift(e))
        rhs = SparseOp.zero(dim)
        for f in gog.edges_into(x):
            for h in gog.sigma(f):
                if h.is_identity() and f == rev:
                    continue
                term = rep.unitary(x, h).compose(rep.shift(f)) \
                    .compose(rep.coshift(f)).compose(rep.unitary(x, -h))
                rhs = rhs.add(term)
        results.append(lhs.defect(rhs))
    checks.append(_aggregate("G4", results, dim))

    subject = f"orbit of {format_tail(rep.xi)} at depth {rep.depth}"
    return RelationReport("matrix", subject, dim, tuple(checks))


# ---------------------------------------------------------------------------
# the directed graph on depth-one and depth-two paths


def _sorted_paths(gog: GraphOfGroups, depth: int) -> tuple[ReducedGWord, ...]:
    out = []
    for x in gog.vertices:
        out.extend(enumerate_paths(gog, x, depth))
    return tuple(sorted(out, key=lambda p: (p.range_vertex, format_word(p))))


@dataclass(frozen=True)
class DirectedGraphEG:
    """Vertices are the depth-one paths; edges the depth-two paths.
    An edge runs from its inner letter (source) to its first letter
    (range), so infinite paths here are infinite reduced words."""

    gog: GraphOfGroups = field(repr=False)
    vertices: tuple[ReducedGWord, ...]
    edges: tuple[ReducedGWord, ...]

    def range_of(self, mu: ReducedGWord) -> ReducedGWord:
        return ReducedGWord(self.gog, mu.range_vertex, mu.pairs[:1])

    def source_of(self, mu: ReducedGWord) -> ReducedGWord:
        _, e2 = mu.pairs[1]
        return ReducedGWord(self.gog, self.gog.range(e2), mu.pairs[1:])

    def edges_with_range(self, nu: ReducedGWord) -> tuple[ReducedGWord, ...]:
        return tuple(mu for mu in self.edges if self.range_of(mu) == nu)

    def in_degree(self, nu: ReducedGWord) -> int:
        return len(self.edges_with_range(nu))

    def as_dict(self) -> dict:
        return {"vertices": [format_word(v) for v in self.vertices],
                "edges": [format_word(e) for e in self.edges]}


def build_EG(gog: GraphOfGroups) -> DirectedGraphEG:
    """The finite directed graph of depth-one and depth-two paths.

    Requires finite vertex groups so both path sets are finite, and a
    nonsingular graph so no vertex is a source."""
    for x in gog.vertices:
        if gog.vertex_group(x).rank > 0:
            raise GfamilyError(f"the group at {x!r} is infinite; the path "
                               "sets of the directed graph must be finite")
    vertices = _sorted_paths(gog, 1)
    edges = _sorted_paths(gog, 2)
    eg = DirectedGraphEG(gog, vertices, edges)
    for nu in vertices:
        if eg.in_degree(nu) == 0:
            raise GfamilyError(
                f"depth-one path {format_word(nu)} receives no depth-two "
                f"path; the graph is singular at {nu.source_vertex!r}")
    return eg


# ---------------------------------------------------------------------------
# symbolic monomial calculus


@dataclass(frozen=True)
class Monomial:
    """scalar * s_mu u_g s_nu* for reduced paths mu, nu with a common
    source vertex; g lives in the group there."""

    mu: ReducedGWord
    middle: AbElement
    nu: ReducedGWord
    scalar: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "scalar", Fraction(self.scalar))
        if self.mu.tail is not None or self.nu.tail is not None:
            raise GfamilyError("monomial paths must end with an edge")
        if self.mu.source_vertex != self.nu.source_vertex:
            raise GfamilyError("the two paths of a monomial must share "
                               "their source vertex")
        group = self.mu.gog.vertex_group(self.mu.source_vertex)
        if self.middle.group != group:
            raise GfamilyError("the middle element must live in the group "
                               "at the common source")

    @property
    def key(self):
        return (self.mu, self.middle, self.nu)

    def __str__(self) -> str:
        return (f"{self.scalar} * s[{format_word(self.mu)}] "
                f"u[{format_element(self.middle)}] s[{format_word(self.nu)}]*")


def monomial_adjoint(m: Monomial) -> Monomial:
    return Monomial(m.nu, -m.middle, m.mu, m.scalar)


def _extend(gog: GraphOfGroups, path: ReducedGWord, t: AbElement,
            f: str) -> Optional[ReducedGWord]:
    """path . (t f), or None when the seam forces s_e s_ebar = 0."""
    if path.pairs and t.is_identity() and \
            f == gog.reverse(path.pairs[-1][1]):
        return None
    return ReducedGWord(gog, path.range_vertex, path.pairs + ((t, f),))


def _join(gog: GraphOfGroups, a: ReducedGWord,
          b: ReducedGWord) -> Optional[ReducedGWord]:
    """Concatenation of reduced paths, or None when the junction seam
    kills the product."""
    if not b.pairs:
        return a
    if a.pairs and b.pairs[0][0].is_identity() and \
            b.pairs[0][1] == gog.reverse(a.pairs[-1][1]):
        return None
    return ReducedGWord(gog, a.range_vertex, a.pairs + b.pairs)


def _push(gog: GraphOfGroups, g: AbElement,
          path: ReducedGWord) -> Optional[tuple[ReducedGWord, AbElement]]:
    """u_g s_path as s_eta u_h, or None when an edge pair cancels and
    the product is zero."""
    if not path.pairs:
        return path, g
    w = concat(gog, group_word(gog, path.range_vertex, g), path)
    if len(w.pairs) < len(path.pairs):
        return None
    return ReducedGWord(gog, path.range_vertex, w.pairs), w.tail


def monomial_product(a: Monomial, b: Monomial,
                     depth_guard: int = DEFAULT_DEPTH_GUARD
                     ) -> list[Monomial]:
    """The product a * b expanded in the spanning monomials.

    Comparable middle paths collapse by cancellation; the residual
    case s_e* s_e (equal paths of positive length) expands one level
    down, producing paths one letter deeper on both sides, and is
    refused with DepthGuardExceeded beyond the guard."""
    gog = a.mu.gog
    scalar = a.scalar * b.scalar
    if not scalar:
        return []
    n1, m2 = a.nu, b.mu
    if n1.range_vertex != m2.range_vertex:
        return []
    k, l = len(n1.pairs), len(m2.pairs)
    if l > k:
        if m2.pairs[:k] != n1.pairs:
            return []
        inner = ReducedGWord(gog, n1.source_vertex, m2.pairs[k:])
        pushed = _push(gog, a.middle, inner)
        if pushed is None:
            return []
        eta, g1 = pushed
        new_mu = _join(gog, a.mu, eta)
        if new_mu is None:
            return []
        return [Monomial(new_mu, g1 + b.middle, b.nu, scalar)]
    if k > l:
        if n1.pairs[:l] != m2.pairs:
            return []
        inner = ReducedGWord(gog, m2.source_vertex, n1.pairs[l:])
        pushed = _push(gog, -b.middle, inner)
        if pushed is None:
            return []
        eta, h = pushed
        new_nu = _join(gog, b.nu, eta)
        if new_nu is None:
            return []
        return [Monomial(a.mu, a.middle - h, new_nu, scalar)]
    if n1.pairs != m2.pairs:
        return []
    if not n1.pairs:
        return [Monomial(a.mu, a.middle + b.middle, b.nu, scalar)]
    last = n1.pairs[-1][1]
    x = gog.source(last)
    rev_last = gog.reverse(last)
    # the inner s_last* s_last is absorbed by a flank that ends with
    # the same edge, provided the flank's element keeps the appended
    # backtrack letter trivial; then the product stays compact
    for flank, g in ((a.mu, a.middle), (b.nu, b.middle)):
        if flank.pairs and flank.pairs[-1][1] == last and \
                gog.decompose(rev_last, g)[0].is_identity():
            return [Monomial(a.mu, a.middle + b.middle, b.nu, scalar)]
    if max(len(a.mu.pairs), len(b.nu.pairs)) + 1 > depth_guard:
        raise DepthGuardExceeded(
            f"expanding s_{last}* s_{last} needs paths deeper than "
            f"{depth_guard}")
    rev = gog.reverse(last)
    out = []
    for f in gog.edges_into(x):
        back = gog.alpha(gog.reverse(f))
        for h in gog.sigma(f):
            if h.is_identity() and f == rev:
                continue
            t1, b1 = gog.decompose(f, a.middle + h)
            t2, b2 = gog.decompose(f, h - b.middle)
            new_mu = _extend(gog, a.mu, t1, f)
            if new_mu is None:
                continue
            new_nu = _extend(gog, b.nu, t2, f)
            if new_nu is None:
                continue
            out.append(Monomial(new_mu, back.apply(b1 - b2), new_nu, scalar))
    return out


def refine_monomial(m: Monomial) -> list[Monomial]:
    """One refinement step: insert the splitting of the source fibre
    into cylinder projections, pushing both paths one letter deeper.
    The sum of the results equals m."""
    gog = m.mu.gog
    x = m.mu.source_vertex
    out = []
    for f in gog.edges_into(x):
        back = gog.alpha(gog.reverse(f))
        for h in gog.sigma(f):
            new_nu = _extend(gog, m.nu, h, f)
            if new_nu is None:
                continue
            t, b = gog.decompose(f, m.middle + h)
            new_mu = _extend(gog, m.mu, t, f)
            if new_mu is None:
                continue
            out.append(Monomial(new_mu, back.apply(b), new_nu, m.scalar))
    return out


def normalize_monomials(terms: Iterable[Monomial],
                        depth_guard: int = DEFAULT_DEPTH_GUARD) -> dict:
    """Combine a sum of monomials at a common refinement depth.

    Terms whose path lengths differ by the same amount are refined to
    one depth and collected by (mu, g, nu); equal sums of spanning
    monomials produce equal dictionaries.  Returns key -> coefficient
    with zeros dropped."""
    by_gauge: dict[int, list[Monomial]] = {}
    for m in terms:
        by_gauge.setdefault(len(m.mu.pairs) - len(m.nu.pairs), []).append(m)
    combined: dict = {}
    for bucket in by_gauge.values():
        target = max(len(m.nu.pairs) for m in bucket)
        if target > depth_guard:
            raise DepthGuardExceeded(
                f"normalizing needs depth {target} > {depth_guard}")
        work = list(bucket)
        while work:
            m = work.pop()
            if len(m.nu.pairs) < target:
                work.extend(refine_monomial(m))
                continue
            combined[m.key] = combined.get(m.key, Fraction(0)) + m.scalar
    return {key: q for key, q in combined.items() if q}


def monomial_defect(lhs: Iterable[Monomial], rhs: Iterable[Monomial],
                    depth_guard: int = DEFAULT_DEPTH_GUARD) -> Fraction:
    """Largest coefficient of the normalized difference lhs - rhs;
    zero exactly when the two sums agree."""
    terms = list(lhs)
    terms.extend(Monomial(m.mu, m.middle, m.nu, -m.scalar) for m in rhs)
    diff = normalize_monomials(terms, depth_guard)
    if not diff:
        return Fraction(0)
    return max(abs(q) for q in diff.values())


# ---------------------------------------------------------------------------
# Cuntz-Krieger identities, both routes


def _ck_paths(gog: GraphOfGroups):
    return _sorted_paths(gog, 1), _sorted_paths(gog, 2)


def _verify_ck_matrix(rep: TruncatedRep) -> RelationReport:
    gog = rep.gog
    dim = rep.dimension
    depth1, depth2 = _ck_paths(gog)
    proj = {nu: rep.path_isometry(nu).compose(rep.path_coisometry(nu))
            for nu in depth1}

    def inner(mu):
        return ReducedGWord(gog, gog.range(mu.pairs[1][1]), mu.pairs[1:])

    def outer(mu):
        return ReducedGWord(gog, mu.range_vertex, mu.pairs[:1])

    ck1 = []
    partial = {}
    for mu in depth2:
        nu = inner(mu)
        t = rep.path_isometry(mu).compose(rep.path_coisometry(nu))
        t_star = rep.path_isometry(nu).compose(rep.path_coisometry(mu))
        ck1.append(t_star.compose(t).defect(proj[nu]))
        acc = t.compose(t_star)
        key = outer(mu)
        partial[key] = acc if key not in partial else partial[key].add(acc)
    ck2 = []
    for nu in depth1:
        total = partial.get(nu, SparseOp.zero(dim))
        ck2.append(total.defect(proj[nu]))
    checks = (_aggregate("CK1", ck1, dim), _aggregate("CK2", ck2, dim))
    subject = f"orbit of {format_tail(rep.xi)} at depth {rep.depth}"
    return RelationReport("matrix", subject, dim, checks)


def _verify_ck_symbolic(eg: DirectedGraphEG,
                        depth_guard: int) -> RelationReport:
    gog = eg.gog

    def ident(path):
        return gog.vertex_group(path.source_vertex).identity()

    def t_mono(mu):
        return Monomial(mu, ident(mu), eg.source_of(mu))

    def p_mono(nu):
        return Monomial(nu, ident(nu), nu)

    ck1 = []
    for mu in eg.edges:
        t = t_mono(mu)
        lhs = monomial_product(monomial_adjoint(t), t, depth_guard)
        d = monomial_defect(lhs, [p_mono(eg.source_of(mu))], depth_guard)
        ck1.append((d, None, None))
    ck2 = []
    for nu in eg.vertices:
        lhs: list[Monomial] = []
        for mu in eg.edges_with_range(nu):
            t = t_mono(mu)
            lhs.extend(monomial_product(t, monomial_adjoint(t), depth_guard))
        d = monomial_defect(lhs, [p_mono(nu)], depth_guard)
        ck2.append((d, None, None))

    def row(name, results):
        if not results:
            return RelationCheck(name, 0, "0")
        return RelationCheck(name, len(results),
                             str(max(r[0] for r in results)))

    subject = (f"directed graph on {len(eg.vertices)} depth-one paths, "
               f"{len(eg.edges)} depth-two paths")
    return RelationReport("symbolic", subject, None,
                          (row("CK1", ck1), row("CK2", ck2)))


def verify_ck(subject: Union[TruncatedRep, DirectedGraphEG],
              depth_guard: int = DEFAULT_DEPTH_GUARD) -> RelationReport:
    """Check CK1 (t_mu* t_mu = p over the inner path) and CK2 (the
    range projections partition over incoming depth-two paths), on the
    matrix route for a truncated representation or the symbolic route
    for the directed path graph."""
    if isinstance(subject, TruncatedRep):
        return _verify_ck_matrix(subject)
    if isinstance(subject, DirectedGraphEG):
        return _verify_ck_symbolic(subject, depth_guard)
    raise GfamilyError("verify_ck wants a TruncatedRep or a DirectedGraphEG")


# ---------------------------------------------------------------------------
# the vector functional on the expanding-loop ray


@dataclass(frozen=True)
class FunctionalReport:
    m: int
    n: int
    depth: int
    value_at_u: str
    pairs_checked: int
    nonzero: tuple[tuple[str, str], ...]

    @property
    def ok(self) -> bool:
        return self.value_at_u == "1" and not self.nonzero

    def as_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "depth": self.depth,
                "value_at_u": self.value_at_u,
                "pairs_checked": self.pairs_checked,
                "nonzero": [list(pair) for pair in self.nonzero],
                "ok": self.ok}


def bs_functional(m: int, n: int, depth: int = 3,
                  cap: int = DEFAULT_CAP) -> FunctionalReport:
    """The vector functional f(b) = <b ray, u ray> on the loop of
    infinite cyclic groups with indices (m, n), n > m >= 1.

    The ray is the expanding path a^(n-1) e (a^(n-m) e)^infty; the
    loop generator u maps it to the fixed ray (1 e)^infty.  f takes
    the value 1 at u, and 0 at every monomial s_mu s_nu* over paths of
    length at most depth: witnessing that u is not approximated by the
    path isometries alone."""
    if not (n > m >= 1):
        raise GfamilyError("the expanding ray needs n > m >= 1; equal "
                           "indices leave nothing to contract")
    gog = baumslag_solitar(m, n)
    x = "x"
    e = "e"
    group = gog.vertex_group(x)

    def rep(i):
        return gog.decompose(e, group.element((i,)))[0]

    xi = OrbitPoint(gog, x, ((rep(n - 1), e),), ((rep(n - m), e),))
    u = group.element((1,))
    target = apply_unitary(gog, x, u, xi, cap)
    value_at_u = "1" if target is not None else "0"

    paths = [trivial_path(gog, x)]
    for length in range(1, depth + 1):
        paths.extend(enumerate_paths(gog, x, length))
    nonzero = []
    pulled = {}
    for nu in paths:
        pulled[nu] = apply_path_coisometry(gog, nu, xi, cap)
    for mu in paths:
        for nu in paths:
            w = apply_path_isometry(gog, mu, pulled[nu], cap)
            if w is not None and w == target:
                nonzero.append((format_word(mu), format_word(nu)))
    return FunctionalReport(m, n, depth, value_at_u,
                            len(paths) * len(paths), tuple(nonzero))
