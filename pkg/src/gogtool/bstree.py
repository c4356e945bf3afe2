"""Bass-Serre tree combinatorics and the boundary action.

The tree based at a vertex x is enumerated through its depth-n slices:
the slice at depth n is the set of reduced words in path shape with
range x and n edges.  A boundary point is an infinite reduced path, and
a cylinder is the set of boundary points extending a fixed finite path.
Everything here is exact; the action of a fundamental-group element on
a cylinder is resolved into finitely many cylinders by refining just
deep enough that no further cancellation can reach the retained prefix.

All constructions assume a locally finite graph of groups.  Cylinders
over a singular vertex can be empty; the enumeration itself does not
object, but callers doing boundary dynamics should check
``gog.is_nonsingular()`` first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .abelian import format_element
from .gog import GraphOfGroups, SpanningTree
from .words import (GWord, ReducedGWord, concat, epsilon_generators,
                    format_word, trivial_path)


class BstreeError(ValueError):
    pass


class LookaheadError(BstreeError):
    """Raised when a path action cannot be stabilized from the
    available finite data; refine and retry."""


def _require_path(word: GWord, what: str) -> None:
    if word.tail is not None:
        raise BstreeError(f"{what} must be in path shape "
                          f"(no trailing group element): {word}")


def children(gog: GraphOfGroups, path: ReducedGWord) -> tuple[ReducedGWord, ...]:
    """All one-step extensions of a path at its source end.

    An extension appends a pair (h, f) with r(f) the source of the
    path and h in the transversal of f; the pair (identity, reverse of
    the last edge) would backtrack and is skipped.
    """
    _require_path(path, "path")
    x = path.source_vertex
    last = path.pairs[-1][1] if path.pairs else None
    out = []
    for f in gog.edges_into(x):
        back = last is not None and f == gog.reverse(last)
        for h in gog.sigma(f):
            if back and h.is_identity():
                continue
            out.append(ReducedGWord(gog, path.range_vertex,
                                    path.pairs + ((h, f),)))
    return tuple(out)


def descend(gog: GraphOfGroups, path: ReducedGWord,
            depth: int) -> tuple[ReducedGWord, ...]:
    """All extensions of a path out to the given total depth."""
    if depth < len(path):
        raise BstreeError(f"cannot descend to depth {depth} from a "
                          f"path of length {len(path)}")
    level = (path,)
    for _ in range(depth - len(path)):
        level = tuple(itertools.chain.from_iterable(
            children(gog, p) for p in level))
    return level


def enumerate_paths(gog: GraphOfGroups, x: str,
                    depth: int) -> tuple[ReducedGWord, ...]:
    """The depth-n slice of the tree based at x, in a fixed order."""
    return descend(gog, trivial_path(gog, x), depth)


def count_paths(gog: GraphOfGroups, x: str, depth: int) -> int:
    """Size of the depth-n slice, by edge-state recursion."""
    if depth == 0:
        return 1
    state = {f: len(gog.sigma(f)) for f in gog.edges_into(x)}
    for _ in range(depth - 1):
        nxt: dict[str, int] = {}
        for f, c in state.items():
            for f2 in gog.edges_into(gog.source(f)):
                block = 1 if f2 == gog.reverse(f) else 0
                nxt[f2] = nxt.get(f2, 0) + c * (len(gog.sigma(f2)) - block)
        state = nxt
    return sum(state.values())


def _vertex_valence(gog: GraphOfGroups, y: str) -> int:
    return sum(len(gog.sigma(f)) for f in gog.edges_into(y))


def tree_valences(gog: GraphOfGroups, x: str,
                  depth: int) -> tuple[dict[int, int], ...]:
    """Histogram {valence: vertex count} for each tree depth 0..n.

    A tree vertex reached by a path with last edge f has one neighbour
    per admissible extension plus its parent, which adds up to the
    total transversal count at the graph vertex s(f); the root has no
    parent but also no blocked backtrack, giving the same formula at x.
    """
    levels = [{_vertex_valence(gog, x): 1}]
    state = {f: len(gog.sigma(f)) for f in gog.edges_into(x)}
    for _ in range(depth):
        lvl: dict[int, int] = {}
        for f, c in state.items():
            val = _vertex_valence(gog, gog.source(f))
            lvl[val] = lvl.get(val, 0) + c
        levels.append(lvl)
        nxt: dict[str, int] = {}
        for f, c in state.items():
            for f2 in gog.edges_into(gog.source(f)):
                block = 1 if f2 == gog.reverse(f) else 0
                nxt[f2] = nxt.get(f2, 0) + c * (len(gog.sigma(f2)) - block)
        state = nxt
    return tuple(levels)


# -- cylinders -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cylinder:
    """The set of boundary points extending a fixed finite path."""

    gog: GraphOfGroups = field(repr=False)
    base: ReducedGWord

    def __post_init__(self):
        _require_path(self.base, "cylinder base")
        if not isinstance(self.base, ReducedGWord):
            object.__setattr__(self, "base",
                               ReducedGWord(self.gog, self.base.range_vertex,
                                            self.base.pairs))

    @property
    def fiber(self) -> str:
        return self.base.range_vertex

    @property
    def depth(self) -> int:
        return len(self.base)

    def children(self) -> tuple["Cylinder", ...]:
        return tuple(Cylinder(self.gog, p)
                     for p in children(self.gog, self.base))

    def as_set(self) -> "CylinderSet":
        return CylinderSet.from_paths(self.gog, self.fiber, [self.base])

    def __eq__(self, other):
        return isinstance(other, Cylinder) and self.base == other.base

    def __hash__(self):
        return hash(self.base)

    def __str__(self):
        return f"Z({format_word(self.base)})"


class CylinderSet:
    """A finite union of cylinders in one boundary fiber, normalized
    to a uniform depth with an optional complement flag.

    The listed members always form the smaller side: when more than
    half of the depth-n slice would be listed, the representation flips
    to the complement.  Equality is semantic; two sets at different
    depths compare equal exactly when they contain the same boundary
    points.
    """

    __slots__ = ("gog", "fiber", "depth", "members", "complement",
                 "_coarse")

    def __init__(self, gog: GraphOfGroups, fiber: str, depth: int,
                 members, complement: bool = False):
        members = frozenset(members)
        for p in members:
            if p.range_vertex != fiber or len(p) != depth:
                raise BstreeError(
                    f"member {format_word(p)} is not a depth-{depth} "
                    f"path at {fiber!r}")
            _require_path(p, "cylinder set member")
        total = count_paths(gog, fiber, depth)
        if len(members) > total - len(members) or (
                complement and 2 * len(members) == total):
            members = frozenset(enumerate_paths(gog, fiber, depth)) - members
            complement = not complement
        self.gog = gog
        self.fiber = fiber
        self.depth = depth
        self.members = members
        self.complement = complement
        self._coarse = None

    # -- constructors ------------------------------------------------

    @classmethod
    def empty(cls, gog: GraphOfGroups, fiber: str) -> "CylinderSet":
        return cls(gog, fiber, 0, ())

    @classmethod
    def full(cls, gog: GraphOfGroups, fiber: str) -> "CylinderSet":
        return cls(gog, fiber, 0, (), complement=True)

    @classmethod
    def from_paths(cls, gog: GraphOfGroups, fiber: str,
                   paths) -> "CylinderSet":
        paths = list(paths)
        if not paths:
            return cls.empty(gog, fiber)
        depth = max(len(p) for p in paths)
        members = set()
        for p in paths:
            members.update(descend(gog, p, depth))
        return cls(gog, fiber, depth, members)

    @classmethod
    def union(cls, gog: GraphOfGroups, fiber: str,
              parts) -> "CylinderSet":
        parts = list(parts)
        if not parts:
            return cls.empty(gog, fiber)
        depth = max(p.depth for p in parts)
        members = set()
        for part in parts:
            members.update(part.at_depth(depth).resolve())
        return cls(gog, fiber, depth, members)

    # -- views ---------------------------------------------------------

    def at_depth(self, depth: int) -> "CylinderSet":
        if depth == self.depth:
            return self
        if depth < self.depth:
            raise BstreeError(f"cannot coarsen a depth-{self.depth} "
                              f"set to depth {depth}")
        members = set()
        for p in self.members:
            members.update(descend(self.gog, p, depth))
        return CylinderSet(self.gog, self.fiber, depth, members,
                           self.complement)

    def resolve(self) -> frozenset:
        """Explicit member paths at this set's depth, complement
        resolved away."""
        if not self.complement:
            return self.members
        return frozenset(enumerate_paths(self.gog, self.fiber,
                                         self.depth)) - self.members

    def is_empty(self) -> bool:
        return not self.members and not self.complement

    def is_full(self) -> bool:
        return not self.members and self.complement

    def intersects(self, other: "CylinderSet") -> bool:
        depth = max(self.depth, other.depth)
        a = self.at_depth(depth).resolve()
        b = other.at_depth(depth).resolve()
        return bool(a & b)

    # -- canonical comparison ------------------------------------------

    def _coarse_key(self) -> frozenset:
        """The unique maximal-cylinder decomposition of this set."""
        if self._coarse is not None:
            return self._coarse
        current = {p.pairs for p in self.resolve()}
        while True:
            by_parent: dict[tuple, set] = {}
            for pairs in current:
                if pairs:
                    by_parent.setdefault(pairs[:-1], set()).add(pairs)
            merged = False
            for parent, kids in by_parent.items():
                parent_word = ReducedGWord(self.gog, self.fiber, parent)
                if len(kids) == len(children(self.gog, parent_word)):
                    current -= kids
                    current.add(parent)
                    merged = True
            if not merged:
                break
        self._coarse = frozenset(current)
        return self._coarse

    def __eq__(self, other):
        if not isinstance(other, CylinderSet):
            return NotImplemented
        return (self.fiber == other.fiber
                and self._coarse_key() == other._coarse_key())

    def __hash__(self):
        return hash((self.fiber, self._coarse_key()))

    def __str__(self):
        inner = ", ".join(sorted(
            format_word(p) for p in self.members))
        tag = "complement of " if self.complement else ""
        return f"{tag}Z{{{inner}}} at {self.fiber!r}"

    __repr__ = __str__


# -- the boundary action ---------------------------------------------------

def act_on_path(gog: GraphOfGroups, gamma: ReducedGWord,
                mu: ReducedGWord, lookahead: ReducedGWord) -> ReducedGWord:
    """Prefix of length |mu| of the image of any boundary point
    extending mu . lookahead under gamma.

    The lookahead supplies the extra letters consumed by cancellation;
    a lookahead of length at least |gamma| always suffices.  When the
    available letters cannot pin down the image prefix the call raises
    LookaheadError and the caller should refine.
    """
    _require_path(mu, "acted path")
    _require_path(lookahead, "lookahead")
    if gamma.source_vertex != mu.range_vertex:
        raise BstreeError(f"cannot act: word source {gamma.source_vertex!r} "
                          f"does not match path range {mu.range_vertex!r}")
    full = concat(gog, mu, lookahead)
    if len(full) != len(mu) + len(lookahead):
        raise BstreeError("lookahead does not extend the path reducibly")
    w = concat(gog, gamma, full)
    cancelled = (len(gamma) + len(full) - len(w)) // 2
    if cancelled >= len(full) or len(w) < len(mu):
        raise LookaheadError(
            f"lookahead of length {len(lookahead)} cannot stabilize a "
            f"depth-{len(mu)} prefix under a word of length {len(gamma)}")
    return ReducedGWord(gog, w.range_vertex, w.pairs[:len(mu)])


def act_on_cylinder(gog: GraphOfGroups, gamma: ReducedGWord,
                    cyl: Cylinder) -> CylinderSet:
    """Exact image of a cylinder under a reduced word.

    Refines the base just far enough that the reduction of gamma times
    the refined path keeps a stable prefix: once the cancellation count
    drops below the refined depth, the image of that refined cylinder
    is the single cylinder over the reduced product.  Termination is
    guaranteed because at most |gamma| letters can ever cancel.
    """
    if gamma.source_vertex != cyl.fiber:
        raise BstreeError(f"cannot act: word source {gamma.source_vertex!r} "
                          f"does not match fiber {cyl.fiber!r}")
    glen = len(gamma)
    pieces = []

    def visit(rho: ReducedGWord) -> None:
        w = concat(gog, gamma, rho)
        cancelled = (glen + len(rho) - len(w)) // 2
        if len(rho) > 0 and cancelled < len(rho):
            pieces.append(ReducedGWord(gog, w.range_vertex, w.pairs))
        else:
            for child in children(gog, rho):
                visit(child)

    visit(cyl.base)
    return CylinderSet.from_paths(gog, gamma.range_vertex, pieces)


def act_on_cylinder_set(gog: GraphOfGroups, gamma: ReducedGWord,
                        cs: CylinderSet) -> CylinderSet:
    parts = [act_on_cylinder(gog, gamma, Cylinder(gog, p))
             for p in sorted(cs.resolve(), key=format_word)]
    return CylinderSet.union(gog, gamma.range_vertex, parts)


# -- brute-force isotropy sampling -----------------------------------------

def group_ball(gog: GraphOfGroups, tree: SpanningTree,
               wordlen: int) -> tuple[ReducedGWord, ...]:
    """All distinct fundamental-group elements spelled by at most
    wordlen standard generators, identity included, in discovery
    order."""
    identity = ReducedGWord(
        gog, tree.base, (), gog.vertex_group(tree.base).identity())
    gens = [g.word for g in epsilon_generators(gog, tree)]
    seen: dict[ReducedGWord, None] = {identity: None}
    frontier = [identity]
    for _ in range(wordlen):
        nxt = []
        for w in frontier:
            for g in gens:
                prod = concat(gog, w, g)
                if prod not in seen:
                    seen[prod] = None
                    nxt.append(prod)
        frontier = nxt
    return tuple(seen)


def isotropy_candidates(gog: GraphOfGroups, tree: SpanningTree,
                        prefix: ReducedGWord, wordlen: int,
                        depth: int | None = None) -> tuple[ReducedGWord, ...]:
    """Group elements of bounded generator length that could fix a
    boundary point extending the prefix.

    A candidate is any gamma whose image of some depth-d refinement of
    the prefix cylinder meets that refinement again; every element
    actually fixing a point in Z(prefix) passes this test, so the
    returned list over-approximates the isotropy met in the cylinder.
    """
    _require_path(prefix, "prefix")
    if prefix.range_vertex != tree.base:
        raise BstreeError(f"prefix must be based at {tree.base!r}")
    if depth is None:
        depth = len(prefix) + wordlen
    refinements = [Cylinder(gog, p) for p in descend(gog, prefix, depth)]
    sets = {c: c.as_set() for c in refinements}
    out = []
    for gamma in group_ball(gog, tree, wordlen):
        for cyl in refinements:
            if act_on_cylinder(gog, gamma, cyl).intersects(sets[cyl]):
                out.append(gamma)
                break
    return tuple(out)


# -- rendering --------------------------------------------------------------

def tree_dot(gog: GraphOfGroups, x: str, depth: int) -> str:
    """DOT rendering of the tree slice down to the given depth, with
    node ids equal to the formatted paths so diffs stay stable."""
    lines = ["digraph bstree {",
             "  rankdir=TB;",
             '  node [shape=box, fontname="monospace"];']
    level = [trivial_path(gog, x)]
    for d in range(depth + 1):
        for p in level:
            label = format_word(p) if p.pairs else x
            lines.append(f'  "{format_word(p)}" [label="{label}"];')
        if d == depth:
            break
        nxt = []
        for p in level:
            for c in children(gog, p):
                h, f = c.pairs[-1]
                lines.append(f'  "{format_word(p)}" -> "{format_word(c)}" '
                             f'[label="{format_element(h)} {f}"];')
                nxt.append(c)
        level = nxt
    lines.append("}")
    return "\n".join(lines) + "\n"
