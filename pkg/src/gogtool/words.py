"""Words over a graph of groups and their normal forms.

A word with range x is an alternating string g1 e1 g2 e2 ... gn en,
optionally followed by a trailing group element, where each gi lives in
the vertex group at r(ei) and consecutive edges are composable. Words
multiply like morphisms, right to left. Every word is equivalent, under
the vertex group relations together with

    (R1)  reverse(e) = e^(-1)
    (R2)  e alpha_reverse(e)(g) reverse(e) = alpha_e(g)

to a unique reduced word: one whose letters gi (i <= n) lie in the
fixed transversals and which contains no subword e 1 reverse(e). The
``reduce`` function computes that normal form in one left-to-right
sweep, carrying the group element that (R2) pushes through each edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .abelian import AbElement, format_element, parse_element_literal
from .gog import GogError, GraphOfGroups, SpanningTree


class WordError(ValueError):
    """Raised for ill-formed words or impossible word operations."""


Pair = tuple[AbElement, str]


@dataclass(frozen=True, eq=False)
class GWord:
    """Alternating word of group elements and edges.

    ``tail`` holds the trailing group element; ``tail is None`` means
    the word ends with its last edge, the shape that labels vertices of
    the tree. A word with no pairs and no tail is the trivial path at
    its range vertex. Equality ignores the certificate class, so a
    reduced word compares equal to the plain word with the same data.
    """

    gog: GraphOfGroups = field(repr=False)
    range_vertex: str
    pairs: tuple[Pair, ...]
    tail: Optional[AbElement] = None

    def __eq__(self, other):
        if not isinstance(other, GWord):
            return NotImplemented
        return (self.range_vertex, self.pairs, self.tail) == \
            (other.range_vertex, other.pairs, other.tail)

    def __hash__(self):
        return hash((self.range_vertex, self.pairs, self.tail))

    def __post_init__(self):
        g = self.gog
        if not g.has_vertex(self.range_vertex):
            raise WordError(f"unknown vertex {self.range_vertex!r}")
        at = self.range_vertex
        for elem, e in self.pairs:
            if not g.has_edge(e):
                raise WordError(f"unknown edge {e!r}")
            if g.range(e) != at:
                raise WordError(f"edge {e!r} has range {g.range(e)!r} "
                                f"but the word is at {at!r}")
            if elem.group != g.vertex_group(at):
                raise WordError(f"element {elem} does not live in the "
                                f"group at {at!r}")
            at = g.source(e)
        if self.tail is not None and \
                self.tail.group != g.vertex_group(at):
            raise WordError(f"tail {self.tail} does not live in the "
                            f"group at {at!r}")

    @property
    def source_vertex(self) -> str:
        if self.pairs:
            return self.gog.source(self.pairs[-1][1])
        return self.range_vertex

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def is_path(self) -> bool:
        return self.tail is None

    @property
    def is_trivial(self) -> bool:
        return not self.pairs and (self.tail is None
                                   or self.tail.is_identity())

    def edges(self) -> tuple[str, ...]:
        return tuple(e for _, e in self.pairs)

    def is_reduced(self) -> bool:
        for i, (g, e) in enumerate(self.pairs):
            if self.gog.decompose(e, g)[0] != g:
                return False
            if i > 0 and g.is_identity() and \
                    self.pairs[i - 1][1] == self.gog.reverse(e):
                return False
        return True

    def __str__(self) -> str:
        return format_word(self)


@dataclass(frozen=True, eq=False)
class ReducedGWord(GWord):
    """A word certified to be in normal form; only produced by
    ``reduce`` and the checked constructors below."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_reduced():
            raise WordError(f"word {format_word(self)} is not reduced")


def trivial_path(gog: GraphOfGroups, x: str) -> ReducedGWord:
    return ReducedGWord(gog, x, ())


def group_word(gog: GraphOfGroups, x: str, g: AbElement) -> ReducedGWord:
    """The length-zero word g at the vertex x."""
    return ReducedGWord(gog, x, (), g)


def path_word(gog: GraphOfGroups, edges: Iterable[str]) -> ReducedGWord:
    """The path 1 e1 1 e2 ... along a reduced edge path."""
    edges = tuple(edges)
    if not edges:
        raise WordError("path_word needs at least one edge; use "
                        "trivial_path for empty paths")
    rng = gog.range(edges[0])
    pairs = tuple((gog.vertex_group(gog.range(e)).identity(), e)
                  for e in edges)
    return ReducedGWord(gog, rng, pairs)


def reduced_path(gog: GraphOfGroups, x: str,
                 pairs: Iterable[Pair]) -> ReducedGWord:
    """Checked constructor for a reduced word in path shape."""
    return ReducedGWord(gog, x, tuple(pairs))


def reduce(gog: GraphOfGroups, word: GWord) -> ReducedGWord:
    """Normal form of a word, in one sweep.

    Invariant: the processed prefix equals (product of ``out``) times
    ``carry``, with carry sitting at the vertex the next pair attaches
    to. Writing carry + g = t + alpha_e(h) moves t e outward and pushes
    alpha_reverse(e)(h) through the edge; when t is trivial and the
    previous retained edge is reverse(e), the two edges cancel instead
    and the pushed element lands on the earlier carry.
    """
    out: list[Pair] = []
    carry = gog.vertex_group(word.range_vertex).identity()
    for g, e in word.pairs:
        cur = carry + g
        t, h = gog.decompose(e, cur)
        pushed = gog.alpha(gog.reverse(e)).apply(h)
        if t.is_identity() and out and out[-1][1] == gog.reverse(e):
            t_prev, _ = out.pop()
            carry = t_prev + pushed
        else:
            out.append((t, e))
            carry = pushed
    tail = carry if word.tail is None else carry + word.tail
    return ReducedGWord(gog, word.range_vertex, tuple(out), tail)


def concat(gog: GraphOfGroups, a: GWord, b: GWord) -> ReducedGWord:
    """Reduced product a * b of composable words."""
    if a.source_vertex != b.range_vertex:
        raise WordError(f"cannot compose: source {a.source_vertex!r} "
                        f"does not match range {b.range_vertex!r}")
    t1 = a.tail if a.tail is not None else \
        gog.vertex_group(a.source_vertex).identity()
    if b.pairs:
        g0, e0 = b.pairs[0]
        pairs = a.pairs + ((t1 + g0, e0),) + b.pairs[1:]
        tail = b.tail
        if tail is None:
            tail = gog.vertex_group(b.source_vertex).identity()
    else:
        pairs = a.pairs
        tail = t1 if b.tail is None else t1 + b.tail
    return reduce(gog, GWord(gog, a.range_vertex, pairs, tail))


def invert(gog: GraphOfGroups, word: GWord) -> ReducedGWord:
    """Reduced groupoid inverse: reverse the edges and negate the
    letters."""
    letters = [g for g, _ in word.pairs]
    letters.append(word.tail if word.tail is not None else
                   gog.vertex_group(word.source_vertex).identity())
    edges = [gog.reverse(e) for _, e in reversed(word.pairs)]
    letters.reverse()
    pairs = tuple((-letters[i], edges[i]) for i in range(len(edges)))
    return reduce(gog, GWord(gog, word.source_vertex, pairs, -letters[-1]))


# -- generators of the fundamental group ---------------------------------

def epsilon_edge(gog: GraphOfGroups, tree: SpanningTree,
                 e: str) -> ReducedGWord:
    """Loop at the base going out along the tree, across e, and back.

    Trivial exactly when e is a tree edge.
    """
    v = tree.base
    out = tree.path(v, gog.range(e))
    back = tree.path(gog.source(e), v)
    edges = out + (e,) + back
    pairs = tuple((gog.vertex_group(gog.range(f)).identity(), f)
                  for f in edges)
    word = GWord(gog, v, pairs, gog.vertex_group(v).identity())
    return reduce(gog, word)


def epsilon_group(gog: GraphOfGroups, tree: SpanningTree,
                  x: str, g: AbElement) -> ReducedGWord:
    """Loop at the base conjugating g at x along the tree."""
    if g.group != gog.vertex_group(x):
        raise WordError(f"{g} does not live in the group at {x!r}")
    v = tree.base
    out = tree.path(v, x)
    back = tree.path(x, v)
    if not back:
        return reduce(gog, GWord(gog, v, (), g))
    pairs = tuple((gog.vertex_group(gog.range(f)).identity(), f)
                  for f in out)
    pairs += ((g, back[0]),)
    pairs += tuple((gog.vertex_group(gog.range(f)).identity(), f)
                   for f in back[1:])
    word = GWord(gog, v, pairs, gog.vertex_group(v).identity())
    return reduce(gog, word)


@dataclass(frozen=True)
class EpsilonGenerator:
    label: str
    word: ReducedGWord


def epsilon_generators(gog: GraphOfGroups,
                       tree: SpanningTree) -> tuple[EpsilonGenerator, ...]:
    """Symmetric generating set of the fundamental group at the base:
    both crossings of every non-tree edge, and plus and minus every
    vertex group generator."""
    gens: list[EpsilonGenerator] = []
    for e in gog.oriented_edges():
        if tree.contains(e):
            continue
        for name in (e, gog.reverse(e)):
            gens.append(EpsilonGenerator(
                f"eps[{name}]", epsilon_edge(gog, tree, name)))
    for x in gog.vertices:
        for g in gog.vertex_group(x).generators():
            for s in (g, -g):
                word = epsilon_group(gog, tree, x, s)
                label = f"eps[{x},{format_element(s)}]"
                gens.append(EpsilonGenerator(label, word))
    return tuple(gens)


# -- index ratios ---------------------------------------------------------

def index_ratio(gog: GraphOfGroups, word: GWord) -> Fraction:
    """Product over the word's edges of index at the source end over
    index at the range end."""
    ratio = Fraction(1)
    for _, e in word.pairs:
        num = gog.omega(gog.reverse(e))
        den = gog.omega(e)
        if num is None or den is None:
            raise WordError(f"edge {e!r} has an infinite index")
        ratio *= Fraction(num, den)
    return ratio


def smallest_denominator(gog: GraphOfGroups, word: GWord) -> int:
    return index_ratio(gog, word).denominator


# -- literals -------------------------------------------------------------

def format_word(word: GWord) -> str:
    if not word.pairs and word.tail is None:
        return "1"
    parts = []
    for g, e in word.pairs:
        parts.append(format_element(g))
        parts.append(e)
    if word.tail is not None:
        parts.append(format_element(word.tail))
    return " ".join(parts)


def parse_word_literal(gog: GraphOfGroups, range_vertex: str,
                       text: str) -> GWord:
    """Parse 'g e g e ... [g]' with parenthesised elements and bare
    edge names; '1' is the trivial path."""
    text = text.strip()
    if not gog.has_vertex(range_vertex):
        raise WordError(f"unknown vertex {range_vertex!r}")
    if text == "1" or not text:
        return trivial_path(gog, range_vertex)
    tokens = text.split()
    pairs: list[Pair] = []
    at = range_vertex
    pending: Optional[AbElement] = None
    for tok in tokens:
        if tok.startswith("("):
            if pending is not None:
                raise WordError(f"two consecutive elements near {tok!r}")
            pending = parse_element_literal(gog.vertex_group(at), tok)
        else:
            if pending is None:
                raise WordError(f"edge {tok!r} needs a preceding element")
            if not gog.has_edge(tok):
                raise WordError(f"unknown edge {tok!r}")
            if gog.range(tok) != at:
                raise WordError(f"edge {tok!r} does not attach at {at!r}")
            pairs.append((pending, tok))
            pending = None
            at = gog.source(tok)
    return GWord(gog, range_vertex, tuple(pairs), pending)
