"""Serre graphs decorated with finitely generated abelian groups.

A graph is a finite vertex set together with directed edges carrying a
fixed-point-free reversal involution; an edge e runs from its source
s(e) to its range r(e), and paths compose right to left. A graph of
groups attaches an abelian group to every vertex and edge and an
injective homomorphism alpha_e from each edge group into the group at
r(e). This module also parses the on-disk document format and builds
spanning trees rooted at a base vertex.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .abelian import (
    AbElement,
    AbelianError,
    AbHom,
    FgAbelianGroup,
    coset_decompose,
    parse_group_spec,
    subgroup_index,
    transversal,
)


class GogError(ValueError):
    """Raised for malformed graphs of groups or input documents."""


_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Edge:
    """One directed edge; the reversal is a separate Edge object."""

    name: str
    range_vertex: str
    source_vertex: str
    reverse: str


class GraphOfGroups:
    """Connected graph of finitely generated abelian groups.

    Construction validates everything that later computations rely on:
    distinct well-formed names, a genuine reversal involution, matching
    group shapes, injectivity of every edge inclusion, and connectivity.
    Singular vertices and infinite edge indices are legal here but are
    reported by ``validate`` so callers can decide how strict to be.
    """

    def __init__(self,
                 vertex_groups: Mapping[str, FgAbelianGroup],
                 edges: Iterable[tuple[str, str, str, AbHom, AbHom]]):
        if not vertex_groups:
            raise GogError("a graph of groups needs at least one vertex")
        self._vertex_groups: dict[str, FgAbelianGroup] = {}
        for name, grp in vertex_groups.items():
            if not _NAME_RE.match(name):
                raise GogError(f"bad vertex name {name!r}")
            self._vertex_groups[name] = grp
        self._edges: dict[str, Edge] = {}
        self._alpha: dict[str, AbHom] = {}
        self._oriented: list[str] = []
        for name, rng, src, fwd, bwd in edges:
            self._add_edge(name, rng, src, fwd, bwd)
        self._sigma_cache: dict[str, tuple[AbElement, ...]] = {}
        self._check_connected()

    def _add_edge(self, name: str, rng: str, src: str,
                  fwd: AbHom, bwd: AbHom) -> None:
        if not _NAME_RE.match(name):
            raise GogError(f"bad edge name {name!r}")
        rev = "~" + name
        if name in self._edges or rev in self._edges:
            raise GogError(f"duplicate edge name {name!r}")
        for v in (rng, src):
            if v not in self._vertex_groups:
                raise GogError(f"edge {name!r} mentions unknown vertex {v!r}")
        if fwd.source != bwd.source:
            raise GogError(f"edge {name!r}: the two inclusions must share "
                           "one edge group")
        if fwd.target != self._vertex_groups[rng]:
            raise GogError(f"edge {name!r}: forward inclusion does not land "
                           f"in the group at {rng!r}")
        if bwd.target != self._vertex_groups[src]:
            raise GogError(f"edge {name!r}: backward inclusion does not land "
                           f"in the group at {src!r}")
        for hom, label in ((fwd, name), (bwd, rev)):
            if not hom.is_injective():
                raise GogError(f"inclusion along {label!r} is not injective")
        self._edges[name] = Edge(name, rng, src, rev)
        self._edges[rev] = Edge(rev, src, rng, name)
        self._alpha[name] = fwd
        self._alpha[rev] = bwd
        self._oriented.append(name)

    def _check_connected(self) -> None:
        verts = list(self._vertex_groups)
        seen = {verts[0]}
        frontier = [verts[0]]
        while frontier:
            x = frontier.pop()
            for e in self._edges.values():
                if e.range_vertex == x and e.source_vertex not in seen:
                    seen.add(e.source_vertex)
                    frontier.append(e.source_vertex)
        if len(seen) != len(verts):
            missing = sorted(set(verts) - seen)
            raise GogError(f"graph is not connected; unreachable: {missing}")

    # -- structure queries ---------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self._vertex_groups)

    def vertex_group(self, x: str) -> FgAbelianGroup:
        try:
            return self._vertex_groups[x]
        except KeyError:
            raise GogError(f"unknown vertex {x!r}") from None

    def has_vertex(self, x: str) -> bool:
        return x in self._vertex_groups

    def has_edge(self, e: str) -> bool:
        return e in self._edges

    def edge_names(self) -> tuple[str, ...]:
        return tuple(self._edges)

    def oriented_edges(self) -> tuple[str, ...]:
        """One declared representative per reversal pair."""
        return tuple(self._oriented)

    def _edge(self, e: str) -> Edge:
        try:
            return self._edges[e]
        except KeyError:
            raise GogError(f"unknown edge {e!r}") from None

    def range(self, e: str) -> str:
        return self._edge(e).range_vertex

    def source(self, e: str) -> str:
        return self._edge(e).source_vertex

    def reverse(self, e: str) -> str:
        return self._edge(e).reverse

    def alpha(self, e: str) -> AbHom:
        """Inclusion of the edge group into the group at r(e)."""
        self._edge(e)
        return self._alpha[e]

    def edge_group(self, e: str) -> FgAbelianGroup:
        return self.alpha(e).source

    def edges_into(self, x: str) -> tuple[str, ...]:
        if x not in self._vertex_groups:
            raise GogError(f"unknown vertex {x!r}")
        return tuple(sorted(
            e for e, d in self._edges.items() if d.range_vertex == x))

    def edges_out_of(self, x: str) -> tuple[str, ...]:
        return tuple(self.reverse(e) for e in self.edges_into(x))

    def valence(self, x: str) -> int:
        return len(self.edges_into(x))

    # -- index data ----------------------------------------------------

    def omega(self, e: str) -> Optional[int]:
        """Index of the edge group image at r(e); None when infinite."""
        return subgroup_index(self.alpha(e))

    def sigma(self, e: str) -> tuple[AbElement, ...]:
        """Fixed transversal of the image at r(e), identity first."""
        if e not in self._sigma_cache:
            self._sigma_cache[e] = transversal(self.alpha(e))
        return self._sigma_cache[e]

    def decompose(self, e: str, g: AbElement) -> tuple[AbElement, AbElement]:
        """Split g at r(e) as t + alpha_e(h) with t in sigma(e)."""
        return coset_decompose(self.alpha(e), g)

    # -- health reports --------------------------------------------------

    def singular_vertices(self) -> tuple[str, ...]:
        out = []
        for x in self.vertices:
            into = self.edges_into(x)
            if len(into) == 1 and self.omega(into[0]) == 1:
                out.append(x)
        return tuple(out)

    def infinite_index_edges(self) -> tuple[str, ...]:
        return tuple(e for e in self._edges if self.omega(e) is None)

    @property
    def is_locally_finite(self) -> bool:
        return not self.infinite_index_edges()

    @property
    def is_nonsingular(self) -> bool:
        return not self.singular_vertices()

    def validate(self) -> list[str]:
        """Human-readable problems beyond what construction rejects."""
        problems = []
        for e in self.infinite_index_edges():
            problems.append(f"edge {e}: edge group has infinite index "
                            f"at {self.range(e)}")
        for x in self.singular_vertices():
            e = self.edges_into(x)[0]
            problems.append(f"vertex {x} is singular: its only edge {e} "
                            "has index 1")
        return problems

    def betti(self) -> int:
        return len(self._oriented) - (len(self._vertex_groups) - 1)


class SpanningTree:
    """Breadth-first spanning tree rooted at a base vertex.

    Ties are broken by sorted edge name, so the tree is a deterministic
    function of the graph and the base.
    """

    def __init__(self, gog: GraphOfGroups, base: str):
        if not gog.has_vertex(base):
            raise GogError(f"unknown base vertex {base!r}")
        self.gog = gog
        self.base = base
        # toward_root[y] is the tree edge with source y whose range is
        # the parent of y, one step closer to the base
        self.toward_root: dict[str, str] = {}
        frontier = [base]
        seen = {base}
        while frontier:
            nxt = []
            for x in frontier:
                for e in gog.edges_into(x):
                    y = gog.source(e)
                    if y not in seen:
                        seen.add(y)
                        self.toward_root[y] = e
                        nxt.append(y)
            frontier = nxt
        edges = set()
        for e in self.toward_root.values():
            edges.add(e)
            edges.add(gog.reverse(e))
        self.tree_edges = frozenset(edges)

    def contains(self, e: str) -> bool:
        return e in self.tree_edges

    def depth(self, x: str) -> int:
        return len(self.chain_to_root(x))

    def chain_to_root(self, x: str) -> tuple[str, ...]:
        """Edges from x up to the base, nearest to x first."""
        if not self.gog.has_vertex(x):
            raise GogError(f"unknown vertex {x!r}")
        chain = []
        while x != self.base:
            e = self.toward_root[x]
            chain.append(e)
            x = self.gog.range(e)
        return tuple(chain)

    def path(self, x: str, y: str) -> tuple[str, ...]:
        """The reduced tree path with range x and source y."""
        up_x = self.chain_to_root(x)
        up_y = self.chain_to_root(y)
        i, j = len(up_x), len(up_y)
        while i > 0 and j > 0 and up_x[i - 1] == up_y[j - 1]:
            i -= 1
            j -= 1
        down = tuple(self.gog.reverse(e) for e in up_x[:i])
        return down + tuple(reversed(up_y[:j]))

    def anchor(self, e: str) -> str:
        """Final edge of the tree path from the base to r(e)."""
        x = self.gog.range(e)
        if x == self.base:
            raise GogError(f"anchor of {e!r} is undefined: its range is "
                           "the base vertex")
        return self.toward_root[x]

    def points_toward_root(self, e: str) -> bool:
        return self.toward_root.get(self.gog.source(e)) == e


@dataclass(frozen=True)
class RaySpec:
    """Index sequence of an eventually periodic ray of infinite cyclic
    groups: finitely many prefix indices, then the period repeated
    forever."""

    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise GogError("ray period must be nonempty")
        for k in self.prefix + self.period:
            if not isinstance(k, int) or k < 1:
                raise GogError(f"ray indices must be positive integers, "
                               f"got {k!r}")

    def index_at(self, i: int) -> int:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    @property
    def has_expanding_period(self) -> bool:
        return any(k > 1 for k in self.period)


@dataclass(frozen=True)
class Document:
    """Parsed input: either a graph of groups with a base vertex, or a
    ray preset."""

    gog: Optional[GraphOfGroups]
    base: Optional[str]
    ray: Optional[RaySpec]


def baumslag_solitar(m: int, n: int) -> GraphOfGroups:
    """Loop of infinite cyclic groups with indices |n| at the forward
    end and |m| at the backward end."""
    if m == 0 or n == 0:
        raise GogError("multipliers must be nonzero")
    z = FgAbelianGroup(1)
    fwd = AbHom(z, z, ((n,),))
    bwd = AbHom(z, z, ((m,),))
    return GraphOfGroups({"x": z}, [("e", "x", "x", fwd, bwd)])


# -- document parsing ----------------------------------------------------

def _split_top_level(s: str) -> list[str]:
    parts = []
    depth = 0
    cur = []
    for ch in s:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
            if depth < 0:
                raise GogError(f"unbalanced brackets in {s!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise GogError(f"unbalanced brackets in {s!r}")
    parts.append("".join(cur))
    return parts


def _parse_matrix(text: str, where: str) -> tuple[tuple[int, ...], ...]:
    try:
        raw = ast.literal_eval(text.strip())
    except (ValueError, SyntaxError):
        raise GogError(f"{where}: cannot read matrix {text.strip()!r}") \
            from None
    if not isinstance(raw, list):
        raise GogError(f"{where}: matrix must be a list of rows")
    rows = []
    for row in raw:
        if not isinstance(row, list) or \
                not all(isinstance(v, int) for v in row):
            raise GogError(f"{where}: matrix rows must be lists of integers")
        rows.append(tuple(row))
    if len({len(r) for r in rows}) > 1:
        raise GogError(f"{where}: matrix rows have unequal lengths")
    return tuple(rows)


def _matrix_shape(rows: tuple[tuple[int, ...], ...]) -> int:
    return len(rows[0]) if rows else 0


def _build_hom(rows: tuple[tuple[int, ...], ...],
               edge_group: FgAbelianGroup,
               target: FgAbelianGroup,
               where: str) -> AbHom:
    if not rows:
        rows = tuple(() for _ in range(target.ngens))
    if len(rows) != target.ngens:
        raise GogError(f"{where}: matrix has {len(rows)} rows but the "
                       f"vertex group has {target.ngens} generators")
    if rows and len(rows[0]) != edge_group.ngens:
        raise GogError(f"{where}: matrix has {len(rows[0])} columns but "
                       f"the edge group has {edge_group.ngens} generators")
    try:
        return AbHom(edge_group, target, rows)
    except AbelianError as exc:
        raise GogError(f"{where}: {exc}") from None


_SECTIONS = ("vertices", "edges", "base", "ray")


def parse_document(text: str) -> Document:
    """Parse the plain-text input format.

    Sections [vertices], [edges] and optional [base] describe a graph
    of groups; a document consisting of a single [ray] section instead
    describes a ray preset. ``#`` starts a comment.
    """
    sections: dict[str, list[str]] = {}
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"\[(\w+)\]\s*(.*)$", line)
        if m:
            name, rest = m.group(1), m.group(2).strip()
            if name not in _SECTIONS:
                raise GogError(f"line {lineno}: unknown section [{name}]")
            if name in sections:
                raise GogError(f"line {lineno}: duplicate section [{name}]")
            sections[name] = []
            current = name
            if rest:
                sections[name].append(rest)
            continue
        if current is None:
            raise GogError(f"line {lineno}: content before any section")
        sections[current].append(line)

    if "ray" in sections:
        extra = sorted(set(sections) - {"ray"})
        if extra:
            raise GogError("a ray document cannot also contain sections "
                           f"{extra}")
        return Document(gog=None, base=None, ray=_parse_ray(sections["ray"]))

    if "vertices" not in sections:
        raise GogError("missing [vertices] section")
    groups: dict[str, FgAbelianGroup] = {}
    for line in sections["vertices"]:
        if "=" not in line:
            raise GogError(f"vertex line {line!r} is not 'name = group'")
        name, spec = (part.strip() for part in line.split("=", 1))
        if name in groups:
            raise GogError(f"duplicate vertex {name!r}")
        try:
            groups[name] = parse_group_spec(spec)
        except AbelianError as exc:
            raise GogError(f"vertex {name!r}: {exc}") from None

    edges = []
    for line in sections.get("edges", []):
        if ":" not in line:
            raise GogError(f"edge line {line!r} is not 'name: fields'")
        name, rest = (part.strip() for part in line.split(":", 1))
        fields = [f.strip() for f in _split_top_level(rest)]
        if len(fields) not in (4, 5):
            raise GogError(f"edge {name!r}: expected 'range, source, "
                           "matrix, matrix' with an optional edge group")
        rng, src = fields[0], fields[1]
        where = f"edge {name!r}"
        fwd_rows = _parse_matrix(fields[2], where)
        bwd_rows = _parse_matrix(fields[3], where)
        cols = max(_matrix_shape(fwd_rows), _matrix_shape(bwd_rows))
        if {_matrix_shape(fwd_rows), _matrix_shape(bwd_rows)} - {0, cols}:
            raise GogError(f"{where}: the two matrices have different "
                           "column counts")
        if len(fields) == 5:
            try:
                egrp = parse_group_spec(fields[4])
            except AbelianError as exc:
                raise GogError(f"{where}: {exc}") from None
        else:
            egrp = FgAbelianGroup(cols)
        for v in (rng, src):
            if v not in groups:
                raise GogError(f"{where}: unknown vertex {v!r}")
        fwd = _build_hom(fwd_rows, egrp, groups[rng], where)
        bwd = _build_hom(bwd_rows, egrp, groups[src], where)
        edges.append((name, rng, src, fwd, bwd))

    base_lines = sections.get("base", [])
    if len(base_lines) > 1:
        raise GogError("[base] must name exactly one vertex")
    base = base_lines[0] if base_lines else next(iter(groups))
    if base not in groups:
        raise GogError(f"base vertex {base!r} is not declared")

    gog = GraphOfGroups(groups, edges)
    return Document(gog=gog, base=base, ray=None)


def _parse_ray(lines: list[str]) -> RaySpec:
    if len(lines) != 1 or "=" not in lines[0]:
        raise GogError("[ray] must contain exactly one line "
                       "'indices = prefix ; period'")
    key, value = (part.strip() for part in lines[0].split("=", 1))
    if key != "indices":
        raise GogError(f"unknown ray setting {key!r}")
    if ";" not in value:
        raise GogError("ray indices need a ';' separating prefix from "
                       "period")
    prefix_part, period_part = value.split(";", 1)

    def ints(chunk: str) -> tuple[int, ...]:
        out = []
        for tok in chunk.split():
            try:
                out.append(int(tok))
            except ValueError:
                raise GogError(f"bad ray index {tok!r}") from None
        return tuple(out)

    return RaySpec(prefix=ints(prefix_part), period=ints(period_part))


def load_document(path) -> Document:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_document(fh.read())
