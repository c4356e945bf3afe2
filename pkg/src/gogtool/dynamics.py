"""Decision procedures for the boundary action of a graph of groups.

Everything runs through a finite flow graph on the oriented edges: an
arc d -> d' records that a reduced path arriving along d can continue
along d'.  Continuations are unconstrained except when d' reverses d,
where the connecting group element has to step outside the image of
the edge map, so the arc exists exactly when that image has index at
least two.  Infinite walks in the flow graph are precisely the
boundary rays, which turns questions about orbits into reachability
questions on a graph with one node per oriented edge.

The procedures return three-valued Verdicts rather than booleans.  A
decided verdict carries a machine-checkable witness: a periodic ray
that escapes an edge, a cycle presentation of the graph, an integer
that passes through every ray untouched.  An undecided verdict names
the hypothesis that failed; inputs with singular vertices or with
vertex groups outside the settled families are reported as undecided,
never guessed.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional, Union

from .abelian import format_element
from .gog import GraphOfGroups, RaySpec, SpanningTree
from .words import epsilon_edge, index_ratio, path_word


class DynamicsError(ValueError):
    pass


Subject = Union[GraphOfGroups, RaySpec]


def vertex_valence(gog: GraphOfGroups, x: str) -> Optional[int]:
    """Valence of the tree over a lift of x: the sum of the coset
    counts of the edges into x.  None means infinite."""
    total = 0
    for e in gog.edges_into(x):
        w = gog.omega(e)
        if w is None:
            return None
        total += w
    return total


def is_trivial_groups(gog: GraphOfGroups) -> bool:
    if not all(gog.vertex_group(x).is_trivial() for x in gog.vertices):
        return False
    return all(gog.edge_group(e).is_trivial() for e in gog.oriented_edges())


def is_gbs(gog: GraphOfGroups) -> bool:
    """All vertex and edge groups infinite cyclic."""
    groups = [gog.vertex_group(x) for x in gog.vertices]
    groups += [gog.edge_group(e) for e in gog.oriented_edges()]
    return all(g.rank == 1 and not g.torsion for g in groups)


# -- the flow graph -------------------------------------------------------

class FlowGraph:
    """Continuation graph on the oriented edges.

    A ray whose latest letter crossed d sits at s(d) and may continue
    along any edge into s(d); reversing d is possible only when the
    coset space of the reversal has at least two points, because the
    connecting group element must then be a nontrivial coset
    representative.  Arcs are stored in sorted order so every walk
    built from them is deterministic.
    """

    def __init__(self, nodes, arcs):
        self.nodes = tuple(nodes)
        self.arcs = {d: tuple(arcs[d]) for d in self.nodes}

    @classmethod
    def of(cls, gog: GraphOfGroups) -> "FlowGraph":
        arcs = {}
        for d in gog.edge_names():
            outs = []
            for f in gog.edges_into(gog.source(d)):
                if f == gog.reverse(d):
                    w = gog.omega(f)
                    if w is not None and w < 2:
                        continue
                outs.append(f)
            arcs[d] = outs
        return cls(gog.edge_names(), arcs)

    def without(self, dropped) -> "FlowGraph":
        gone = set(dropped)
        nodes = [d for d in self.nodes if d not in gone]
        return FlowGraph(nodes, {d: [f for f in self.arcs[d] if f not in gone]
                                 for d in nodes})

    def successors(self, d: str) -> tuple[str, ...]:
        return self.arcs[d]

    def reachable_from(self, d: str) -> frozenset:
        """Nodes reachable in one or more steps."""
        seen = set(self.arcs[d])
        queue = deque(seen)
        while queue:
            for f in self.arcs[queue.popleft()]:
                if f not in seen:
                    seen.add(f)
                    queue.append(f)
        return frozenset(seen)

    def cyclic_nodes(self) -> frozenset:
        """Nodes lying on some directed cycle; rays exist over a vertex
        exactly when a node there reaches this set."""
        return frozenset(d for d in self.nodes if d in self.reachable_from(d))

    def reaches_cycle(self, d: str) -> bool:
        cyc = self.cyclic_nodes()
        return d in cyc or bool(self.reachable_from(d) & cyc)

    def sccs(self) -> tuple[tuple[str, ...], ...]:
        """Strongly connected components, each sorted, listed by
        smallest member."""
        counter = itertools.count()
        index: dict[str, int] = {}
        low: dict[str, int] = {}
        stack: list[str] = []
        onstack: set[str] = set()
        comps = []
        for root in self.nodes:
            if root in index:
                continue
            index[root] = low[root] = next(counter)
            stack.append(root)
            onstack.add(root)
            work = [(root, iter(self.arcs[root]))]
            while work:
                node, arcs = work[-1]
                descended = False
                for f in arcs:
                    if f not in index:
                        index[f] = low[f] = next(counter)
                        stack.append(f)
                        onstack.add(f)
                        work.append((f, iter(self.arcs[f])))
                        descended = True
                        break
                    if f in onstack:
                        low[node] = min(low[node], index[f])
                if descended:
                    continue
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[node])
                if low[node] == index[node]:
                    comp = []
                    while True:
                        w = stack.pop()
                        onstack.discard(w)
                        comp.append(w)
                        if w == node:
                            break
                    comps.append(tuple(sorted(comp)))
        return tuple(sorted(comps))

    def cyclic_sccs(self) -> tuple[tuple[str, ...], ...]:
        """Components containing a directed cycle: more than one node,
        or one node with a self-arc."""
        return tuple(c for c in self.sccs()
                     if len(c) > 1 or c[0] in self.arcs[c[0]])


def can_flow(gog: GraphOfGroups, f: str, e: str) -> bool:
    """Whether a ray entering along e can traverse f strictly later.

    Decided as reachability from e to f in the flow graph, which
    matches the boundary picture whenever every finite reduced path
    extends to a ray; nonsingular graphs have that property.
    """
    flow = FlowGraph.of(gog)
    if e not in flow.arcs:
        raise DynamicsError(f"not an oriented edge: {e!r}")
    if f not in flow.arcs:
        raise DynamicsError(f"not an oriented edge: {f!r}")
    return f in flow.reachable_from(e)


# -- upstream graphs ------------------------------------------------------

class UpstreamGraph:
    """The part of the graph swept out by reduced paths leaving a
    vertex when certain first steps are forbidden.

    A ray that wants to arrive at the root ready to cross a reference
    edge must spend its earlier life in here.  Vertices and oriented
    edges are those met by any admissible path; the edge tuple is
    closed under reversal, and only the first step is constrained, so
    a forbidden edge may still occur deeper inside.
    """

    def __init__(self, gog: GraphOfGroups, root: str, first_edges):
        self.gog = gog
        self.root = root
        seen = set(first_edges)
        queue = deque(seen)
        while queue:
            a = queue.popleft()
            for f in gog.edges_into(gog.source(a)):
                if f != gog.reverse(a) and f not in seen:
                    seen.add(f)
                    queue.append(f)
        self.vertices = tuple(sorted({root} | {gog.source(a) for a in seen}))
        self.edges = tuple(sorted(seen | {gog.reverse(a) for a in seen}))

    @property
    def is_trivial(self) -> bool:
        return not self.edges

    @property
    def is_tree(self) -> bool:
        pairs = {frozenset((a, self.gog.reverse(a))) for a in self.edges}
        return len(pairs) == len(self.vertices) - 1

    def depths(self) -> dict[str, int]:
        """Edge distance from the root; the subgraph is connected by
        construction."""
        dist = {self.root: 0}
        queue = deque([self.root])
        while queue:
            x = queue.popleft()
            for a in self.edges:
                y = self.gog.source(a)
                if self.gog.range(a) == x and y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist


def upstream_graph(gog: GraphOfGroups, e: str) -> UpstreamGraph:
    """Where a ray lives before crossing e: paths out of s(e) that do
    not start with the reversal of e, nor with e itself when e is a
    loop."""
    root = gog.source(e)
    banned = {e, gog.reverse(e)}
    first = [f for f in gog.edges_into(root) if f not in banned]
    return UpstreamGraph(gog, root, first)


def upstream_graph_cycle(gog: GraphOfGroups, cycle, j: int) -> UpstreamGraph:
    """Variant based at the j-th corner of a closed edge path: both the
    arriving and the departing cycle edges are forbidden first steps."""
    cycle = tuple(cycle)
    if not cycle:
        raise DynamicsError("empty cycle")
    here = cycle[j % len(cycle)]
    after = cycle[(j + 1) % len(cycle)]
    root = gog.source(here)
    banned = {after, gog.reverse(here)}
    first = [f for f in gog.edges_into(root) if f not in banned]
    return UpstreamGraph(gog, root, first)


def _forced_toward_root(gog: GraphOfGroups, up: UpstreamGraph) -> bool:
    """Every edge whose traversal moves toward the root has an onto
    edge map, so root-bound coefficients admit no choice."""
    depth = up.depths()
    for d in up.edges:
        if depth[gog.source(d)] == depth[gog.range(d)] - 1:
            if not gog.alpha(d).is_surjective():
                return False
    return True


def is_treelike(gog: GraphOfGroups, e: str) -> bool:
    """The upstream graph of e is a tree whose root-bound edge maps are
    all onto.  A trivial upstream graph counts."""
    up = upstream_graph(gog, e)
    return up.is_tree and _forced_toward_root(gog, up)


def has_constant_tree(gog: GraphOfGroups, e: str) -> bool:
    """Treelike with a nontrivial upstream graph all of whose edge maps
    are onto, in both directions: the coefficients of any ray in it are
    completely forced, and whole vertex groups fix such rays."""
    up = upstream_graph(gog, e)
    if up.is_trivial or not up.is_tree or not _forced_toward_root(gog, up):
        return False
    return all(gog.alpha(d).is_surjective() for d in up.edges)


def constant_tree_edges(gog: GraphOfGroups) -> tuple[str, ...]:
    return tuple(e for e in gog.edge_names() if has_constant_tree(gog, e))


# -- shape recognizers ----------------------------------------------------

def lies_on_minimal_cycle(gog: GraphOfGroups, e: str) -> bool:
    """Loops count; otherwise e lies on an embedded cycle exactly when
    its endpoints stay connected without the edge pair."""
    if gog.range(e) == gog.source(e):
        return True
    banned = {e, gog.reverse(e)}
    target = gog.source(e)
    seen = {gog.range(e)}
    stack = [gog.range(e)]
    while stack:
        x = stack.pop()
        for d in gog.edges_into(x):
            if d in banned:
                continue
            y = gog.source(d)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return target in seen


def as_minimal_cycle(gog: GraphOfGroups) -> Optional[tuple[str, ...]]:
    """The whole graph as one embedded cycle, or None.

    Returned in path order starting from the smallest vertex along its
    smallest oriented edge; a single loop is a cycle of length one.
    """
    verts = gog.vertices
    if any(len(gog.edges_into(x)) != 2 for x in verts):
        return None
    if len(gog.oriented_edges()) != len(verts):
        return None
    start = min(verts)
    cycle = [min(gog.edges_into(start))]
    while gog.source(cycle[-1]) != start:
        if len(cycle) > len(verts):
            return None
        here = gog.source(cycle[-1])
        steps = [d for d in gog.edges_into(here)
                 if d != gog.reverse(cycle[-1])]
        if len(steps) != 1:
            return None
        cycle.append(steps[0])
    if len(cycle) != len(verts):
        return None
    return tuple(cycle)


def as_finite_ray(gog: GraphOfGroups) -> Optional[tuple[str, ...]]:
    """The whole graph as one embedded segment, or None.  Returned in
    path order from the smaller end vertex."""
    verts = gog.vertices
    if len(verts) < 2:
        return None
    degree = {x: len(gog.edges_into(x)) for x in verts}
    ends = sorted(x for x in verts if degree[x] == 1)
    if len(ends) != 2:
        return None
    if any(degree[x] != 2 for x in verts if x not in ends):
        return None
    if len(gog.oriented_edges()) != len(verts) - 1:
        return None
    ray = [gog.edges_into(ends[0])[0]]
    while gog.source(ray[-1]) != ends[1]:
        here = gog.source(ray[-1])
        steps = [d for d in gog.edges_into(here)
                 if d != gog.reverse(ray[-1])]
        if len(steps) != 1:
            return None
        ray.append(steps[0])
    return tuple(ray)


def _noncycle_witness(gog: GraphOfGroups) -> dict:
    """Concrete reason the graph is not one embedded cycle: a vertex of
    the wrong degree, or the edge count."""
    for x in gog.vertices:
        if len(gog.edges_into(x)) != 2:
            return {"off_cycle_vertex": x,
                    "degree": len(gog.edges_into(x))}
    return {"geometric_edges": len(gog.oriented_edges()),
            "vertices": len(gog.vertices)}


# -- verdicts and witness rays --------------------------------------------

@dataclass(frozen=True, eq=False)
class Verdict:
    """Three-valued answer with its justification.

    value True or False is decided and the witness holds the data
    behind it, concrete enough to recheck independently (JSON-ready
    strings, lists and integers only).  value None means undecided,
    and the reason names the hypothesis that failed.
    """

    value: Optional[bool]
    reason: str
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        raise DynamicsError("a Verdict can be undecided; test .value")

    @property
    def decided(self) -> bool:
        return self.value is not None

    def as_dict(self) -> dict:
        name = {True: "true", False: "false", None: "unknown"}[self.value]
        return {"value": name, "reason": self.reason,
                "witness": dict(self.witness)}


def _marker(gog: GraphOfGroups, d: str):
    """Group part for a constructed ray letter crossing d: the first
    nontrivial coset representative when there is one, else the
    identity.  Reversal seams in flow walks only occur where the coset
    space has at least two points, so the letter is always legal."""
    sig = gog.sigma(d)
    return sig[1] if len(sig) > 1 else sig[0]


def _ray_witness(gog: GraphOfGroups, prefix, period) -> dict:
    letters = lambda nodes: [[format_element(_marker(gog, d)), d]
                             for d in nodes]
    first = (tuple(prefix) + tuple(period))[0]
    return {"ray_base": gog.range(first),
            "ray_prefix": letters(prefix),
            "ray_period": letters(period)}


def _shortest_to(flow: FlowGraph, start: str, targets) -> Optional[tuple]:
    """BFS walk from start to the target set: (nodes strictly before
    the hit, hit).  start itself may be the hit."""
    if start in targets:
        return [], start
    parent = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for f in flow.arcs[x]:
            if f in parent:
                continue
            parent[f] = x
            if f in targets:
                back = [f]
                while parent[back[-1]] is not None:
                    back.append(parent[back[-1]])
                back.reverse()
                return back[:-1], f
            queue.append(f)
    return None


def _shortest_loop(flow: FlowGraph, c: str) -> list[str]:
    """Shortest closed walk through a node known to lie on a cycle."""
    parent: dict[str, Optional[str]] = {}
    queue: deque[str] = deque()
    for f in flow.arcs[c]:
        if f == c:
            return [c]
        if f not in parent:
            parent[f] = None
            queue.append(f)
    while queue:
        x = queue.popleft()
        for f in flow.arcs[x]:
            if f == c:
                walk = [x]
                while parent[walk[-1]] is not None:
                    walk.append(parent[walk[-1]])
                walk.reverse()
                return [c] + walk
            if f not in parent:
                parent[f] = x
                queue.append(f)
    raise DynamicsError(f"no directed cycle through {c!r}")


def _escaping_ray(gog: GraphOfGroups, flow: FlowGraph,
                  e: str) -> Optional[dict]:
    """An eventually periodic ray from r(e) that never crosses e,
    described by its flow-walk; None when every ray is forced into e."""
    sub = flow.without((e,))
    cyclic = sub.cyclic_nodes()
    for d in gog.edges_into(gog.range(e)):
        if d == e:
            continue
        hit = _shortest_to(sub, d, cyclic)
        if hit is None:
            continue
        prefix, c = hit
        return _ray_witness(gog, prefix, _shortest_loop(sub, c))
    return None


# -- minimality -----------------------------------------------------------

def is_minimal(subject: Subject) -> Verdict:
    """Whether every orbit in the boundary is dense.

    A boundary action fails to be minimal in exactly two ways.  Either
    the whole graph is an embedded cycle whose edge maps against the
    direction of travel are all onto, so the two periodic rays are
    invariant; or some edge e with onto reverse map lies on no embedded
    cycle, is treelike, and admits a ray from its range that escapes it
    forever, whose orbit closure then misses the cylinder over e.  The
    escaped cylinder must actually contain rays for that to obstruct
    anything, so edges with no infinite continuation are skipped; on a
    singular graph the dense set may simply never be asked to reach
    them.  The scan returns the first witness found, in sorted edge
    order.
    """
    if isinstance(subject, RaySpec):
        return Verdict(True, "ray actions are minimal: every orbit meets "
                             "every cylinder of the fiber",
                       {"prefix": list(subject.prefix),
                        "period": list(subject.period)})
    gog = subject
    flow = FlowGraph.of(gog)
    if not flow.cyclic_nodes():
        return Verdict(None, "the boundary is empty; minimality is vacuous",
                       {"boundary": "empty"})
    cycle = as_minimal_cycle(gog)
    if cycle is not None:
        backward = tuple(gog.reverse(d) for d in reversed(cycle))
        for run in (cycle, backward):
            if all(gog.alpha(gog.reverse(d)).is_surjective() for d in run):
                period = [gog.reverse(d) for d in reversed(run)]
                witness = {"condition": "surjective-cycle",
                           "cycle": list(run),
                           "avoided_edge": run[0],
                           **_ray_witness(gog, [], period)}
                return Verdict(False,
                               "the graph is a single embedded cycle and "
                               "every edge map against the traversal is "
                               "onto, so the backward periodic ray never "
                               "enters the cylinder over the forward "
                               "direction", witness)
    for e in sorted(gog.edge_names()):
        if not gog.alpha(gog.reverse(e)).is_surjective():
            continue
        if lies_on_minimal_cycle(gog, e):
            continue
        if not is_treelike(gog, e):
            continue
        if not flow.reaches_cycle(e):
            continue
        ray = _escaping_ray(gog, flow, e)
        if ray is not None:
            witness = {"condition": "treelike-escape",
                       "avoided_edge": e, **ray}
            return Verdict(False,
                           f"edge {e} has onto reverse map, lies on no "
                           f"embedded cycle and is treelike, yet a ray "
                           f"from {gog.range(e)} escapes it forever; its "
                           f"orbit closure misses the cylinder over "
                           f"{e}", witness)
    if not gog.is_nonsingular:
        return Verdict(None, "no obstruction found, but singular vertices "
                             "put the graph outside the decided cases",
                       {"singular_vertices": list(gog.singular_vertices())})
    return Verdict(True, "no obstruction: the graph is not an all-onto "
                         "cycle and no treelike edge can be escaped",
                   {"edges_checked": list(gog.edge_names())})


# -- local contractivity --------------------------------------------------

def is_locally_contractive(subject: Subject) -> Verdict:
    """Whether every cylinder is properly compressed into itself by
    some group element.

    Sufficient test: below every cylinder sits a repeatable loop of
    edges passing a vertex with at least three tree branches; pumping
    the loop past the branch point contracts.  When that fails, the
    boundary collapsing to two points is the only other possibility
    for a nonsingular finite graph, in one of two shapes recognized
    below.
    """
    if isinstance(subject, RaySpec):
        return Verdict(False, "a ray boundary is one fiber carrying an "
                              "odometer; no cylinder compresses into "
                              "itself",
                       {"prefix": list(subject.prefix),
                        "period": list(subject.period)})
    gog = subject
    flow = FlowGraph.of(gog)
    if not flow.cyclic_nodes():
        return Verdict(None, "the boundary is empty; contraction is "
                             "vacuous", {"boundary": "empty"})
    if gog.is_nonsingular:
        entrances: Optional[dict] = {}
        for e in flow.nodes:
            reach = flow.reachable_from(e)
            pick = None
            for comp in flow.cyclic_sccs():
                if not set(comp) & reach:
                    continue
                for d in comp:
                    v = vertex_valence(gog, gog.source(d))
                    if v is None or v >= 3:
                        pick = {"cycle_node": d,
                                "entrance_vertex": gog.source(d)}
                        break
                if pick:
                    break
            if pick is None:
                entrances = None
                break
            entrances[e] = pick
        if entrances is not None:
            return Verdict(True, "below every cylinder lies a repeatable "
                                 "loop through a vertex with at least "
                                 "three branches; pumping it contracts "
                                 "the cylinder", {"entrances": entrances})
    cycle = as_minimal_cycle(gog)
    if cycle is not None and all(gog.alpha(d).is_surjective()
                                 for d in gog.edge_names()):
        return Verdict(False, "every edge map is onto and the graph is one "
                              "embedded cycle, so the boundary is just the "
                              "two periodic rays", {"cycle": list(cycle)})
    ray = as_finite_ray(gog)
    if ray is not None:
        leafward = {ray[0], gog.reverse(ray[-1])}
        if all(gog.omega(d) == (2 if d in leafward else 1)
               for d in gog.edge_names()):
            return Verdict(False, "the graph is a segment with index two "
                                  "into each end and index one elsewhere; "
                                  "its boundary is two points",
                           {"segment": list(ray)})
    if not gog.is_nonsingular:
        return Verdict(None, "singular vertices put the graph outside the "
                             "decided cases",
                       {"singular_vertices": list(gog.singular_vertices())})
    return Verdict(None, "the repeatable-loop test fails but no two-point "
                         "boundary shape applies", {})


# -- unimodularity and pass-through ----------------------------------------

def is_unimodular(gog: GraphOfGroups) -> Verdict:
    """Whether every loop scales the infinite cyclic groups by one in
    absolute value.  The scale of a loop is the product of its edge
    index ratios; it only depends on the free homotopy class, so it
    suffices to check one crossing of each non-tree edge."""
    if not is_gbs(gog):
        raise DynamicsError("unimodularity needs infinite cyclic vertex "
                            "and edge groups throughout")
    tree = SpanningTree(gog, min(gog.vertices))
    ratios = {}
    culprit = None
    for e in gog.oriented_edges():
        if tree.contains(e):
            continue
        q = index_ratio(gog, epsilon_edge(gog, tree, e))
        ratios[e] = str(q)
        if q != 1 and culprit is None:
            culprit = e
    if culprit is not None:
        return Verdict(False, f"the loop crossing {culprit} scales by "
                              f"{ratios[culprit]}",
                       {"edge": culprit, "ratio": ratios[culprit],
                        "ratios": ratios})
    return Verdict(True, "every independent loop scales by one",
                   {"ratios": ratios})


def _pass_through_bound(gog: GraphOfGroups, base: str) -> int:
    """An integer that slides through every ray from the base without
    changing any coefficient, valid when every loop scales by one.

    The accumulated scale where a ray sits at y is then the tree-path
    scale to y up to sign, so clearing each edge index against that
    scale clears every crossing the ray will ever make.
    """
    tree = SpanningTree(gog, base)
    scale = {}
    for y in gog.vertices:
        edges = tree.path(base, y)
        scale[y] = (index_ratio(gog, path_word(gog, edges))
                    if edges else Fraction(1))
    bound = 1
    for e in gog.edge_names():
        w = gog.omega(e)
        if w is None:
            raise DynamicsError(f"edge {e} has infinite index")
        bound = lcm(bound, (scale[gog.range(e)] / w).denominator)
    return bound


# -- topological freeness and effectiveness --------------------------------

def is_topologically_free(subject: Subject) -> Verdict:
    """Whether the points with trivial isotropy are dense.

    Decided for three families: trivial vertex groups (only a cycle
    graph produces isotropy), infinite cyclic vertex and edge groups
    (scaling and constant trees tell the whole story on nonsingular
    graphs), and ray presets (freeness of the odometer).  Everything
    else is reported undecided.
    """
    if isinstance(subject, RaySpec):
        if subject.has_expanding_period:
            return Verdict(True, "indices above one recur forever, so the "
                                 "subgroup chain intersects to the "
                                 "identity and the odometer acts freely",
                           {"period": list(subject.period)})
        fix = 1
        for k in subject.prefix + subject.period:
            fix *= k
        return Verdict(False, "the indices are eventually one, so the "
                              "subgroup chain stabilizes and its "
                              "intersection fixes every point",
                       {"fixing_element": fix})
    gog = subject
    flow = FlowGraph.of(gog)
    if not flow.cyclic_nodes():
        return Verdict(None, "the boundary is empty",
                       {"boundary": "empty"})
    if is_trivial_groups(gog):
        if not gog.is_nonsingular:
            return Verdict(None, "singular vertices put the graph outside "
                                 "the decided cases",
                           {"singular_vertices":
                            list(gog.singular_vertices())})
        cycle = as_minimal_cycle(gog)
        if cycle is not None:
            return Verdict(False, "with trivial vertex groups the loop "
                                  "generator of a cycle graph fixes both "
                                  "boundary rays", {"cycle": list(cycle)})
        return Verdict(True, "with trivial vertex groups only a cycle "
                             "graph produces isotropy, and this graph is "
                             "not one", _noncycle_witness(gog))
    if is_gbs(gog):
        uni = is_unimodular(gog)
        if uni.value is True:
            base = min(gog.vertices)
            bound = _pass_through_bound(gog, base)
            return Verdict(False, "every loop scales by one, so one "
                                  "integer passes through every ray "
                                  "without touching its coefficients "
                                  "and fixes the whole boundary",
                           {"fixing_element": bound, "base": base,
                            "ratios": uni.witness["ratios"]})
        if not gog.is_nonsingular:
            return Verdict(None, "the graph scales nontrivially but has "
                                 "singular vertices; outside the decided "
                                 "cases",
                           {"singular_vertices":
                            list(gog.singular_vertices())})
        trees = constant_tree_edges(gog)
        if trees:
            return Verdict(False, f"a constant tree hangs upstream of "
                                  f"{trees[0]}: rays through it have "
                                  f"completely forced coefficients and a "
                                  f"whole cylinder of isotropy",
                           {"constant_tree_edges": list(trees)})
        return Verdict(True, "some loop scales nontrivially and no "
                             "constant tree exists, so denominators grow "
                             "without bound along some ray and isotropy "
                             "dies on a dense set",
                       {"scaling_edge": uni.witness["edge"],
                        "ratio": uni.witness["ratio"]})
    return Verdict(None, "vertex groups beyond the trivial and infinite "
                         "cyclic families are not decided here", {})


def is_effective(subject: Subject) -> Verdict:
    """Whether only the identity acts trivially on the boundary."""
    if isinstance(subject, RaySpec):
        free = is_topologically_free(subject)
        if free.value is True:
            return Verdict(True, "the subgroup chain intersects to the "
                                 "identity, so no element fixes the whole "
                                 "fiber", {"period": list(subject.period)})
        return Verdict(False, "the intersection of the subgroup chain "
                              "acts trivially on the fiber",
                       dict(free.witness))
    gog = subject
    flow = FlowGraph.of(gog)
    if not flow.cyclic_nodes():
        return Verdict(None, "the boundary is empty",
                       {"boundary": "empty"})
    if is_trivial_groups(gog):
        if not gog.is_nonsingular:
            return Verdict(None, "singular vertices put the graph outside "
                                 "the decided cases",
                           {"singular_vertices":
                            list(gog.singular_vertices())})
        cycle = as_minimal_cycle(gog)
        if cycle is not None:
            return Verdict(False, "the fundamental group of a cycle of "
                                  "trivial groups is generated by the "
                                  "loop, which fixes both boundary rays",
                           {"cycle": list(cycle)})
        return Verdict(True, "the action is topologically free, hence "
                             "effective", _noncycle_witness(gog))
    if is_gbs(gog):
        uni = is_unimodular(gog)
        if uni.value is True:
            base = min(gog.vertices)
            bound = _pass_through_bound(gog, base)
            return Verdict(False, "every loop scales by one, so one "
                                  "integer acts trivially on the whole "
                                  "boundary",
                           {"fixing_element": bound, "base": base})
        if not gog.is_nonsingular:
            return Verdict(None, "the graph scales nontrivially but has "
                                 "singular vertices; outside the decided "
                                 "cases",
                           {"singular_vertices":
                            list(gog.singular_vertices())})
        trees = constant_tree_edges(gog)
        if trees:
            return Verdict(None, "a constant tree creates pointwise "
                                 "isotropy; whether one element fixes "
                                 "everything is not decided here",
                           {"constant_tree_edges": list(trees)})
        return Verdict(True, "the action is topologically free, hence "
                             "effective",
                       {"scaling_edge": uni.witness["edge"]})
    return Verdict(None, "vertex groups beyond the trivial and infinite "
                         "cyclic families are not decided here", {})


def classify_min_lc_trichotomy(subject: Subject) -> str:
    """Which regime a minimal action is in: 'locally_contractive',
    'infinite_ray_case' (odometer over an infinite ray), or
    'finite_ray_case' (two-point boundary over a segment)."""
    if isinstance(subject, RaySpec):
        return "infinite_ray_case"
    minimal = is_minimal(subject)
    if minimal.value is not True:
        raise DynamicsError(f"the trichotomy assumes a minimal action "
                            f"({minimal.reason})")
    contractive = is_locally_contractive(subject)
    if contractive.value is True:
        return "locally_contractive"
    if contractive.value is False and "segment" in contractive.witness:
        return "finite_ray_case"
    raise DynamicsError("minimal but neither contracting nor a recognized "
                        "two-point shape; undecided")
