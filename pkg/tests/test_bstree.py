"""Tree slices, cylinder sets, and the boundary action.

The action tests triangulate three routes: the recursive image
computation in the package, a blunt refine-everything oracle, and the
literal closed forms for how each standard generator moves a cylinder.
"""

import random

import pytest

from gogtool.bstree import (BstreeError, Cylinder, CylinderSet,
                            LookaheadError, act_on_cylinder,
                            act_on_cylinder_set, act_on_path, children,
                            count_paths, descend, enumerate_paths,
                            group_ball, isotropy_candidates, tree_dot,
                            tree_valences)
from gogtool.gog import SpanningTree
from gogtool.words import (ReducedGWord, concat, epsilon_edge,
                           epsilon_generators, epsilon_group, format_word,
                           group_word, invert, parse_word_literal, path_word,
                           trivial_path)

import oracles


def setup_doc(load_fixture, name):
    doc = load_fixture(name)
    return doc.gog, doc.base, SpanningTree(doc.gog, doc.base)


class TestEnumeration:
    def test_slice_sizes(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "edge23")
        assert [len(enumerate_paths(g, v, n)) for n in range(6)] == \
            [1, 2, 4, 4, 8, 8]
        g, v, _ = setup_doc(load_fixture, "bs23")
        assert [len(enumerate_paths(g, v, n)) for n in range(4)] == \
            [1, 5, 20, 80]
        g, v, _ = setup_doc(load_fixture, "fig8")
        assert [len(enumerate_paths(g, v, n)) for n in range(4)] == \
            [1, 4, 12, 36]

    @pytest.mark.parametrize("name", ["edge23", "bs23", "fig8", "theta",
                                      "klein4", "mincycle_surj"])
    def test_counting_matches_enumeration(self, load_fixture, name):
        g, v, _ = setup_doc(load_fixture, name)
        for x in g.vertices:
            for n in range(4):
                assert count_paths(g, x, n) == len(enumerate_paths(g, x, n))

    @pytest.mark.parametrize("name", ["edge23", "bs23", "klein4"])
    def test_slices_are_reduced_and_distinct(self, load_fixture, name):
        g, v, _ = setup_doc(load_fixture, name)
        paths = enumerate_paths(g, v, 3)
        assert len(set(paths)) == len(paths)
        for p in paths:
            assert p.is_reduced() and p.tail is None and len(p) == 3

    def test_deterministic_order(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "bs23")
        assert enumerate_paths(g, v, 3) == enumerate_paths(g, v, 3)

    def test_child_count(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "bs23")
        for p in enumerate_paths(g, v, 2):
            total = sum(len(g.sigma(f))
                        for f in g.edges_into(p.source_vertex))
            assert len(children(g, p)) == total - 1

    def test_oracle_extensions_agree(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "klein4")
        for p in enumerate_paths(g, v, 2):
            ours = {c.pairs for c in children(g, p)}
            theirs = set(oracles.admissible_extensions(g, v, p.pairs))
            assert ours == theirs


class TestValences:
    def test_biregular_alternation(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "edge23")
        levels = tree_valences(g, v, 6)
        for d, hist in enumerate(levels):
            assert set(hist) == ({2} if d % 2 == 0 else {3})

    def test_loop_regular(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "bs23")
        for hist in tree_valences(g, v, 6):
            assert set(hist) == {5}

    def test_free_group_regular(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "fig8")
        for hist in tree_valences(g, v, 5):
            assert set(hist) == {4}

    @pytest.mark.parametrize("name", ["edge23", "bs23", "theta", "klein4"])
    def test_histogram_matches_enumeration(self, load_fixture, name):
        g, v, _ = setup_doc(load_fixture, name)
        levels = tree_valences(g, v, 3)
        for d in range(4):
            hist = {}
            for p in enumerate_paths(g, v, d):
                val = len(children(g, p)) + (1 if d else 0)
                hist[val] = hist.get(val, 0) + 1
            assert hist == levels[d]


class TestCylinderSet:
    def test_flip_to_smaller_side(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "bs23")
        slice1 = enumerate_paths(g, v, 1)
        cs = CylinderSet(g, v, 1, slice1[:4])
        assert cs.complement and len(cs.members) == 1

    def test_full_and_empty(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "bs23")
        assert CylinderSet.full(g, v).is_full()
        assert CylinderSet.empty(g, v).is_empty()
        everything = CylinderSet(g, v, 1, enumerate_paths(g, v, 1))
        assert everything == CylinderSet.full(g, v)

    def test_equality_across_depths(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "edge23")
        base = parse_word_literal(g, v, "(1) e")
        shallow = Cylinder(g, base).as_set()
        deep = CylinderSet.from_paths(g, v, descend(g, base, 3))
        assert shallow == deep and hash(shallow) == hash(deep)

    def test_complement_resolution(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "bs23")
        one = enumerate_paths(g, v, 1)[0]
        cs = CylinderSet(g, v, 1, [one], complement=True)
        assert cs.resolve() == frozenset(enumerate_paths(g, v, 1)) - {one}
        assert not cs.intersects(Cylinder(g, one).as_set())
        assert cs.intersects(CylinderSet.full(g, v))

    def test_union(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "edge23")
        kids = children(g, trivial_path(g, v))
        parts = [Cylinder(g, k).as_set() for k in kids]
        assert CylinderSet.union(g, v, parts) == CylinderSet.full(g, v)

    def test_tail_rejected(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "bs23")
        w = group_word(g, v, g.vertex_group(v).element((1,)))
        with pytest.raises(BstreeError, match="path shape"):
            Cylinder(g, w)


class TestActOnPath:
    def test_identity_fixes_everything(self, load_fixture):
        g, v, tree = setup_doc(load_fixture, "bs23")
        ident = group_word(g, v, g.vertex_group(v).identity())
        for mu in enumerate_paths(g, v, 2):
            assert act_on_path(g, ident, mu, trivial_path(
                g, mu.source_vertex)) == mu

    def test_group_element_passes_through(self, load_fixture):
        # a torsion element conjugates through both crossings unchanged
        g, v, tree = setup_doc(load_fixture, "klein4")
        gamma = epsilon_group(g, tree, v, g.vertex_group(v).element((0, 1)))
        mu = parse_word_literal(g, v, "(1,0) ~e (0,1) e")
        assert act_on_path(g, gamma, mu,
                           trivial_path(g, mu.source_vertex)) == mu

    def test_insufficient_lookahead_raises(self, load_fixture):
        g, v, tree = setup_doc(load_fixture, "bs23")
        gamma = epsilon_edge(g, tree, "e")
        mu = parse_word_literal(g, v, "(0) ~e")
        with pytest.raises(LookaheadError):
            act_on_path(g, gamma, mu, trivial_path(g, mu.source_vertex))

    def test_generator_bound_suffices(self, load_fixture):
        g, v, tree = setup_doc(load_fixture, "bs23")
        rng = random.Random(7)
        ball = group_ball(g, tree, 2)
        paths = enumerate_paths(g, v, 2)
        for _ in range(40):
            gamma = rng.choice(ball)
            mu = rng.choice(paths)
            lookaheads = descend(g, trivial_path(g, mu.source_vertex),
                                 len(gamma))
            picked = [l for l in lookaheads
                      if not (l.pairs and mu.pairs
                              and l.pairs[0][1] == g.reverse(mu.pairs[-1][1])
                              and l.pairs[0][0].is_identity())]
            for look in picked[:5]:
                out = act_on_path(g, gamma, mu, look)
                assert len(out) == len(mu) and out.is_reduced()

    def test_answers_stable_under_refinement(self, load_fixture):
        # once a lookahead suffices, every deeper one returns the same
        # prefix; siblings may disagree, extensions never do
        g, v, tree = setup_doc(load_fixture, "edge23")
        gamma = concat(g, epsilon_group(
            g, tree, "y", g.vertex_group("y").element((2,))),
            epsilon_group(g, tree, "x", g.vertex_group("x").element((1,))))
        resolved = 0
        for mu in enumerate_paths(g, v, 2):
            for look in descend(g, trivial_path(g, mu.source_vertex), 1):
                if look.pairs[0][1] == g.reverse(mu.pairs[-1][1]) \
                        and look.pairs[0][0].is_identity():
                    continue
                try:
                    answer = act_on_path(g, gamma, mu, look)
                except LookaheadError:
                    continue
                resolved += 1
                for deeper in descend(g, look, 3):
                    assert act_on_path(g, gamma, mu, deeper) == answer
        assert resolved > 0


class TestActOnCylinder:
    @pytest.mark.parametrize("name", ["edge23", "bs23", "fig8", "klein4"])
    def test_matches_blunt_refinement(self, load_fixture, name):
        g, v, tree = setup_doc(load_fixture, name)
        rng = random.Random(13)
        ball = group_ball(g, tree, 2)
        bases = [trivial_path(g, v)] + list(enumerate_paths(g, v, 1)) \
            + list(enumerate_paths(g, v, 2))
        for _ in range(25):
            gamma = rng.choice(ball)
            base = rng.choice(bases)
            got = act_on_cylinder(g, gamma, Cylinder(g, base))
            depth, expected = oracles.brute_cylinder_paths(g, gamma, base)
            common = max(depth, got.depth)
            ours = {p.pairs for p in got.at_depth(common).resolve()}
            theirs = oracles.deepen_pairs(g, v, expected, common)
            assert ours == theirs

    def test_homomorphism_property(self, load_fixture):
        g, v, tree = setup_doc(load_fixture, "bs23")
        rng = random.Random(5)
        ball = group_ball(g, tree, 2)
        bases = enumerate_paths(g, v, 2)
        for _ in range(15):
            g1, g2 = rng.choice(ball), rng.choice(ball)
            z = Cylinder(g, rng.choice(bases))
            lhs = act_on_cylinder_set(g, g1, act_on_cylinder(g, g2, z))
            rhs = act_on_cylinder(g, concat(g, g1, g2), z)
            assert lhs == rhs

    def test_inverse_undoes(self, load_fixture):
        g, v, tree = setup_doc(load_fixture, "edge23")
        gamma = concat(g, epsilon_group(
            g, tree, "y", g.vertex_group("y").element((1,))),
            epsilon_group(g, tree, "x", g.vertex_group("x").element((2,))))
        for base in enumerate_paths(g, v, 2):
            z = Cylinder(g, base)
            assert act_on_cylinder_set(
                g, invert(g, gamma), act_on_cylinder(g, gamma, z)) == z.as_set()

    def test_children_partition_image(self, load_fixture):
        g, v, tree = setup_doc(load_fixture, "bs23")
        gamma = epsilon_edge(g, tree, "e")
        base = parse_word_literal(g, v, "(1) e")
        kid_images = [act_on_cylinder(g, gamma, Cylinder(g, k))
                      for k in children(g, base)]
        for i in range(len(kid_images)):
            for j in range(i + 1, len(kid_images)):
                assert not kid_images[i].intersects(kid_images[j])
        whole = act_on_cylinder(g, gamma, Cylinder(g, base))
        assert CylinderSet.union(g, v, kid_images) == whole

    def test_translates_partition_fiber(self, load_fixture):
        # orbit of a cylinder under coset representatives tiles the fiber
        g, v, tree = setup_doc(load_fixture, "bs23")
        parts = [act_on_cylinder(g, w, Cylinder(g, trivial_path(g, v)))
                 for w in group_ball(g, tree, 0)]
        assert CylinderSet.union(g, v, parts) == CylinderSet.full(g, v)


class TestActionClauses:
    """The closed forms for the standard generators, checked literally
    wherever their hypotheses hold."""

    FIXTURES = ["edge23", "bs23", "fig8", "klein4", "theta", "mincycle_surj"]

    @pytest.mark.parametrize("name", FIXTURES)
    def test_group_generator_deep(self, load_fixture, name):
        g, v, tree = setup_doc(load_fixture, name)
        checked = 0
        for x in g.vertices:
            tp = oracles.tree_path_pairs(g, tree, x)
            refinements = [p for d in (1, 2)
                           for p in descend(
                               g, ReducedGWord(g, v, tp), len(tp) + d)]
            for elt in oracles.small_elements(g.vertex_group(x), span=2,
                                              cap=8):
                gamma = epsilon_group(g, tree, x, elt)
                for ref in refinements[:12]:
                    mu_pairs = ref.pairs[len(tp):]
                    expected = oracles.clause_group_deep(
                        g, tree, x, elt, mu_pairs)
                    if expected is None:
                        continue
                    got = act_on_cylinder(g, gamma, Cylinder(g, ref))
                    assert got == expected
                    checked += 1
        assert checked > 0

    @pytest.mark.parametrize("name", FIXTURES)
    def test_group_generator_shallow(self, load_fixture, name):
        g, v, tree = setup_doc(load_fixture, name)
        for x in g.vertices:
            base = ReducedGWord(g, v, oracles.tree_path_pairs(g, tree, x))
            for elt in oracles.small_elements(g.vertex_group(x), span=2,
                                              cap=8):
                gamma = epsilon_group(g, tree, x, elt)
                got = act_on_cylinder(g, gamma, Cylinder(g, base))
                assert got == oracles.clause_group_shallow(g, tree, x, elt)

    @pytest.mark.parametrize("name", FIXTURES)
    def test_edge_generator_deep(self, load_fixture, name):
        g, v, tree = setup_doc(load_fixture, name)
        checked = 0
        for e in g.edge_names():
            gamma = epsilon_edge(g, tree, e)
            tp = oracles.tree_path_pairs(g, tree, g.source(e))
            refinements = [p for d in (1, 2)
                           for p in descend(
                               g, ReducedGWord(g, v, tp), len(tp) + d)]
            for ref in refinements[:12]:
                mu_pairs = ref.pairs[len(tp):]
                expected = oracles.clause_edge_deep(g, tree, e, mu_pairs)
                if expected is None:
                    continue
                got = act_on_cylinder(g, gamma, Cylinder(g, ref))
                assert got == expected
                checked += 1
        assert checked > 0

    @pytest.mark.parametrize("name", FIXTURES)
    def test_edge_generator_backtrack(self, load_fixture, name):
        g, v, tree = setup_doc(load_fixture, name)
        for e in g.edge_names():
            gamma = epsilon_edge(g, tree, e)
            back = concat(
                g, ReducedGWord(g, v,
                                oracles.tree_path_pairs(g, tree,
                                                        g.source(e))),
                path_word(g, [g.reverse(e)]))
            base = ReducedGWord(g, v, back.pairs)
            got = act_on_cylinder(g, gamma, Cylinder(g, base))
            assert got == oracles.clause_edge_backtrack(g, tree, e)

    @pytest.mark.parametrize("name", FIXTURES)
    def test_edge_generator_shallow(self, load_fixture, name):
        g, v, tree = setup_doc(load_fixture, name)
        for e in g.edge_names():
            gamma = epsilon_edge(g, tree, e)
            base = ReducedGWord(
                g, v, oracles.tree_path_pairs(g, tree, g.source(e)))
            got = act_on_cylinder(g, gamma, Cylinder(g, base))
            assert got == oracles.clause_edge_shallow(g, tree, e)

    def test_merge_into_tree_path_breaks_naive_form(self, load_fixture):
        # On the (2,3) edge of groups, conjugating 2 at the far vertex
        # cancels into the tree path: the image of Z((0) e (1) ~e) is
        # the strictly deeper-looking cylinder Z((1) e), not the whole
        # fiber that a merge-and-reduce reading of the closed form
        # would predict.
        g, v, tree = setup_doc(load_fixture, "edge23")
        elt = g.vertex_group("y").element((2,))
        gamma = epsilon_group(g, tree, "y", elt)
        base = parse_word_literal(g, v, "(0) e (1) ~e")
        assert oracles.clause_group_deep(
            g, tree, "y", elt, base.pairs[1:]) is None
        got = act_on_cylinder(g, gamma, Cylinder(g, base))
        expected = Cylinder(g, parse_word_literal(g, v, "(1) e")).as_set()
        assert got == expected
        assert got != CylinderSet.full(g, v)

    def test_hypothesis_filter_is_not_vacuous(self, load_fixture):
        g, v, tree = setup_doc(load_fixture, "edge23")
        skipped = 0
        for x in g.vertices:
            tp = oracles.tree_path_pairs(g, tree, x)
            for elt in oracles.small_elements(g.vertex_group(x), span=3,
                                              cap=10):
                for ref in descend(g, ReducedGWord(g, v, tp), len(tp) + 2):
                    if oracles.clause_group_deep(
                            g, tree, x, elt, ref.pairs[len(tp):]) is None:
                        skipped += 1
        assert skipped > 0


class TestIsotropy:
    def test_free_group_aperiodic_prefix(self, load_fixture):
        g, v, tree = setup_doc(load_fixture, "fig8")
        prefix = path_word(g, ["e", "e", "f", "e", "f"])
        cands = isotropy_candidates(g, tree, prefix, 2)
        assert len(cands) == 1 and len(cands[0]) == 0
        assert cands[0].tail.is_identity()

    def test_unimodular_loop_keeps_global_stabilizer(self, load_fixture):
        g, v, tree = setup_doc(load_fixture, "bs22")
        prefix = parse_word_literal(g, v, "(1) e")
        cands = isotropy_candidates(g, tree, prefix, 2)
        two = group_word(g, v, g.vertex_group(v).element((2,)))
        assert two in cands

    def test_deterministic(self, load_fixture):
        g, v, tree = setup_doc(load_fixture, "bs22")
        prefix = parse_word_literal(g, v, "(1) e")
        assert isotropy_candidates(g, tree, prefix, 2) == \
            isotropy_candidates(g, tree, prefix, 2)


class TestDot:
    def test_structure_and_determinism(self, load_fixture):
        g, v, _ = setup_doc(load_fixture, "edge23")
        out = tree_dot(g, v, 2)
        assert out == tree_dot(g, v, 2)
        assert out.startswith("digraph bstree {")
        node_lines = [l for l in out.splitlines() if "[label=" in l
                      and "->" not in l]
        assert len(node_lines) == 1 + 2 + 4
        arrow_lines = [l for l in out.splitlines() if "->" in l]
        assert len(arrow_lines) == 2 + 4
        assert '"1" [label="x"];' in out
