"""Exact arithmetic, indices, transversals, coset decompositions."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from gogtool.abelian import (
    AbelianError,
    AbHom,
    FgAbelianGroup,
    ab_op,
    coset_decompose,
    format_element,
    format_group,
    hom_apply,
    parse_element_literal,
    parse_group_spec,
    subgroup_index,
    transversal,
)

import oracles

Z = FgAbelianGroup(1)
Z2 = FgAbelianGroup(2)
Z2Z2 = FgAbelianGroup(0, (2, 2))
Z3 = FgAbelianGroup(0, (3,))
Z3Z3 = FgAbelianGroup(0, (3, 3))
TRIVIAL = FgAbelianGroup(0)

TIMES3 = AbHom(Z, Z, ((3,),))
TIMES_MINUS3 = AbHom(Z, Z, ((-3,),))
Z3_DIAG = AbHom(Z3, Z3Z3, ((1,), (0,)))
Z2_FIRST = AbHom(FgAbelianGroup(0, (2,)), Z2Z2, ((1,), (0,)))


class TestGroupBasics:
    def test_canonicalization(self):
        g = Z3Z3.element((4, -1))
        assert g.coords == (1, 2)

    def test_add_neg(self):
        a = Z3Z3.element((1, 2))
        b = Z3Z3.element((2, 2))
        assert (a + b).coords == (0, 1)
        assert (-a).coords == (2, 1)
        assert ab_op("sub", a, b).coords == (2, 0)

    def test_mixed_group_rejected(self):
        with pytest.raises(AbelianError):
            Z3Z3.element((1, 2)) + Z3.element((1,))

    def test_free_coordinates_not_reduced(self):
        g = Z2.element((-5, 7))
        assert g.coords == (-5, 7)

    def test_identity_and_generators(self):
        grp = FgAbelianGroup(1, (4,))
        assert grp.identity().coords == (0, 0)
        gens = grp.generators()
        assert [g.coords for g in gens] == [(1, 0), (0, 1)]

    def test_wrong_arity(self):
        with pytest.raises(AbelianError):
            Z.element((1, 2))


class TestHoms:
    def test_apply(self):
        assert TIMES3.apply(Z.element((5,))).coords == (15,)
        assert Z3_DIAG.apply(Z3.element((2,))).coords == (2, 0)

    def test_well_definedness_rejected(self):
        # Z/2 -> Z sending the generator to 1 is not a homomorphism
        with pytest.raises(AbelianError):
            AbHom(FgAbelianGroup(0, (2,)), Z, ((1,),))
        # Z/4 -> Z/3 by 1 is not well defined either
        with pytest.raises(AbelianError):
            AbHom(FgAbelianGroup(0, (4,)), Z3, ((1,),))

    def test_torsion_to_torsion_ok(self):
        h = AbHom(FgAbelianGroup(0, (4,)), FgAbelianGroup(0, (2,)), ((1,),))
        assert h.apply(h.source.element((3,))).coords == (1,)

    def test_injectivity(self):
        assert TIMES3.is_injective()
        assert Z3_DIAG.is_injective()
        zero = AbHom(Z, Z, ((0,),))
        assert not zero.is_injective()
        assert not zero.kernel_witness().is_identity()
        fold = AbHom(Z2, Z, ((1, 2),))
        assert not fold.is_injective()
        w = fold.kernel_witness()
        assert fold.apply(w).is_identity() and not w.is_identity()
        quot = AbHom(FgAbelianGroup(0, (4,)), FgAbelianGroup(0, (2,)), ((1,),))
        assert not quot.is_injective()

    def test_surjectivity(self):
        assert AbHom(Z, Z, ((1,),)).is_surjective()
        assert AbHom(Z, Z, ((-1,),)).is_surjective()
        assert not TIMES3.is_surjective()


class TestIndexAndTransversal:
    def test_frozen_indices(self):
        assert subgroup_index(TIMES3) == oracles.FROZEN["index_z_times_3"]
        assert subgroup_index(Z3_DIAG) == oracles.FROZEN["index_z3_into_z3z3"]
        assert subgroup_index(Z2_FIRST) == oracles.FROZEN["index_z2z2_mod_first"]

    def test_frozen_transversals(self):
        assert tuple(t.coords for t in transversal(TIMES3)) == \
            oracles.FROZEN["transversal_z_times_3"]
        assert tuple(t.coords for t in transversal(Z3_DIAG)) == \
            oracles.FROZEN["transversal_z3_into_z3z3"]
        assert tuple(t.coords for t in transversal(Z2_FIRST)) == \
            oracles.FROZEN["transversal_z2z2_mod_first"]

    def test_negative_multiplier_same_box(self):
        assert subgroup_index(TIMES_MINUS3) == 3
        assert tuple(t.coords for t in transversal(TIMES_MINUS3)) == \
            oracles.FROZEN["transversal_z_times_3"]

    def test_infinite_index(self):
        line = AbHom(Z, Z2, ((2,), (3,)))
        assert subgroup_index(line) is None
        with pytest.raises(AbelianError):
            transversal(line)
        # trivial group into Z: infinite index as well
        assert subgroup_index(AbHom(TRIVIAL, Z, ((),))) is None

    def test_trivial_into_trivial(self):
        h = AbHom(TRIVIAL, TRIVIAL, ())
        assert subgroup_index(h) == 1
        assert len(transversal(h)) == 1
        assert transversal(h)[0].is_identity()

    def test_identity_is_first_representative(self):
        for hom in (TIMES3, Z3_DIAG, Z2_FIRST):
            assert transversal(hom)[0].is_identity()

    def test_against_sympy(self):
        homs = [
            TIMES3,
            TIMES_MINUS3,
            Z3_DIAG,
            Z2_FIRST,
            AbHom(Z2, Z2, ((2, 1), (0, 3))),
            AbHom(Z, Z2, ((2,), (3,))),
            AbHom(Z2, Z, ((4, 6),)),
        ]
        for hom in homs:
            assert subgroup_index(hom) == oracles.sympy_index(hom)

    def test_against_brute_force_finite(self):
        homs = [
            Z3_DIAG,
            Z2_FIRST,
            AbHom(Z3Z3, Z3Z3, ((1, 0), (1, 1))),
            AbHom(FgAbelianGroup(0, (2,)), FgAbelianGroup(0, (4,)), ((2,),)),
            AbHom(FgAbelianGroup(0, (6,)), FgAbelianGroup(0, (6,)), ((2,),)),
        ]
        for hom in homs:
            assert subgroup_index(hom) == oracles.brute_index(hom)
            reps = transversal(hom)
            cosets = oracles.brute_cosets(hom)
            assert len(reps) == len(cosets)
            # each coset hit exactly once
            hit = [frozenset(r + i for i in oracles.image_set(hom))
                   for r in reps]
            assert set(hit) == set(cosets)
            assert len(set(hit)) == len(hit)


class TestCosetDecompose:
    def test_frozen(self):
        t, h = coset_decompose(TIMES3, Z.element((5,)))
        assert (t.coords, h.coords) == oracles.FROZEN["decompose_5_mod_3"]
        t, h = coset_decompose(TIMES_MINUS3, Z.element((5,)))
        assert (t.coords, h.coords) == oracles.FROZEN["decompose_5_mod_minus_3"]

    def test_reconstruction(self):
        cases = [
            (TIMES3, Z.element((-7,))),
            (Z3_DIAG, Z3Z3.element((2, 1))),
            (Z2_FIRST, Z2Z2.element((1, 1))),
        ]
        for hom, g in cases:
            t, h = coset_decompose(hom, g)
            assert t + hom.apply(h) == g
            assert t in transversal(hom)

    def test_representatives_decompose_to_themselves(self):
        for hom in (TIMES3, Z3_DIAG, Z2_FIRST):
            for t in transversal(hom):
                t2, h = coset_decompose(hom, t)
                assert t2 == t
                assert hom.apply(h).is_identity()

    def test_same_coset_same_representative(self):
        g = Z3Z3.element((2, 1))
        shifted = g + Z3_DIAG.apply(Z3.element((2,)))
        t1, _ = coset_decompose(Z3_DIAG, g)
        t2, _ = coset_decompose(Z3_DIAG, shifted)
        assert t1 == t2


# ---------------------------------------------------------------------------
# property tests

small_torsion = st.lists(st.sampled_from([2, 3, 4]), min_size=0, max_size=2)


@st.composite
def finite_group(draw):
    tors = draw(st.lists(st.sampled_from([2, 3, 4, 6]), min_size=1, max_size=2))
    return FgAbelianGroup(0, tuple(tors))


@st.composite
def finite_hom(draw):
    src = draw(finite_group())
    tgt = draw(finite_group())
    cols = []
    for t in src.torsion:
        # image of an order-t generator must be killed by t
        candidates = [g for g in tgt.elements()
                      if g.scale(t).is_identity()]
        g = draw(st.sampled_from(candidates))
        cols.append(g.coords)
    matrix = tuple(tuple(col[i] for col in cols)
                   for i in range(tgt.ngens))
    return AbHom(src, tgt, matrix)


@given(finite_hom(), st.data())
@settings(max_examples=60, deadline=None)
def test_decompose_roundtrip_property(hom, data):
    coords = tuple(
        data.draw(st.integers(min_value=-10, max_value=10))
        for _ in range(hom.target.ngens))
    g = hom.target.element(coords)
    t, h = coset_decompose(hom, g)
    assert t + hom.apply(h) == g
    assert t in transversal(hom)
    # canonical representative is a function of the coset
    shift = data.draw(st.sampled_from(sorted(
        oracles.image_set(hom), key=lambda e: e.coords)))
    t2, _ = coset_decompose(hom, g + shift)
    assert t2 == t


@given(st.integers(min_value=-50, max_value=50),
       st.integers(min_value=2, max_value=9))
@settings(max_examples=80, deadline=None)
def test_z_box_matches_mod(g, w):
    hom = AbHom(Z, Z, ((w,),))
    t, h = coset_decompose(hom, Z.element((g,)))
    assert t.coords[0] == g % w
    assert t.coords[0] + w * h.coords[0] == g


@given(finite_hom())
@settings(max_examples=40, deadline=None)
def test_transversal_partitions_target(hom):
    reps = transversal(hom)
    img = oracles.image_set(hom)
    covered = set()
    for r in reps:
        coset = {r + i for i in img}
        assert not (covered & coset)
        covered |= coset
    assert covered == set(oracles.all_elements(hom.target))


class TestParsing:
    def test_group_specs(self):
        assert parse_group_spec("1") == TRIVIAL
        assert parse_group_spec("Z") == Z
        assert parse_group_spec("Z^2") == Z2
        assert parse_group_spec("Z/3 + Z/3") == Z3Z3
        assert parse_group_spec("Z^2 + Z/4") == FgAbelianGroup(2, (4,))
        assert parse_group_spec(" Z  +  Z/2 ") == FgAbelianGroup(1, (2,))

    def test_group_spec_errors(self):
        for bad in ("", "Z/1", "Z^0", "Q", "Z/", "1 + Z"):
            with pytest.raises(AbelianError):
                parse_group_spec(bad)

    def test_roundtrip(self):
        for spec in ("1", "Z", "Z^3", "Z/2", "Z + Z/2", "Z^2 + Z/3 + Z/4"):
            assert format_group(parse_group_spec(spec)) == spec

    def test_elements(self):
        assert parse_element_literal(Z2, "(1, -2)").coords == (1, -2)
        assert parse_element_literal(TRIVIAL, "()").coords == ()
        assert format_element(Z3Z3.element((4, 1))) == "(1,1)"
        with pytest.raises(AbelianError):
            parse_element_literal(Z, "1")
        with pytest.raises(AbelianError):
            parse_element_literal(Z, "(1,2)")
