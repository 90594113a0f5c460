"""
Tests for the finite-set and relation kernels.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relconv.core.exceptions import CarrierError, RelationArityError
from relconv.core.relation import (
    FiniteSet,
    Relation,
    classes_of,
    compose,
    dagger,
    full,
    graph,
    identity,
    image,
    is_equivalence,
    product,
    restrict,
    subset,
    symmetric_difference_witness,
)

ABC = FiniteSet(["a", "b", "c"], name="ABC")


def rel(pairs):
    return Relation((ABC,), (ABC,), frozenset(pairs))


def _compose_reference(r, s):
    return {(a, c) for a, b in r.tuples for b2, c in s.tuples if b == b2}


@st.composite
def relations_on(draw, count, carriers=1):
    """`count` binary relations per drawn carrier, carriers of 1 to 6 points."""
    drawn = []
    for _ in range(carriers):
        n = draw(st.integers(1, 6))
        points = FiniteSet([f"p{i}" for i in range(n)], name=f"P{n}")
        index = st.integers(0, n - 1)
        tuples = st.frozensets(st.tuples(index, index), max_size=n * n)
        drawn.append((points, [Relation((points,), (points,), draw(tuples)) for _ in range(count)]))
    return drawn[0] if carriers == 1 else drawn


class TestFiniteSet:
    """Tests for FiniteSet."""

    def test_index_and_label(self):
        """Labels and indices are inverse to each other."""
        assert ABC.index("b") == 1
        assert ABC.label(2) == "c"
        assert len(ABC) == 3
        assert list(ABC) == [0, 1, 2]

    def test_duplicate_label(self):
        """Duplicate labels are rejected."""
        with pytest.raises(CarrierError):
            FiniteSet(["x", "x"])

    def test_unknown_label(self):
        """Unknown labels raise CarrierError."""
        with pytest.raises(CarrierError):
            ABC.index("z")

    def test_size_cap(self):
        """The size cap is enforced."""
        with pytest.raises(CarrierError):
            FiniteSet([str(i) for i in range(5)], limit=4)

    def test_equality_ignores_name(self):
        """Carriers compare by their labels."""
        assert FiniteSet(["a", "b", "c"]) == ABC


class TestRelation:
    """Tests for Relation construction."""

    def test_out_of_range_index(self):
        """Indices must lie in their factor."""
        with pytest.raises(RelationArityError):
            rel([(0, 3)])

    def test_wrong_width(self):
        """Tuples must have one component per factor."""
        with pytest.raises(RelationArityError):
            Relation((ABC,), (ABC,), frozenset({(0, 1, 2)}))

    def test_successors_and_function(self):
        """successors groups codomain tuples by domain tuple."""
        r = graph(ABC, ABC, [1, 2, 0])
        assert r.successors[(0,)] == ((1,),)
        assert r.is_function()
        assert r.as_function() == {(0,): (1,), (1,): (2,), (2,): (0,)}
        assert not rel([(0, 1)]).is_function()

    def test_labelled(self):
        """labelled translates indices to labels."""
        assert rel([(0, 2)]).labelled((0, 2)) == ("a", "c")


class TestAlgebra:
    """Tests for composition, converse and products."""

    def test_identity_is_neutral(self):
        """id∘r = r = r∘id."""
        r = rel([(0, 1), (1, 2)])
        assert compose(identity(ABC), r) == r
        assert compose(r, identity(ABC)) == r

    def test_compose_order(self):
        """compose(r, s) applies r first."""
        r = rel([(0, 1)])
        s = rel([(1, 2)])
        assert compose(r, s).tuples == frozenset({(0, 2)})
        assert compose(s, r).tuples == frozenset()

    def test_compose_carrier_mismatch(self):
        """Factors must agree."""
        other = FiniteSet(["x", "y"])
        with pytest.raises(RelationArityError):
            compose(rel([(0, 1)]), Relation((other,), (other,), frozenset()))

    def test_dagger(self):
        """The converse reverses tuples."""
        assert dagger(rel([(0, 1), (2, 2)])).tuples == frozenset({(1, 0), (2, 2)})

    def test_product(self):
        """(a, a') relates to (b, b')."""
        p = product(rel([(0, 1)]), rel([(2, 0)]))
        assert p.arity == (2, 2)
        assert p.tuples == frozenset({(0, 2, 1, 0)})

    def test_subset_image_full(self):
        """Subsets are relations out of the one-point set."""
        s = subset(ABC, [0, 2])
        assert s.arity == (0, 1)
        assert image(rel([(0, 1), (2, 1)])).tuples == frozenset({(1,)})
        assert len(full([ABC, ABC])) == 9

    def test_subset_composition(self):
        """A subset composed with a relation is its image."""
        assert compose(subset(ABC, [0]), rel([(0, 2), (1, 1)])).tuples == frozenset({(2,)})

    def test_restrict(self):
        """restrict keeps tuples inside the kept set."""
        assert restrict(rel([(0, 1), (1, 2)]), [0, 1]).tuples == frozenset({(0, 1)})

    def test_symmetric_difference_witness(self):
        """The smallest differing tuple is reported."""
        assert symmetric_difference_witness(rel([(0, 1)]), rel([(0, 1)])) is None
        assert symmetric_difference_witness(rel([(2, 2), (0, 1)]), rel([(1, 0)])) == (0, 1)

    def test_symmetric_difference_typing(self):
        """Relations of different typing cannot be compared."""
        with pytest.raises(RelationArityError):
            symmetric_difference_witness(rel([]), subset(ABC, []))

    @settings(max_examples=60, deadline=None)
    @given(relations_on(2))
    def test_bitset_composition_matches_reference(self, drawn):
        """The row-bitset composite agrees with the definition."""
        _, (r, s) = drawn
        assert compose(r, s).tuples == frozenset(_compose_reference(r, s))

    @settings(max_examples=60, deadline=None)
    @given(relations_on(2))
    def test_generic_composition_matches_bitset(self, drawn):
        """Composing through a one-point factor agrees with the binary path."""
        points, (r, s) = drawn
        lifted = Relation((), (points, points), r.tuples)
        via_generic = compose(lifted, product(identity(points), s))
        assert via_generic.tuples == frozenset(_compose_reference(r, s))

    @settings(max_examples=60, deadline=None)
    @given(relations_on(3))
    def test_composition_is_associative(self, drawn):
        """(r;s);t = r;(s;t)."""
        _, (a, b, c) = drawn
        assert compose(compose(a, b), c) == compose(a, compose(b, c))

    @settings(max_examples=60, deadline=None)
    @given(relations_on(2))
    def test_dagger_reverses_composition(self, drawn):
        """(r;s)† = s†;r†."""
        _, (a, b) = drawn
        assert dagger(compose(a, b)) == compose(dagger(b), dagger(a))

    @settings(max_examples=60, deadline=None)
    @given(relations_on(2, carriers=2))
    def test_product_distributes_over_composition(self, drawn):
        """(r1;s1) × (r2;s2) = (r1 × r2);(s1 × s2)."""
        (_, (r1, s1)), (_, (r2, s2)) = drawn
        assert product(compose(r1, s1), compose(r2, s2)) == compose(product(r1, r2), product(s1, s2))


class TestEquivalence:
    """Tests for is_equivalence and classes_of."""

    def test_partition(self):
        """A partition is an equivalence with its blocks as classes."""
        r = rel([(0, 0), (1, 1), (2, 2), (0, 2), (2, 0)])
        assert is_equivalence(r)
        assert classes_of(r, [0, 1, 2]) == [(0, 2), (1,)]

    def test_not_reflexive(self):
        """A missing diagonal tuple is the witness."""
        verdict = is_equivalence(rel([(0, 0), (1, 1)]))
        assert not verdict
        assert verdict.failed_property == "reflexive"
        assert verdict.witness == (2, 2)

    def test_not_symmetric(self):
        """The missing converse tuple is the witness."""
        verdict = is_equivalence(rel([(0, 0), (1, 1), (2, 2), (0, 1)]))
        assert verdict.failed_property == "symmetric"
        assert verdict.witness == (1, 0)

    def test_not_transitive(self):
        """The missing composite tuple is the witness."""
        verdict = is_equivalence(rel([(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)]))
        assert verdict.failed_property == "transitive"
        assert verdict.witness == (0, 2)

    def test_restricted_carrier(self):
        """Only the given carrier is considered."""
        assert is_equivalence(rel([(0, 0), (1, 1)]), carrier=[0, 1])
