"""
Tests for the relational convolution product, the vanishing ideal and the reduced algebra.
"""

from fractions import Fraction

import pytest

from relconv.core.convolution import (
    AlgebraElement,
    check_associativity,
    check_groupoid_associativity,
    check_invariant_subalgebra,
    check_involution_antihomomorphism,
    check_l2conv_lemma,
    check_split_factorization,
    check_support_in_constraint_set,
    convolve,
    invariant_basis,
    involution,
    pushforward_invariant,
    reduce_algebra,
    relational_product_table,
    restrict_to_constraint,
    verify_ideal,
)
from relconv.core.exceptions import AlgebraError, NotInvariantError
from relconv.core.haar import RightHaarSystem, check_relational_haar, is_strongly_split
from relconv.core.reduction import quotient_groupoid
from relconv.core.scalars import scalar
from relconv.generators.corpus import (
    diagonal_dirac,
    non_product,
    pair_groupoid_table,
    relational_group_examples,
    shifted_dirac,
    standard_corpus,
    strongly_split,
    z4z2,
)
from relconv.generators.groups import cyclic_table, isolated_extension, symmetric_table

ALL_SYSTEMS = [strongly_split, diagonal_dirac, shifted_dirac, non_product]


def delta(g, label):
    return AlgebraElement.delta(g.carrier, g.index(label))


class TestAlgebraElement:
    """Tests for exact functions on a carrier."""

    def test_format(self):
        """Only nonzero entries are shown."""
        g = z4z2()
        f = AlgebraElement(g.carrier, {0: Fraction(1, 8), 1: 0, 2: scalar(0, 1)})
        assert f.format() == "0: 1/8, 2: 1i"
        assert AlgebraElement.zero(g.carrier).format() == "0"

    def test_arithmetic(self):
        """Sums, differences and scalar multiples."""
        g = z4z2()
        f = delta(g, "0") + delta(g, "2")
        assert f == AlgebraElement.indicator(g.carrier, [0, 2])
        assert (f - delta(g, "2")) == delta(g, "0")
        assert (2 * delta(g, "1"))[1] == scalar(2)

    def test_different_carriers(self):
        """Functions on different carriers cannot be added."""
        g = z4z2()
        other = AlgebraElement.delta(cyclic_table(2).morphisms, 0)
        with pytest.raises(AlgebraError):
            delta(g, "0") + other

    def test_point_outside_carrier(self):
        """Indices must lie in the carrier."""
        with pytest.raises(AlgebraError):
            AlgebraElement(z4z2().carrier, {7: 1})

    def test_involution_uses_inverse(self):
        """δ1* = δ3 in Z4."""
        g = z4z2()
        assert involution(g, delta(g, "1")) == delta(g, "3")
        assert involution(g, AlgebraElement(g.carrier, {1: scalar(0, 1)})) == AlgebraElement(
            g.carrier, {3: scalar(0, -1)}
        )


class TestZ4Z2Products:
    """Products on Z4/Z2 for the four Haar systems."""

    def test_strongly_split_product(self):
        """δ0⋆δ0 = 1/8 δ0 + 1/8 δ2."""
        g = z4z2()
        product = convolve(g, strongly_split(g), delta(g, "0"), delta(g, "0"))
        assert product.format() == "0: 1/8, 2: 1/8"

    def test_diagonal_product(self):
        """With δ_x over its own class, δ0⋆δ0 = 1/2 δ0."""
        g = z4z2()
        assert convolve(g, diagonal_dirac(g), delta(g, "0"), delta(g, "0")).format() == "0: 1/2"

    def test_shifted_products(self):
        """The shifted system moves all mass off (0, 0)."""
        g = z4z2()
        rhs = shifted_dirac(g)
        assert convolve(g, rhs, delta(g, "0"), delta(g, "0")).is_zero()
        assert convolve(g, rhs, delta(g, "0"), delta(g, "1")).format() == "1: 1/8, 3: 1/8"

    def test_shifted_is_not_associative(self):
        """The first failing triple is (0, 0, 1)."""
        g = z4z2()
        result = check_associativity(g, shifted_dirac(g))
        assert not result
        assert result.witness == ("0", "0", "1")

    def test_strongly_split_is_associative(self):
        """Strongly split systems give an associative algebra."""
        g = z4z2()
        assert check_associativity(g, strongly_split(g))

    def test_threaded_table_matches_serial(self):
        """The product table does not depend on the thread count."""
        g = z4z2()
        rhs = strongly_split(g)
        assert relational_product_table(g, rhs, threads=3) == relational_product_table(g, rhs, threads=1)

    @pytest.mark.parametrize("build", ALL_SYSTEMS)
    def test_invariant_subalgebra(self, build):
        """Class indicators multiply inside the invariant subalgebra and associate."""
        g = z4z2()
        assert check_invariant_subalgebra(g, build(g))

    @pytest.mark.parametrize("build", ALL_SYSTEMS)
    def test_l2_convolution_lemma(self, build):
        """Invariant functions multiply through the quotient."""
        g = z4z2()
        rhs = build(g)
        qd = quotient_groupoid(g)
        basis = invariant_basis(g, qd)
        for f1 in basis:
            for f2 in basis:
                assert check_l2conv_lemma(g, rhs, f1, f2, qd)

    def test_lemma_needs_invariant_functions(self):
        """δ0 is not constant on {0, 2}."""
        g = z4z2()
        with pytest.raises(NotInvariantError):
            pushforward_invariant(g, quotient_groupoid(g), delta(g, "0"))

    def test_split_factorization(self):
        """Strongly split products factor through q."""
        g = z4z2()
        rhs = strongly_split(g)
        qd = quotient_groupoid(g)
        strong = is_strongly_split(g, rhs, qd)
        assert check_split_factorization(g, rhs, strong.tau, qd)


class TestIdeal:
    """Functions vanishing on C."""

    def test_isolated_element_products_vanish(self):
        """δ_iso multiplies everything to zero."""
        g = isolated_extension(z4z2())
        rhs = strongly_split(g)
        iso = delta(g, "iso")
        for x in g.carrier:
            other = AlgebraElement.delta(g.carrier, x)
            assert convolve(g, rhs, iso, other).is_zero()
            assert convolve(g, rhs, other, iso).is_zero()

    def test_ideal_and_support(self):
        """Products live on C and I_C is an ideal."""
        g = isolated_extension(z4z2())
        rhs = strongly_split(g)
        table = relational_product_table(g, rhs)
        assert check_support_in_constraint_set(g, rhs, table)
        assert verify_ideal(g, rhs, table)

    def test_restriction_to_constraint(self):
        """The class of f modulo I_C is its restriction to C."""
        g = isolated_extension(z4z2())
        f = AlgebraElement.constant(g.carrier)
        assert restrict_to_constraint(g, f) == AlgebraElement.indicator(g.carrier, [0, 1, 2, 3])


class TestReducedAlgebra:
    """The reduction theorem and the corpus."""

    @pytest.mark.parametrize("name", sorted(relational_group_examples()))
    def test_reduction_theorem(self, name):
        """Φ is an isomorphism onto the quotient convolution algebra."""
        g = relational_group_examples()[name]
        reduced = reduce_algebra(g, strongly_split(g))
        assert reduced.verify_isomorphism()
        assert len(reduced.basis) == len(reduced.quotient.classes)

    @pytest.mark.parametrize("build", ALL_SYSTEMS)
    def test_reduction_theorem_for_every_system(self, build):
        """The theorem only needs a relational Haar system."""
        g = z4z2()
        assert reduce_algebra(g, build(g)).verify_isomorphism()

    def test_phi_round_trip(self):
        """Φ⁻¹∘Φ is the identity on invariant functions."""
        g = z4z2()
        reduced = reduce_algebra(g, strongly_split(g))
        even = AlgebraElement.indicator(g.carrier, [0, 2])
        assert reduced.phi(even) == AlgebraElement.delta(reduced.quotient.quotient.morphisms, 0)
        assert reduced.phi_inverse(reduced.phi(even)) == even

    def test_corpus(self):
        """Every corpus entry is Haar, satisfies the lemma and matches its associativity."""
        for entry in standard_corpus():
            g, rhs = entry.groupoid, entry.haar
            qd = quotient_groupoid(g)
            assert check_relational_haar(g, rhs, qd).passed, entry.name
            basis = invariant_basis(g, qd)
            for f1 in basis:
                for f2 in basis:
                    assert check_l2conv_lemma(g, rhs, f1, f2, qd), entry.name
            if entry.expected.associative is not None:
                assert bool(check_associativity(g, rhs)) == entry.expected.associative, entry.name


class TestGroupoidAlgebra:
    """The honest groupoid convolution algebra."""

    @pytest.mark.parametrize("table", [cyclic_table(2), pair_groupoid_table(3), symmetric_table(3)])
    def test_associative_with_involution(self, table):
        """Groupoid convolution associates and * is an anti-homomorphism."""
        haar = RightHaarSystem.normalized_counting(table)
        assert check_groupoid_associativity(table, haar)
        assert check_involution_antihomomorphism(table, haar)
