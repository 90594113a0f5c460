"""
Tests for relational groupoids: derived relations, axioms and constructors.
"""

import unittest

import pytest

from relconv.core.exceptions import AxiomViolationError, NotAnEquivalenceError, NotASubgroupError, NotNormalError
from relconv.core.relation import FiniteSet, Relation
from relconv.core.relational_groupoid import (
    AXIOMS,
    check_axioms,
    from_group_and_normal_subgroup,
    from_groupoid,
    from_structure_relations,
    relational_pair_groupoid,
)
from relconv.generators.corpus import (
    pair_groupoid_table,
    relational_group_examples,
    relational_pair,
    swap_action_groupoid,
    z4z2,
)
from relconv.generators.groups import (
    add_l3_tuple,
    cyclic_table,
    drop_l3_tuple,
    isolated_extension,
    mutate,
    swap_involution,
    symmetric_table,
)

FIBER_0 = [("0", "0"), ("0", "2"), ("1", "1"), ("1", "3"), ("2", "0"), ("2", "2"), ("3", "1"), ("3", "3")]
FIBER_1 = [("0", "1"), ("0", "3"), ("1", "0"), ("1", "2"), ("2", "1"), ("2", "3"), ("3", "0"), ("3", "2")]


def labelled_fiber(g, label):
    return sorted((g.label(h), g.label(k)) for h, k in g.fiber(g.index(label)))


class TestDerivedRelations:
    """Tests for L1, L2, L3 and the constraint set on Z4/Z2."""

    def test_units(self):
        """The units are the subgroup {0, 2}."""
        g = z4z2()
        assert [g.label(u) for u in g.unit_elements] == ["0", "2"]

    def test_unit_equivalence_is_coset_relation(self):
        """L2 relates elements of the same coset."""
        g = z4z2()
        related = {(g.label(a), g.label(b)) for a, b in g.l2.tuples}
        assert related == {(a, b) for a in "0123" for b in "0123" if (int(a) - int(b)) % 2 == 0}

    def test_constraint_set_is_everything(self):
        """Every element of a relational group lies in C."""
        g = z4z2()
        assert g.constraint_elements == (0, 1, 2, 3)

    def test_multiplication_graph(self):
        """L3 holds (a, b, a+b+h) for h in the subgroup."""
        g = z4z2()
        assert len(g.l3) == 32
        assert set(g.set_product(1, 1)) == {0, 2}
        assert set(g.set_product(1, 2)) == {1, 3}

    def test_fibers_match_listing(self):
        """Fibers of 0 and 1 are the eight listed pairs."""
        g = z4z2()
        assert labelled_fiber(g, "0") == FIBER_0
        assert labelled_fiber(g, "1") == FIBER_1
        assert labelled_fiber(g, "2") == FIBER_0
        assert labelled_fiber(g, "3") == FIBER_1


class TestAxioms:
    """Tests for check_axioms on the positive examples."""

    @pytest.mark.parametrize("name", sorted(relational_group_examples()))
    def test_examples_satisfy_axioms(self, name):
        """Every named example passes every sub-axiom."""
        report = check_axioms(relational_group_examples()[name])
        assert report.passed, report.first_failure
        assert [r.name for r in report.results] == [axiom for axiom, _check in AXIOMS]

    def test_threaded_matches_serial(self):
        """Running the sub-axioms on threads gives the same report."""
        g = z4z2()
        assert check_axioms(g, threads=4).results == check_axioms(g, threads=1).results

    def test_report_lookup(self):
        """Results can be looked up by axiom name."""
        report = check_axioms(z4z2())
        assert report["A.4"].passed
        with pytest.raises(KeyError):
            report["A.9"]

    def test_action_groupoid_embedding(self):
        """Action groupoids embed as relational groupoids."""
        table, _haar = swap_action_groupoid()
        assert check_axioms(from_groupoid(table, check=False)).passed

    def test_symmetric_group_embedding(self):
        """S3 as a one-object groupoid is a relational groupoid."""
        assert check_axioms(from_groupoid(symmetric_table(3), check=False)).passed


class TestNegativeAxioms:
    """Mutations of Z4/Z2 must be detected."""

    def test_every_single_deletion_fails(self):
        """Removing any one multiplication triple breaks an axiom."""
        g = z4z2()
        for t in sorted(g.l3.tuples):
            report = check_axioms(drop_l3_tuple(g, t))
            assert not report.passed, t
            assert report.first_failure.witness is not None, t

    def test_adding_a_triple_fails(self):
        """An off-coset triple breaks an axiom."""
        assert not check_axioms(add_l3_tuple(z4z2(), (1, 1, 3))).passed

    def test_swapping_inverses_fails_involution(self):
        """Exchanging I-images of 0 and 1 makes I∘I differ from id."""
        report = check_axioms(swap_involution(z4z2(), 0, 1))
        assert not report["A.2"].passed

    def test_swap_with_itself_is_identity(self):
        """Swapping an element with itself changes nothing."""
        g = z4z2()
        assert swap_involution(g, 2, 2) is g

    def test_checked_raises(self):
        """checked() names the failing axiom."""
        with pytest.raises(AxiomViolationError) as info:
            swap_involution(z4z2(), 0, 1).checked()
        assert info.value.context["axiom"] == "A.2"

    def test_mutate_is_deterministic(self):
        """The same seed gives the same mutant."""
        g = z4z2()
        assert mutate(g, "drop-tuple", seed=3).triples == mutate(g, "drop-tuple", seed=3).triples
        assert not check_axioms(mutate(g, "drop-tuple", seed=3)).passed


class TestConstructors(unittest.TestCase):
    def test_quintuple_round_trip(self):
        g = z4z2()
        rebuilt = from_structure_relations(g.carrier, list(g.inverse_map), g.l3)
        self.assertEqual(rebuilt.triples, g.triples)
        self.assertTrue(check_axioms(rebuilt).passed)

    def test_not_a_subgroup(self):
        with self.assertRaises(NotASubgroupError):
            from_group_and_normal_subgroup(cyclic_table(4), ["0", "1"])

    def test_not_normal(self):
        with self.assertRaises(NotNormalError):
            from_group_and_normal_subgroup(symmetric_table(3), ["012", "102"])

    def test_trivial_subgroup_gives_the_group(self):
        g = from_group_and_normal_subgroup(cyclic_table(3), ["0"])
        self.assertEqual(g.unit_elements, (0,))
        self.assertEqual(len(g.l3), 9)

    def test_pair_groupoid(self):
        g = from_groupoid(pair_groupoid_table(3))
        self.assertEqual(len(g.carrier), 9)
        self.assertEqual(len(g.unit_elements), 3)

    def test_relational_pair_identity_is_pair_groupoid(self):
        g = relational_pair(2)
        self.assertEqual(len(g.l2), 4)
        self.assertTrue(check_axioms(g).passed)

    def test_relational_pair_total(self):
        g = relational_pair(2, total=True)
        self.assertEqual(len(g.l2), 16)

    def test_relational_pair_needs_equivalence(self):
        x = FiniteSet(["a", "b"])
        with self.assertRaises(NotAnEquivalenceError):
            relational_pair_groupoid(x, Relation((x,), (x,), frozenset({(0, 1)})))

    def test_isolated_extension(self):
        g = isolated_extension(z4z2())
        self.assertEqual(g.label(4), "iso")
        self.assertNotIn(4, g.constraint_elements)
        self.assertTrue(check_axioms(g).passed)
