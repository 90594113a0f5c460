"""
Tests for group tables, subgroups, action groupoids and the mutation helpers.
"""

import pytest

from relconv.core.exceptions import ActionAxiomError, InvalidArgumentError, InvalidGroupoidTableError
from relconv.core.groupoid_table import GroupoidTable
from relconv.core.haar import check_right_haar
from relconv.core.relational_groupoid import check_axioms
from relconv.generators.groups import (
    action_groupoid,
    cyclic_relational,
    cyclic_table,
    dihedral_relational,
    dihedral_table,
    direct_product_table,
    is_normal,
    mutate,
    normal_closure,
    random_relational_groups,
    subgroup_closure,
    symmetric_table,
)


class TestTables:
    """Tests for the group table builders."""

    @pytest.mark.parametrize(
        "table, order",
        [(cyclic_table(5), 5), (dihedral_table(4), 8), (symmetric_table(3), 6)],
    )
    def test_orders(self, table, order):
        """Tables have the expected order and a single object."""
        assert len(table.morphisms) == order
        assert table.is_group

    def test_dihedral_relations(self):
        """s0 is an involution and s0 r1 s0 = r(n-1)."""
        d = dihedral_table(4)
        s0, r1 = d.morphisms.index("s0"), d.morphisms.index("r1")
        assert d.mult[(s0, s0)] == d.unit[0]
        assert d.label(d.mult[(d.mult[(s0, r1)], s0)]) == "r3"

    def test_direct_product(self):
        """Z2 x Z3 has order 6 and is abelian."""
        table = direct_product_table(cyclic_table(2), cyclic_table(3))
        assert len(table.morphisms) == 6
        assert all(table.mult[(a, b)] == table.mult[(b, a)] for a in table.morphisms for b in table.morphisms)

    def test_bad_orders(self):
        """Orders must be positive."""
        with pytest.raises(InvalidArgumentError):
            cyclic_table(0)
        with pytest.raises(InvalidArgumentError):
            dihedral_table(0)

    def test_bad_cayley_table(self):
        """A table without inverses is rejected."""
        with pytest.raises(InvalidGroupoidTableError):
            GroupoidTable.from_group(["e", "a"], [["e", "a"], ["a", "a"]])


class TestSubgroups:
    """Tests for closures and normality."""

    def test_subgroup_closure(self):
        """2 generates {0, 2, 4} in Z6."""
        table = cyclic_table(6)
        assert subgroup_closure(table, ["2"]) == (0, 2, 4)

    def test_normal_closure_of_reflection(self):
        """The normal closure of s0 in D3 is all of D3."""
        table = dihedral_table(3)
        assert len(normal_closure(table, ["s0"])) == 6

    def test_is_normal(self):
        """Rotations are normal in D3; one reflection subgroup is not."""
        table = dihedral_table(3)
        assert is_normal(table, ["r0", "r1", "r2"])
        assert not is_normal(table, ["r0", "s0"])


class TestRelationalGroups:
    """Tests for relational groups from a group and a normal subgroup."""

    def test_cyclic(self):
        """Z6/<3> has units {0, 3}."""
        g = cyclic_relational(6, 3)
        assert [g.label(u) for u in g.unit_elements] == ["0", "3"]

    def test_divisibility(self):
        """The quotient order must divide the group order."""
        with pytest.raises(InvalidArgumentError):
            cyclic_relational(6, 4)

    def test_dihedral(self):
        """D4 modulo rotations satisfies the axioms."""
        assert check_axioms(dihedral_relational(4)).passed

    def test_random_groups_are_seeded(self):
        """The same seed gives the same groups."""
        first = [g.triples for g in random_relational_groups(10, seed=3, max_order=8)]
        second = [g.triples for g in random_relational_groups(10, seed=3, max_order=8)]
        assert first == second

    def test_random_groups_satisfy_axioms(self):
        """Generated groups are relational groups."""
        for g in random_relational_groups(10, seed=1, max_order=8):
            assert check_axioms(g).passed, g.name

    def test_unknown_mutation(self):
        """Only the three mutation kinds exist."""
        with pytest.raises(InvalidArgumentError):
            mutate(cyclic_relational(4, 2), "rename")


class TestActionGroupoid:
    """Tests for action groupoids."""

    def test_rotation_action(self):
        """Z3 acting on three points by rotation."""
        table, haar = action_groupoid(cyclic_table(3), ["p", "q", "r"], lambda g, x: (g + x) % 3)
        assert len(table.morphisms) == 9
        assert len(table.objects) == 3
        assert check_right_haar(table, haar)

    def test_not_an_action(self):
        """A map that ignores the identity is rejected."""
        with pytest.raises(ActionAxiomError):
            action_groupoid(cyclic_table(2), ["p", "q"], lambda g, x: 0)

    def test_leaves_point_set(self):
        """Images outside the point set are rejected."""
        with pytest.raises(ActionAxiomError):
            action_groupoid(cyclic_table(2), ["p"], lambda g, x: x + g)
