"""Relational actions of a relational groupoid on itself and the fiber propositions.

``R_S`` relates z1 to z2 when z2 ∈ z1·g for some g ∈ S; ``L_S`` when
z2 ∈ g·z1. The checks below compare relations built from these actions
with the fibers G2_g = {(h, l) | (h, l, g) ∈ L3}.

The checks number distinct action maps and fibers by value and evaluate
each composite once per combination of numbers.
"""

import itertools
import logging
from collections.abc import Hashable, Iterable, Iterator, Sequence
from typing import Literal, Optional, TypeVar

from relconv.core.checks import CheckResult
from relconv.core.exceptions import InvalidArgumentError
from relconv.core.relation import Relation, compose, symmetric_difference_witness
from relconv.core.relational_groupoid import RelationalGroupoid

logger = logging.getLogger(__name__)

Side = Literal["left", "right"]
Pairs = Optional[Iterable[tuple[int, int]]]
Pair = tuple[int, int]
Row = tuple[frozenset[int], ...]

T = TypeVar("T", bound=Hashable)

EMPTY: frozenset[int] = frozenset()


def action_relation(g: RelationalGroupoid, s: Iterable[int], side: Side = "right") -> Relation:
    """R_S (right) or L_S (left) as an endorelation on the carrier."""
    members = set(s)
    if side == "right":
        tuples = frozenset((z1, z2) for z1, x, z2 in g.l3.tuples if x in members)
    elif side == "left":
        tuples = frozenset((z1, z2) for x, z1, z2 in g.l3.tuples if x in members)
    else:
        raise InvalidArgumentError(f"unknown action side {side!r}")
    return Relation((g.carrier,), (g.carrier,), tuples)


def _number(values: Sequence[T]) -> tuple[list[int], list[T]]:
    """Give equal values equal numbers; returns the numbering and one value per number."""
    seen: dict[T, int] = {}
    distinct: list[T] = []
    numbers = []
    for value in values:
        if value not in seen:
            seen[value] = len(distinct)
            distinct.append(value)
        numbers.append(seen[value])
    return numbers, distinct


class ActionTable:
    """Set products, R_x, L_x and G2_x for every element, numbered by value."""

    def __init__(self, g: RelationalGroupoid) -> None:
        n = len(g.carrier)
        succ = g.l3.successors
        self.products: dict[Pair, frozenset[int]] = {
            (a, b): frozenset(x for (x,) in values) for (a, b), values in succ.items()
        }
        get = self.products.get
        self.right: list[Row] = [tuple(get((z, h), EMPTY) for z in range(n)) for h in range(n)]
        self.left: list[Row] = [tuple(get((h, z), EMPTY) for z in range(n)) for h in range(n)]
        self.fibers: list[frozenset[Pair]] = [frozenset(g.fiber(x)) for x in range(n)]
        self.right_no, _ = _number(self.right)
        self.left_no, _ = _number(self.left)
        self.fiber_no, self.distinct_fibers = _number(self.fibers)
        logger.debug(
            "Action table for %s: %d right maps, %d left maps, %d fibers",
            g.name or "groupoid",
            len(set(self.right_no)),
            len(set(self.left_no)),
            len(self.distinct_fibers),
        )

    def product(self, a: int, b: int) -> frozenset[int]:
        return self.products.get((a, b), EMPTY)

    def fiber_key(self, members: Iterable[int]) -> frozenset[int]:
        return frozenset(self.fiber_no[k] for k in members)

    def fiber_union(self, key: frozenset[int]) -> frozenset[Pair]:
        """The union of the fibers numbered by key."""
        return frozenset().union(*(self.distinct_fibers[i] for i in key))


def _pairs(g: RelationalGroupoid, pairs: Pairs) -> Iterator[tuple[int, int]]:
    if pairs is not None:
        yield from pairs
        return
    for a in g.carrier:
        for b in g.carrier:
            yield a, b


def _pair_mismatch(
    name: str, g: RelationalGroupoid, lhs: frozenset[Pair], rhs: frozenset[Pair], at: tuple[int, ...]
) -> CheckResult:
    witness = min(lhs ^ rhs)
    labels = (g.label(witness[0]), g.label(witness[1]))
    return CheckResult.fail(name, tuple(g.label(i) for i in at) + labels, f"relations differ at pair {labels}")


def _compare(name: str, g: RelationalGroupoid, lhs: Relation, rhs: Relation, at: tuple[int, ...]) -> CheckResult:
    witness = symmetric_difference_witness(lhs, rhs)
    if witness is None:
        return CheckResult.ok(name)
    labels = tuple(g.label(i) for i in at) + lhs.labelled(witness)
    return CheckResult.fail(name, labels, f"relations differ at pair {lhs.labelled(witness)}")


def fibers_match_l2(g: RelationalGroupoid) -> CheckResult:
    """Fibers of L2-related elements coincide; other fibers are disjoint; fibers vanish off C."""
    name = "fibers-match-l2"
    constraint = set(g.constraint_elements)
    for x in g.carrier:
        if x not in constraint and g.fiber(x):
            return CheckResult.fail(name, (g.label(x),), "nonempty fiber outside the constraint set")
    ordered = sorted(constraint)
    fibers = {x: frozenset(g.fiber(x)) for x in ordered}
    for i, x in enumerate(ordered):
        for y in ordered[i + 1 :]:
            related = (x, y) in g.l2.tuples
            if related and fibers[x] != fibers[y]:
                return CheckResult.fail(name, (g.label(x), g.label(y)), "L2-related elements with different fibers")
            if not related and not fibers[x].isdisjoint(fibers[y]):
                return CheckResult.fail(name, (g.label(x), g.label(y)), "unrelated elements with overlapping fibers")
    return CheckResult.ok(name)


def class_product_property(g: RelationalGroupoid, pairs: Pairs = None) -> CheckResult:
    """A nonempty set product ab is a whole L2-class of each of its elements."""
    name = "class-product"
    succ = g.l2.successors
    classes = {x: frozenset(y for (y,) in succ.get((x,), ())) for x in g.carrier}
    table = ActionTable(g)
    for a, b in _pairs(g, pairs):
        ab = table.product(a, b)
        for c in sorted(ab):
            if ab != classes[c]:
                return CheckResult.fail(name, (g.label(a), g.label(b), g.label(c)), "set product is not an L2-class")
    return CheckResult.ok(name)


def translation_property(g: RelationalGroupoid, pairs: Pairs = None) -> CheckResult:
    """(id×R_h)∘G2_x = G2_{xh} and (L_x×id)∘G2_h = G2_{xh} for composable (x, h)."""
    name = "fiber-translation"
    table = ActionTable(g)
    moved: dict[tuple[str, int, int], frozenset[Pair]] = {}
    targets: dict[frozenset[int], frozenset[Pair]] = {}
    agreed: set[tuple[tuple[str, int, int], frozenset[int]]] = set()

    def right_of(x: int, h: int) -> frozenset[Pair]:
        rh = table.right[h]
        return frozenset((a, c) for a, b in table.fibers[x] for c in rh[b])

    def left_of(x: int, h: int) -> frozenset[Pair]:
        lx = table.left[x]
        return frozenset((c, b) for a, b in table.fibers[h] for c in lx[a])

    for x, h in _pairs(g, pairs):
        xh = table.product(x, h)
        if not xh:
            continue
        target_key = table.fiber_key(xh)
        if target_key not in targets:
            targets[target_key] = table.fiber_union(target_key)
        target = targets[target_key]
        for key, build in (
            (("right", table.fiber_no[x], table.right_no[h]), right_of),
            (("left", table.fiber_no[h], table.left_no[x]), left_of),
        ):
            if (key, target_key) in agreed:
                continue
            if key not in moved:
                moved[key] = build(x, h)
            if moved[key] != target:
                return _pair_mismatch(name, g, moved[key], target, (x, h))
            agreed.add((key, target_key))
    return CheckResult.ok(name)


def transport_property(g: RelationalGroupoid, pairs: Pairs = None) -> CheckResult:
    """(L_{I(x)}×R_h)∘G2_x = G2_h for composable (x, h)."""
    name = "fiber-transport"
    table = ActionTable(g)
    inverse = g.inverse_map
    moved: dict[tuple[int, int, int], frozenset[Pair]] = {}
    agreed: set[tuple[tuple[int, int, int], int]] = set()
    for x, h in _pairs(g, pairs):
        if not table.product(x, h):
            continue
        key = (table.fiber_no[x], table.left_no[inverse[x]], table.right_no[h])
        target_key = table.fiber_no[h]
        if (key, target_key) in agreed:
            continue
        if key not in moved:
            lx, rh = table.left[inverse[x]], table.right[h]
            out: set[Pair] = set()
            for a, b in table.fibers[x]:
                out.update(itertools.product(lx[a], rh[b]))
            moved[key] = frozenset(out)
        if moved[key] != table.fibers[h]:
            return _pair_mismatch(name, g, moved[key], table.fibers[h], (x, h))
        agreed.add((key, target_key))
    return CheckResult.ok(name)


def action_composition_property(g: RelationalGroupoid, pairs: Pairs = None) -> CheckResult:
    """Acting by a and then by b is acting by the set product ab."""
    name = "action-composition"
    table = ActionTable(g)
    n = len(g.carrier)
    composed: dict[tuple[int, int], Row] = {}
    combined: dict[frozenset[int], Row] = {}
    agreed: set[tuple[tuple[int, int], frozenset[int]]] = set()
    for a, b in _pairs(g, pairs):
        key = (table.right_no[a], table.right_no[b])
        ab_key = frozenset(table.right_no[c] for c in table.product(a, b))
        if (key, ab_key) in agreed:
            continue
        if key not in composed:
            ra, rb = table.right[a], table.right[b]
            composed[key] = tuple(EMPTY.union(*(rb[y] for y in ra[z])) for z in range(n))
        if ab_key not in combined:
            rows = [table.right[c] for c in table.product(a, b)]
            combined[ab_key] = tuple(EMPTY.union(*(row[z] for row in rows)) for z in range(n))
        lhs, rhs = composed[key], combined[ab_key]
        for z in range(n):
            diff = lhs[z] ^ rhs[z]
            if diff:
                labels = (g.label(z), g.label(min(diff)))
                return CheckResult.fail(
                    name, (g.label(a), g.label(b)) + labels, f"relations differ at pair {labels}"
                )
        agreed.add((key, ab_key))
    return CheckResult.ok(name)


def right_action_property(g: RelationalGroupoid) -> CheckResult:
    """ρ = L3 is a relational right action of G on (G, L2): associativity and R_{L1} = L2."""
    name = "right-action"
    table = ActionTable(g)
    acted: dict[tuple[frozenset[int], int], frozenset[int]] = {}
    acting: dict[tuple[int, frozenset[int]], frozenset[int]] = {}
    for a in g.carrier:
        for b in g.carrier:
            ab = table.product(a, b)
            for c in g.carrier:
                bc = table.product(b, c)
                if (ab, c) not in acted:
                    acted[(ab, c)] = EMPTY.union(*(table.product(x, c) for x in ab))
                if (a, bc) not in acting:
                    acting[(a, bc)] = EMPTY.union(*(table.product(a, y) for y in bc))
                lhs, rhs = acted[(ab, c)], acting[(a, bc)]
                diff = lhs ^ rhs
                if diff:
                    labels = (g.label(a), g.label(b), g.label(c), g.label(min(diff)))
                    return CheckResult.fail(name, labels, f"relations differ at pair {labels}")
    return _compare(name, g, action_relation(g, g.unit_elements), g.l2, ())


def quintuple_round_trip(g: RelationalGroupoid) -> CheckResult:
    """Rebuilding L as I∘L3 recovers L."""
    name = "quintuple-round-trip"
    return _compare(name, g, compose(g.l3, g.involution), g.triples, ())
