"""Named examples, Haar systems on Z4/Z2 and the positive and negative corpora."""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from relconv.core.convolution import AlgebraElement
from relconv.core.groupoid_table import GroupoidTable
from relconv.core.haar import (
    RelationalHaarSystem,
    RightHaarSystem,
    build_from_conditionals,
    build_split,
    build_strongly_split,
    counting_tau,
    induced_relational_haar,
)
from relconv.core.measure import Measure
from relconv.core.reduction import QuotientData, quotient_groupoid
from relconv.core.relation import FiniteSet, Relation, identity
from relconv.core.relational_groupoid import RelationalGroupoid, from_groupoid, relational_pair_groupoid
from relconv.generators.groups import (
    action_groupoid,
    add_l3_tuple,
    cyclic_relational,
    cyclic_table,
    drop_l3_tuple,
    isolated_extension,
    s3_a3,
    swap_involution,
)
from relconv.parser.definition import serialize, to_document

logger = logging.getLogger(__name__)

Pair = tuple[int, int]


@dataclass(frozen=True)
class ExpectedProperties:
    """Machine-checkable expectations; None means "not asserted"."""

    axioms: bool = True
    haar: Optional[bool] = None
    l2_invariant: Optional[bool] = None
    split: Optional[bool] = None
    strongly_split: Optional[bool] = None
    associative: Optional[bool] = None


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    groupoid: RelationalGroupoid
    haar: Optional[RelationalHaarSystem] = None
    expected: ExpectedProperties = field(default_factory=ExpectedProperties)
    functions: Mapping[str, AlgebraElement] = field(default_factory=dict)
    description: str = ""


# ============================================================================
# The Z4/Z2 example
# ============================================================================


def z4z2() -> RelationalGroupoid:
    return cyclic_relational(4, 2)


def _setup(g: Optional[RelationalGroupoid]) -> tuple[RelationalGroupoid, QuotientData, RightHaarSystem]:
    g = g or z4z2()
    qd = quotient_groupoid(g)
    return g, qd, RightHaarSystem.normalized_counting(qd.quotient)


def strongly_split(g: Optional[RelationalGroupoid] = None) -> RelationalHaarSystem:
    """ν = normalized counting on the quotient, τ = normalized counting on every class."""
    g, qd, nu = _setup(g)
    return build_strongly_split(g, nu, counting_tau(qd), qd)


def diagonal_dirac(g: Optional[RelationalGroupoid] = None) -> RelationalHaarSystem:
    """τ^x over the class of x is δ_x; over other classes it is normalized counting."""
    g, qd, nu = _setup(g)

    def tau_for(x: int, cls: int) -> Measure[int]:
        if qd.project(x) == cls:
            return Measure.dirac(x)
        return Measure.normalized_counting(qd.lift(cls))

    return build_split(g, nu, tau_for, qd)


def shifted_dirac(g: Optional[RelationalGroupoid] = None) -> RelationalHaarSystem:
    """Elements of the unit class put τ over the unit class at its other member; otherwise counting."""
    g, qd, nu = _setup(g)
    unit_class = qd.project(g.unit_elements[0])

    def tau_for(x: int, cls: int) -> Measure[int]:
        members = qd.lift(cls)
        if qd.project(x) == unit_class and cls == unit_class:
            return Measure.dirac(members[-1])
        return Measure.normalized_counting(members)

    return build_split(g, nu, tau_for, qd)


def non_product(g: Optional[RelationalGroupoid] = None) -> RelationalHaarSystem:
    """Conditionals 1/3 on (a, b), (a', b), (a, b') and 0 on (a', b') for classes {a, a'}, {b, b'}."""
    g, qd, nu = _setup(g)
    third = Fraction(1, 3)

    def conditional(_x: int, a: int, b: int) -> Measure[Pair]:
        first, second = qd.lift(a), qd.lift(b)
        a0, a1 = first[0], first[-1]
        b0, b1 = second[0], second[-1]
        return Measure({(a0, b0): third, (a1, b0): third, (a0, b1): third})

    return build_from_conditionals(g, nu, conditional, qd)


def z4z2_functions(g: RelationalGroupoid) -> dict[str, AlgebraElement]:
    c = g.carrier
    return {
        "d0": AlgebraElement.delta(c, 0),
        "d1": AlgebraElement.delta(c, 1),
        "even": AlgebraElement.indicator(c, (0, 2)),
        "odd": AlgebraElement.indicator(c, (1, 3)),
        "zero": AlgebraElement.zero(c),
    }


# ============================================================================
# Other examples
# ============================================================================


def pair_groupoid_table(points: int = 3) -> GroupoidTable:
    return GroupoidTable.pair_groupoid([chr(ord("a") + i) for i in range(points)])


def swap_action_groupoid() -> tuple[GroupoidTable, RightHaarSystem]:
    """Z2 acting on two points by exchanging them."""
    return action_groupoid(cyclic_table(2), ["p", "q"], lambda g, x: (x + g) % 2, name="Z2swap")


def relational_pair(points: int = 2, total: bool = False) -> RelationalGroupoid:
    x = FiniteSet([chr(ord("a") + i) for i in range(points)], name="X")
    r = Relation((x,), (x,), frozenset((a, b) for a in x for b in x)) if total else identity(x)
    return relational_pair_groupoid(x, r, name=f"pair{points}-{'total' if total else 'identity'}")


def relational_group_examples() -> dict[str, RelationalGroupoid]:
    """Relational groupoids that satisfy every axiom."""
    pair_table = pair_groupoid_table(3)
    action_table, _ = swap_action_groupoid()
    return {
        "z4z2": z4z2(),
        "z6-2": cyclic_relational(6, 2),
        "s3-a3": s3_a3(),
        "pair3": from_groupoid(pair_table, name="pair3"),
        "pair2-identity": relational_pair(2),
        "pair2-total": relational_pair(2, total=True),
        "z2-swap": from_groupoid(action_table, name="z2-swap"),
    }


def _strong(g: RelationalGroupoid) -> RelationalHaarSystem:
    return strongly_split(g)


def standard_corpus() -> list[CorpusEntry]:
    """Positive examples with their Haar systems and the expected classification."""
    g = z4z2()
    functions = z4z2_functions(g)
    entries = [
        CorpusEntry(
            "z4z2-strong",
            g,
            strongly_split(g),
            ExpectedProperties(haar=True, l2_invariant=True, split=True, strongly_split=True, associative=True),
            functions,
            "Z4 with subgroup {0,2}; 1/8 counting on every fiber",
        ),
        CorpusEntry(
            "z4z2-diagonal",
            g,
            diagonal_dirac(g),
            ExpectedProperties(haar=True, l2_invariant=False, split=True, strongly_split=False),
            functions,
            "split system with tau over the own class a Dirac measure at the element",
        ),
        CorpusEntry(
            "z4z2-shifted",
            g,
            shifted_dirac(g),
            ExpectedProperties(haar=True, l2_invariant=True, split=True, strongly_split=False, associative=False),
            functions,
            "L2-invariant split system with a non-associative convolution",
        ),
        CorpusEntry(
            "z4z2-nonproduct",
            g,
            non_product(g),
            ExpectedProperties(haar=True, l2_invariant=True, split=False, strongly_split=False),
            functions,
            "L2-invariant system whose conditionals are not product measures",
        ),
    ]
    for name, rg in relational_group_examples().items():
        if name == "z4z2":
            continue
        entries.append(
            CorpusEntry(
                name,
                rg,
                _strong(rg),
                ExpectedProperties(haar=True, l2_invariant=True, split=True, strongly_split=True, associative=True),
            )
        )

    z2 = cyclic_table(2)
    embedded, haar = induced_relational_haar(z2, RightHaarSystem.normalized_counting(z2))
    entries.append(
        CorpusEntry(
            "z2-half",
            embedded,
            haar,
            ExpectedProperties(haar=True, l2_invariant=True, split=True, strongly_split=True, associative=True),
            {"d0": AlgebraElement.delta(embedded.carrier, 0), "d1": AlgebraElement.delta(embedded.carrier, 1)},
            "Z2 with the normalized counting Haar system",
        )
    )
    iso = isolated_extension(g)
    entries.append(
        CorpusEntry(
            "z4z2-isolated",
            iso,
            strongly_split(iso),
            ExpectedProperties(haar=True, l2_invariant=True, split=True, strongly_split=True, associative=True),
            {"iso": AlgebraElement.delta(iso.carrier, iso.index("iso"))},
            "Z4/Z2 with an element outside the constraint set",
        )
    )
    return entries


def negative_corpus() -> list[CorpusEntry]:
    """Structures that fail at least one axiom."""
    g = z4z2()
    return [
        CorpusEntry(
            "z4z2-drop-000", drop_l3_tuple(g, (0, 0, 0)), expected=ExpectedProperties(axioms=False),
            description="Z4/Z2 without the multiplication triple (0,0,0)",
        ),
        CorpusEntry(
            "z4z2-add-113", add_l3_tuple(g, (1, 1, 3)), expected=ExpectedProperties(axioms=False),
            description="Z4/Z2 with the off-coset triple (1,1,3)",
        ),
        CorpusEntry(
            "z4z2-swap-I", swap_involution(g, 0, 1), expected=ExpectedProperties(axioms=False),
            description="Z4/Z2 with the I-images of 0 and 1 exchanged",
        ),
    ]


def export_corpus(directory: Union[str, Path], negative: bool = True) -> list[Path]:
    """Write one definition file per corpus entry."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    entries = standard_corpus() + (negative_corpus() if negative else [])
    for entry in entries:
        doc = to_document(entry.groupoid, entry.haar, entry.functions, name=entry.name, description=entry.description)
        path = out / f"{entry.name}.json"
        path.write_text(serialize(doc), encoding="utf-8")
        written.append(path)
    logger.debug("Exported %d corpus entries to %s", len(written), out)
    return written
