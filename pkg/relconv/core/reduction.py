"""Reduction of a relational groupoid to an honest groupoid.

The constraint set C carries the equivalence L2; the quotient C/L2 is a
groupoid whose objects are the classes of units. Sources come from the
right-unit relation {(c, l) | c·l ≠ ∅}, targets from the left-unit
relation {(c, l) | l·c ≠ ∅}; every groupoid law of the result is checked.
"""

import logging
from collections import defaultdict
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property

from relconv.core.checks import CheckResult
from relconv.core.exceptions import (
    AxiomViolationError,
    IllDefinedMultiplicationError,
    ReductionError,
    SourceNotFunctionalError,
)
from relconv.core.groupoid_table import GroupoidTable
from relconv.core.relation import (
    FiniteSet,
    Relation,
    classes_of,
    compose,
    graph,
    is_equivalence,
    symmetric_difference_witness,
)
from relconv.core.relational_groupoid import RelationalGroupoid, check_axioms, from_groupoid
from relconv.utils.logger import Log

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuotientData:
    """The L2-classes of C, the quotient map q and the quotient groupoid."""

    classes: tuple[tuple[int, ...], ...]
    q: Relation
    quotient: GroupoidTable
    object_classes: tuple[int, ...]
    right_units: Relation
    left_units: Relation

    @cached_property
    def class_of(self) -> Mapping[int, int]:
        return {g: qg for (g,), (qg,) in self.q.as_function().items()}

    def representative(self, cls: int) -> int:
        return self.classes[cls][0]

    def lift(self, cls: int) -> tuple[int, ...]:
        return self.classes[cls]

    def project(self, g: int) -> int:
        try:
            return self.class_of[g]
        except KeyError:
            raise ReductionError("element lies outside the constraint set", witness=(g,)) from None


def constraint_set(g: RelationalGroupoid) -> tuple[int, ...]:
    """C = image of L2, after checking that L2 is an equivalence on it."""
    members = g.constraint_elements
    verdict = is_equivalence(g.l2, members)
    if not verdict:
        witness = g.l2.labelled(verdict.witness) if verdict.witness else None
        raise AxiomViolationError(
            f"L2 is not {verdict.failed_property} on the constraint set", axiom="L2-equivalence", witness=witness
        )
    return members


def _unit_map(
    kind: str, relation: Relation, classes: tuple[tuple[int, ...], ...], class_of: Mapping[int, int],
    object_index: Mapping[int, int], g: RelationalGroupoid,
) -> tuple[int, ...]:
    succ = relation.successors
    out = []
    for members in classes:
        found = {object_index[class_of[u]] for c in members for (u,) in succ.get((c,), ())}
        if len(found) != 1:
            raise SourceNotFunctionalError(
                f"{kind} of class [{g.label(members[0])}] is not a single object ({len(found)} candidates)",
                witness=(g.label(members[0]),),
            )
        out.append(found.pop())
    return tuple(out)


def quotient_groupoid(g: RelationalGroupoid) -> QuotientData:
    """Build the groupoid C/L2 and the quotient relation q."""
    Log.enter("reduction", f"reducing {g.name or 'relational groupoid'}")
    members = constraint_set(g)
    classes = tuple(classes_of(g.l2, members))
    class_of = {x: i for i, cls in enumerate(classes) for x in cls}
    lbl = g.label
    morphisms = FiniteSet([f"[{lbl(cls[0])}]" for cls in classes], name=f"{g.name or 'G'}/L2")

    units = g.unit_elements
    stray = [u for u in units if u not in class_of]
    if stray:
        raise AxiomViolationError("unit lies outside the constraint set", axiom="A.6-ii-1", witness=(lbl(stray[0]),))
    object_classes = tuple(sorted({class_of[u] for u in units}))
    object_index = {cls: i for i, cls in enumerate(object_classes)}
    objects = FiniteSet([morphisms.label(cls) for cls in object_classes], name="objects")

    unit_set = set(units)
    right_units = Relation(
        (g.carrier,), (g.carrier,),
        frozenset((c, u) for c, u, _x in g.l3.tuples if u in unit_set and c in class_of),
    )
    left_units = Relation(
        (g.carrier,), (g.carrier,),
        frozenset((c, u) for u, c, _x in g.l3.tuples if u in unit_set and c in class_of),
    )
    source = _unit_map("source", right_units, classes, class_of, object_index, g)
    target = _unit_map("target", left_units, classes, class_of, object_index, g)

    mult: dict[tuple[int, int], int] = {}
    witness_of: dict[tuple[int, int], tuple[int, int, int]] = {}
    for h, k, x in g.l3.ordered:
        if h not in class_of or k not in class_of or x not in class_of:
            raise IllDefinedMultiplicationError(
                "L3 relates elements outside the constraint set", witness=(lbl(h), lbl(k), lbl(x))
            )
        key = (class_of[h], class_of[k])
        if key in mult and mult[key] != class_of[x]:
            first = witness_of[key]
            raise IllDefinedMultiplicationError(
                "product of classes depends on representatives",
                witness=tuple(lbl(i) for i in first) + (lbl(h), lbl(k), lbl(x)),
            )
        mult.setdefault(key, class_of[x])
        witness_of.setdefault(key, (h, k, x))

    inverse = g.inverse_map
    quotient = GroupoidTable(
        morphisms=morphisms,
        objects=objects,
        source=source,
        target=target,
        products=tuple(sorted((a, b, c) for (a, b), c in mult.items())),
        inverse=tuple(class_of[inverse[cls[0]]] for cls in classes),
        unit=object_classes,
    )
    quotient.validate()

    q = graph(g.carrier, morphisms, class_of)
    logger.debug("Quotient of %s: %d classes over %d objects", g.name, len(classes), len(objects))
    Log.exit("reduction", f"{len(classes)} classes, {len(objects)} objects")
    return QuotientData(
        classes=classes,
        q=q,
        quotient=quotient,
        object_classes=object_classes,
        right_units=right_units,
        left_units=left_units,
    )


def target_source_duality(g: RelationalGroupoid, qd: QuotientData) -> CheckResult:
    """Right units are left units conjugated by I, and t(q(c)) = s(q(I(c)))."""
    name = "target-source-duality"
    conjugated = compose(compose(g.involution, qd.left_units), g.involution)
    witness = symmetric_difference_witness(qd.right_units, conjugated)
    if witness is not None:
        return CheckResult.fail(name, qd.right_units.labelled(witness), "right units differ from I∘left units∘I")
    quotient = qd.quotient
    for c in g.constraint_elements:
        qc = qd.project(c)
        if quotient.target[qc] != quotient.source[quotient.inverse[qc]]:
            return CheckResult.fail(name, (g.label(c),), "target differs from source of the inverse")
    return CheckResult.ok(name)


def fiber_projection_check(g: RelationalGroupoid, qd: QuotientData) -> CheckResult:
    """For g ∈ C, q×q maps G2_g onto the quotient fiber of q(g)."""
    name = "fiber-projection"
    quotient = qd.quotient
    quotient_fibers: dict[int, set[tuple[int, int]]] = defaultdict(set)
    for a, b, c in quotient.products:
        quotient_fibers[c].add((a, b))
    for x in g.constraint_elements:
        projected = {(qd.project(h), qd.project(k)) for h, k in g.fiber(x)}
        if projected != quotient_fibers[qd.project(x)]:
            return CheckResult.fail(name, (g.label(x),), "projected fiber differs from the quotient fiber")
    return CheckResult.ok(name)


def verify_q_morphism(g: RelationalGroupoid, qd: QuotientData) -> CheckResult:
    """Check that graph(q) is a relational subgroupoid of G × quotient.

    The graph must be closed under I×I, every L-triple over C must lift to
    an L-triple of the product, and the restricted structure must satisfy
    the axioms.
    """
    name = "q-morphism"
    embedded = from_groupoid(qd.quotient, check=False)
    q_map = {x: y for (x,), (y,) in qd.q.as_function().items()}
    points = sorted(q_map.items())
    position = {pt: i for i, pt in enumerate(points)}
    lbl = g.label
    carrier = FiniteSet([f"({lbl(x)},{embedded.label(y)})" for x, y in points], name="graph(q)")

    inverse = g.inverse_map
    quotient_inverse = qd.quotient.inverse
    involution = []
    for x, y in points:
        image_point = (inverse[x], quotient_inverse[y])
        if image_point not in position:
            return CheckResult.fail(name, (lbl(x),), "graph of q is not closed under the involution")
        involution.append(position[image_point])

    quotient_triples = embedded.triples.tuples
    lifted = []
    for a, b, c in g.triples.ordered:
        if a not in q_map or b not in q_map or c not in q_map:
            continue
        if (q_map[a], q_map[b], q_map[c]) not in quotient_triples:
            return CheckResult.fail(name, (lbl(a), lbl(b), lbl(c)), "L-triple does not map to an L-triple")
        lifted.append((position[(a, q_map[a])], position[(b, q_map[b])], position[(c, q_map[c])]))

    sub = RelationalGroupoid(
        carrier=carrier,
        triples=Relation((carrier, carrier), (carrier,), frozenset(lifted)),
        involution=graph(carrier, carrier, involution),
        name="graph(q)",
    )
    failure = check_axioms(sub).first_failure
    if failure is not None:
        return CheckResult.fail(name, failure.witness, f"restricted structure fails {failure.name}")
    return CheckResult.ok(name)
