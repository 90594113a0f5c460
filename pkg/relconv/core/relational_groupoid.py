"""Relational groupoids: a carrier G, a cyclic relation L ⊆ G³ and an involution I.

The derived relations are computed with the relation algebra of
``relconv.core.relation``:

* ``L3 = I∘L``, the multiplication graph,
* ``L1 = {k | (g, I(g), k) ∈ L3}``, the units,
* ``L2 = L3∘(L1 × id)``, the unit equivalence,
* ``C``, the image of ``L2`` (the constraint set).
"""

import dataclasses
import logging
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Union

from relconv.core.checks import CheckResult
from relconv.core.exceptions import (
    AxiomViolationError,
    InvalidArgumentError,
    NotAnEquivalenceError,
    NotASubgroupError,
    NotNormalError,
)
from relconv.core.groupoid_table import GroupoidTable
from relconv.core.relation import (
    FiniteSet,
    IndexTuple,
    Relation,
    compose,
    dagger,
    graph,
    identity,
    image,
    is_equivalence,
    product,
    subset,
    symmetric_difference_witness,
)
from relconv.core.settings import get_settings
from relconv.runner.batch_processor import JobInfo, ThreadBatchProcessor
from relconv.utils.logger import Log

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DerivedRelations:
    l1: Relation
    l2: Relation
    l3: Relation
    constraint: Relation


@dataclass(frozen=True)
class RelationalGroupoid:
    """A carrier with its cyclic relation (as G×G ↛ G) and involution (as G ↛ G)."""

    carrier: FiniteSet
    triples: Relation
    involution: Relation
    name: str = ""
    validated: bool = field(default=False, compare=False)

    @cached_property
    def derived(self) -> DerivedRelations:
        return derive_relations(self)

    @property
    def l1(self) -> Relation:
        return self.derived.l1

    @property
    def l2(self) -> Relation:
        return self.derived.l2

    @property
    def l3(self) -> Relation:
        return self.derived.l3

    @cached_property
    def constraint_elements(self) -> tuple[int, ...]:
        return tuple(t[0] for t in self.derived.constraint.ordered)

    @cached_property
    def unit_elements(self) -> tuple[int, ...]:
        return tuple(t[0] for t in self.l1.ordered)

    @cached_property
    def inverse_map(self) -> tuple[int, ...]:
        """I as a tuple; elements without a unique image map to themselves."""
        func = self.involution.as_function()
        return tuple(func.get((g,), (g,))[0] for g in self.carrier)

    @cached_property
    def _fibers(self) -> Mapping[int, tuple[tuple[int, int], ...]]:
        table: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for h, k, g in self.l3.ordered:
            table[g].append((h, k))
        return {g: tuple(sorted(pairs)) for g, pairs in table.items()}

    def fiber(self, k: int) -> tuple[tuple[int, int], ...]:
        """The pairs (h, l) with (h, l, k) ∈ L3, sorted."""
        return self._fibers.get(k, ())

    def fiber_relation(self, k: int) -> Relation:
        """G2_k as a subset of G×G."""
        return subset((self.carrier, self.carrier), self.fiber(k))

    def set_product(self, a: int, b: int) -> tuple[int, ...]:
        """ab = {x | (a, b, x) ∈ L3}."""
        return tuple(x for (x,) in self.l3.successors.get((a, b), ()))

    def index(self, label: str) -> int:
        return self.carrier.index(label)

    def label(self, g: int) -> str:
        return self.carrier.label(g)

    def checked(self) -> "RelationalGroupoid":
        """Return a validated copy, raising AxiomViolationError on the first failing axiom."""
        if self.validated:
            return self
        report = check_axioms(self)
        failure = report.first_failure
        if failure is not None:
            raise AxiomViolationError(
                f"{self.name or 'relational groupoid'} fails axiom {failure.name}: {failure.detail}",
                axiom=failure.name,
                witness=failure.witness,
            )
        checked = dataclasses.replace(self, validated=True)
        checked.__dict__["derived"] = self.derived
        return checked


def derive_relations(g: RelationalGroupoid) -> DerivedRelations:
    """Compute L1, L2, L3 and the constraint set C."""
    G = g.carrier
    l3 = compose(g.triples, g.involution)
    graph_i = subset((G, G), (t for t in g.involution.tuples))
    l1 = compose(graph_i, l3)
    l2 = compose(product(l1, identity(G)), l3)
    constraint = image(l2)
    logger.debug(
        "Derived relations for %s: |L1|=%d |L2|=%d |L3|=%d |C|=%d",
        g.name or "groupoid",
        len(l1),
        len(l2),
        len(l3),
        len(constraint),
    )
    return DerivedRelations(l1=l1, l2=l2, l3=l3, constraint=constraint)


# ============================================================================
# Axiom checks
# ============================================================================


AxiomResult = CheckResult


@dataclass(frozen=True)
class AxiomReport:
    groupoid: str
    results: tuple[AxiomResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def first_failure(self) -> Optional[AxiomResult]:
        return next((r for r in self.results if not r.passed), None)

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def _equality(name: str, lhs: Relation, rhs: Relation, what: str) -> AxiomResult:
    witness = symmetric_difference_witness(lhs, rhs)
    if witness is None:
        return AxiomResult(name, True)
    side = "left" if witness in lhs else "right"
    return AxiomResult(name, False, lhs.labelled(witness), f"{what}: tuple only on the {side} side")


def _first_failure(name: str, *checks: AxiomResult) -> AxiomResult:
    for c in checks:
        if not c.passed:
            return dataclasses.replace(c, name=name)
    return AxiomResult(name, True)


def _a1(g: RelationalGroupoid) -> AxiomResult:
    rotated = g.triples.with_tuples((h, k, x) for x, h, k in g.triples.tuples)
    return _equality("A.1", g.triples, rotated, "L is not cyclically symmetric")


def _a2(g: RelationalGroupoid) -> AxiomResult:
    if not g.involution.is_function():
        counts: dict[int, int] = defaultdict(int)
        for (x, _y) in g.involution.tuples:
            counts[x] += 1
        bad = min(x for x in g.carrier if counts[x] != 1)
        return AxiomResult("A.2", False, (g.label(bad),), "I is not a total function")
    return _equality("A.2", compose(g.involution, g.involution), identity(g.carrier), "I∘I differs from id")


def _a3(g: RelationalGroupoid) -> AxiomResult:
    G = g.carrier
    swap = Relation((G, G), (G, G), frozenset((a, b, b, a) for a in G for b in G))
    rhs = compose(compose(product(g.involution, g.involution), swap), g.triples)
    return _equality("A.3", g.l3, rhs, "I∘L differs from L∘T∘(I×I)")


def _a4(g: RelationalGroupoid) -> AxiomResult:
    G = g.carrier
    lhs = compose(product(g.l3, identity(G)), g.l3)
    rhs = compose(product(identity(G), g.l3), g.l3)
    return _equality("A.4", lhs, rhs, "L3 is not associative")


def _a5(g: RelationalGroupoid) -> AxiomResult:
    return _equality("A.5", compose(product(g.l1, g.l1), g.l3), g.l1, "L3∘(L1×L1) differs from L1")


def _a6_i(g: RelationalGroupoid) -> AxiomResult:
    rhs = compose(product(identity(g.carrier), g.l1), g.l3)
    return _equality("A.6-i", g.l2, rhs, "L3∘(L1×id) differs from L3∘(id×L1)")


def _a6_ii_1(g: RelationalGroupoid) -> AxiomResult:
    return _equality("A.6-ii-1", compose(g.l1, g.l2), g.l1, "L2 does not leave L1 invariant")


def _a6_ii_2(g: RelationalGroupoid) -> AxiomResult:
    return _equality("A.6-ii-2", compose(g.l2, g.l2), g.l2, "L2 does not leave L2 invariant")


def _a6_ii_3(g: RelationalGroupoid) -> AxiomResult:
    return _first_failure(
        "A.6-ii-3",
        _equality("A.6-ii-3", compose(g.l3, g.l2), g.l3, "L2∘L3 differs from L3"),
        _equality("A.6-ii-3", compose(product(g.l2, g.l2), g.l3), g.l3, "L3∘(L2×L2) differs from L3"),
    )


def _a6_iii(g: RelationalGroupoid) -> AxiomResult:
    return _first_failure(
        "A.6-iii",
        _equality("A.6-iii", compose(g.l2, g.involution), compose(g.involution, g.l2), "I∘L2 differs from L2∘I"),
        _equality("A.6-iii", dagger(g.l2), g.l2, "L2 is not symmetric"),
    )


AXIOMS: tuple[tuple[str, Callable[[RelationalGroupoid], AxiomResult]], ...] = (
    ("A.1", _a1),
    ("A.2", _a2),
    ("A.3", _a3),
    ("A.4", _a4),
    ("A.5", _a5),
    ("A.6-i", _a6_i),
    ("A.6-ii-1", _a6_ii_1),
    ("A.6-ii-2", _a6_ii_2),
    ("A.6-ii-3", _a6_ii_3),
    ("A.6-iii", _a6_iii),
)


def check_axioms(g: RelationalGroupoid, threads: Optional[int] = None) -> AxiomReport:
    """Run every sub-axiom and collect one result per entry of AXIOMS."""
    threads = get_settings().threads if threads is None else threads
    Log.enter("axioms", f"checking {g.name or 'relational groupoid'} ({len(g.carrier)} elements)")
    _ = g.derived
    if threads <= 1:
        results = [check(g) for _name, check in AXIOMS]
    else:
        collected: dict[int, AxiomResult] = {}
        processor = ThreadBatchProcessor(max_threads=threads)
        for position, (name, check) in enumerate(AXIOMS):
            processor.queue(position, check, g)

        def store(job: JobInfo) -> None:
            if job.ret_val != 0:
                collected[job.tag] = AxiomResult(AXIOMS[job.tag][0], False, None, f"check crashed: {job.stderr}")
            else:
                collected[job.tag] = job.result

        processor.wait(store)
        results = [collected[i] for i in range(len(AXIOMS))]
    for r in results:
        Log.msg(lambda r=r: f"{r.name}: {'pass' if r.passed else 'FAIL ' + str(r.witness)}")
    Log.exit("axioms")
    return AxiomReport(g.name, tuple(results))


# ============================================================================
# Constructors
# ============================================================================


def _build(
    carrier: FiniteSet, l3_triples: Iterable[IndexTuple], inverse: Sequence[int], name: str
) -> RelationalGroupoid:
    triples = frozenset((a, b, inverse[c]) for a, b, c in l3_triples)
    return RelationalGroupoid(
        carrier=carrier,
        triples=Relation((carrier, carrier), (carrier,), triples),
        involution=graph(carrier, carrier, inverse),
        name=name,
    )


def from_structure_relations(
    carrier: FiniteSet, inverse: Union[Sequence[int], Relation], l3: Relation, name: str = ""
) -> RelationalGroupoid:
    """Rebuild L = I∘L3 from the involution and the multiplication graph (unchecked)."""
    involution = inverse if isinstance(inverse, Relation) else graph(carrier, carrier, inverse)
    return RelationalGroupoid(carrier=carrier, triples=compose(l3, involution), involution=involution, name=name)


def _resolve(table: GroupoidTable, members: Iterable[Union[str, int]]) -> list[int]:
    return sorted({m if isinstance(m, int) else table.morphisms.index(m) for m in members})


def from_group_and_normal_subgroup(
    table: GroupoidTable, members: Iterable[Union[str, int]], name: str = "", check: bool = True
) -> RelationalGroupoid:
    """The relational group of G with a normal subgroup H: L3 = {(a, b, abh) | h ∈ H}."""
    if not table.is_group:
        raise InvalidArgumentError("a relational group needs a one-object groupoid table")
    h = _resolve(table, members)
    hs = set(h)
    lbl = table.label
    e = table.unit[0]
    if e not in hs:
        raise NotASubgroupError("subset does not contain the identity", witness=(lbl(e),))
    for a in h:
        if table.inverse[a] not in hs:
            raise NotASubgroupError("subset is not closed under inverses", witness=(lbl(a),))
        for b in h:
            if table.mult[(a, b)] not in hs:
                raise NotASubgroupError("subset is not closed under multiplication", witness=(lbl(a), lbl(b)))
    for g in table.morphisms:
        for x in h:
            conj = table.mult[(table.mult[(g, x)], table.inverse[g])]
            if conj not in hs:
                raise NotNormalError("subgroup is not normal", witness=(lbl(g), lbl(x)))

    n = len(table.morphisms)
    l3 = ((a, b, table.mult[(table.mult[(a, b)], x)]) for a in range(n) for b in range(n) for x in h)
    result = _build(table.morphisms, l3, table.inverse, name or f"{table.morphisms.name}/H")
    logger.debug("Relational group %s with |H|=%d", result.name, len(h))
    return result.checked() if check else result


def from_groupoid(table: GroupoidTable, name: str = "", check: bool = True) -> RelationalGroupoid:
    """Embed an honest groupoid: L = Graph(I∘m)."""
    table.validate()
    result = _build(table.morphisms, table.products, table.inverse, name or table.morphisms.name)
    return result.checked() if check else result


def relational_pair_groupoid(x: FiniteSet, r: Relation, name: str = "", check: bool = True) -> RelationalGroupoid:
    """Pairs of points composed up to an equivalence r: units L1 = r, unit equivalence L2 = r×r."""
    verdict = is_equivalence(r)
    if not verdict:
        witness = r.labelled(verdict.witness) if verdict.witness else None
        raise NotAnEquivalenceError(f"relation is not {verdict.failed_property}", witness=witness)
    k = len(x)
    carrier = FiniteSet([f"({a},{b})" for a in x.labels for b in x.labels], name=f"{x.name or 'X'}²")

    def idx(a: int, b: int) -> int:
        return a * k + b

    related = r.successors
    cls = {a: [b for (b,) in related.get((a,), ())] for a in range(k)}
    l3 = (
        (idx(a, b), idx(b2, c), idx(a2, c2))
        for a in range(k)
        for b in range(k)
        for b2 in cls[b]
        for c in range(k)
        for a2 in cls[a]
        for c2 in cls[c]
    )
    inverse = [idx(b, a) for a in range(k) for b in range(k)]
    result = _build(carrier, l3, inverse, name or f"pair({x.name or 'X'})")
    return result.checked() if check else result
