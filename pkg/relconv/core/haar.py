"""Right Haar systems on groupoids and relational Haar systems on fibers.

A relational Haar system assigns to every element g a measure μ_g on its
fiber G2_g. It is checked against the quotient groupoid: pushforwards
along q agree on L2-classes, they form a right Haar system on the
quotient (after projecting each quotient fiber onto its second factor),
and μ_g disintegrates along q. Weights are exact rationals throughout.
"""

import logging
from collections import defaultdict
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from relconv.core.checks import CheckResult
from relconv.core.exceptions import HaarSystemError
from relconv.core.groupoid_table import GroupoidTable
from relconv.core.measure import Measure
from relconv.core.reduction import QuotientData, quotient_groupoid
from relconv.core.relational_groupoid import RelationalGroupoid, from_groupoid
from relconv.utils.logger import Log

logger = logging.getLogger(__name__)

Pair = tuple[int, int]


# ============================================================================
# Right Haar systems
# ============================================================================


@dataclass(frozen=True)
class RightHaarSystem:
    """One measure per object x, supported on the source fiber G_x."""

    table: GroupoidTable
    measures: tuple[Measure[int], ...]

    def __post_init__(self) -> None:
        if len(self.measures) != len(self.table.objects):
            raise HaarSystemError("a right Haar system needs one measure per object")
        for x, m in enumerate(self.measures):
            fiber = set(self.table.s_fiber(x))
            outside = [p for p in m.points() if p not in fiber]
            if outside:
                raise HaarSystemError(
                    f"measure at object {self.table.objects.label(x)} charges "
                    f"{self.table.label(outside[0])} outside its source fiber"
                )

    def measure(self, x: int) -> Measure[int]:
        return self.measures[x]

    @classmethod
    def normalized_counting(cls, table: GroupoidTable) -> "RightHaarSystem":
        return cls(table, tuple(Measure.normalized_counting(table.s_fiber(x)) for x in table.objects))

    @classmethod
    def counting(cls, table: GroupoidTable) -> "RightHaarSystem":
        return cls(table, tuple(Measure.counting(table.s_fiber(x)) for x in table.objects))


def check_right_haar(table: GroupoidTable, h: RightHaarSystem) -> CheckResult:
    """Right invariance: for γ: x → y, pushing μ_y along η ↦ η∘γ gives μ_x.

    Continuity of the family is automatic on finite discrete carriers.
    """
    name = "right-haar"
    for gamma in table.morphisms:
        x, y = table.source[gamma], table.target[gamma]
        pushed = h.measure(y).pushforward(lambda eta, gamma=gamma: table.mult[(eta, gamma)])
        if pushed != h.measure(x):
            return CheckResult.fail(name, (table.label(gamma),), "right translation does not preserve the measure")
    return CheckResult.ok(name)


# ============================================================================
# Relational Haar systems
# ============================================================================


@dataclass(frozen=True)
class RelationalHaarSystem:
    """Measures μ_g on the fibers G2_g; absent elements carry the zero measure."""

    groupoid: RelationalGroupoid
    measures: Mapping[int, Measure[Pair]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        g = self.groupoid
        for x, m in self.measures.items():
            fiber = set(g.fiber(x))
            for pair in m.points():
                if pair not in fiber:
                    raise HaarSystemError(
                        f"μ_{g.label(x)} charges ({g.label(pair[0])},{g.label(pair[1])}) outside the fiber of "
                        f"{g.label(x)}"
                    )

    def measure(self, g: int) -> Measure[Pair]:
        return self.measures.get(g, Measure())


@dataclass(frozen=True)
class Disintegration:
    """Base measure on quotient pairs and probability conditionals over each charged class pair."""

    base: Measure[Pair]
    conditionals: Mapping[Pair, Measure[Pair]]


def pair_projection(qd: QuotientData) -> Callable[[Pair], Pair]:
    """q_g: (h, k) ↦ (q(h), q(k))."""
    return lambda pair: (qd.project(pair[0]), qd.project(pair[1]))


def disintegrate(m: Measure[Pair], q_g: Callable[[Pair], Pair]) -> Disintegration:
    """Split m into its pushforward along q_g and normalized restrictions to the preimages."""
    base = m.pushforward(q_g)
    groups: dict[Pair, dict[Pair, Fraction]] = defaultdict(dict)
    for pair, w in m.items():
        groups[q_g(pair)][pair] = w
    conditionals = {
        cls: Measure({pair: w / base.weight(cls) for pair, w in weights.items()}) for cls, weights in groups.items()
    }
    return Disintegration(base=base, conditionals=conditionals)


def reassemble(d: Disintegration) -> Measure[Pair]:
    total: Measure[Pair] = Measure()
    for cls, cond in d.conditionals.items():
        total = total + cond.scaled(d.base.weight(cls))
    return total


@dataclass(frozen=True)
class HaarReport:
    results: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(self.results)

    def __getitem__(self, name: str) -> CheckResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def _quotient_fiber_projection(qd: QuotientData, base: Measure[Pair]) -> Measure[int]:
    return base.marginal(1)


def quotient_measures(g: RelationalGroupoid, rhs: RelationalHaarSystem, qd: QuotientData) -> dict[int, Measure[Pair]]:
    """ν_ḡ := (q_g)_*μ_g, read off at the class representative."""
    proj = pair_projection(qd)
    return {cls: rhs.measure(qd.representative(cls)).pushforward(proj) for cls in range(len(qd.classes))}


def quotient_haar(
    g: RelationalGroupoid, rhs: RelationalHaarSystem, qd: Optional[QuotientData] = None
) -> RightHaarSystem:
    """The right Haar system on the quotient induced by a relational Haar system.

    Each ν_ḡ is projected to the second factor, which identifies the quotient
    fiber of ḡ with the source fiber of ḡ; classes with the same source must
    agree.
    """
    qd = qd or quotient_groupoid(g)
    quotient = qd.quotient
    chosen: dict[int, Measure[int]] = {}
    first_class: dict[int, int] = {}
    for cls, nu in quotient_measures(g, rhs, qd).items():
        x = quotient.source[cls]
        projected = _quotient_fiber_projection(qd, nu)
        if x in chosen and chosen[x] != projected:
            raise HaarSystemError(
                f"quotient measures of {quotient.label(first_class[x])} and {quotient.label(cls)} "
                "disagree on their common source fiber"
            )
        chosen.setdefault(x, projected)
        first_class.setdefault(x, cls)
    return RightHaarSystem(quotient, tuple(chosen.get(x, Measure()) for x in quotient.objects))


def check_relational_haar(
    g: RelationalGroupoid, rhs: RelationalHaarSystem, qd: Optional[QuotientData] = None
) -> HaarReport:
    """Check vanishing off C and conditions (i) to (iii)."""
    qd = qd or quotient_groupoid(g)
    Log.enter("haar", f"checking relational Haar system on {g.name or 'groupoid'}")
    lbl = g.label
    results: list[CheckResult] = []

    constraint = set(g.constraint_elements)
    stray = [x for x in g.carrier if x not in constraint and not rhs.measure(x).is_zero()]
    if stray:
        results.append(CheckResult.fail("zero-off-C", (lbl(stray[0]),), "nonzero measure outside C"))
    else:
        results.append(CheckResult.ok("zero-off-C"))

    proj = pair_projection(qd)
    agreement = CheckResult.ok("pushforward-agreement")
    for members in qd.classes:
        ref = rhs.measure(members[0]).pushforward(proj)
        for other in members[1:]:
            if rhs.measure(other).pushforward(proj) != ref:
                agreement = CheckResult.fail(
                    "pushforward-agreement", (lbl(members[0]), lbl(other)), "pushforwards along q differ"
                )
                break
        if not agreement:
            break
    results.append(agreement)

    try:
        nu = quotient_haar(g, rhs, qd)
        invariant = check_right_haar(qd.quotient, nu)
        results.append(
            CheckResult.ok("quotient-haar")
            if invariant
            else CheckResult.fail("quotient-haar", invariant.witness, "induced quotient system is not right invariant")
        )
    except HaarSystemError as e:
        results.append(CheckResult.fail("quotient-haar", None, e.message))

    disintegration = CheckResult.ok("disintegration")
    for x in sorted(constraint):
        mu = rhs.measure(x)
        d = disintegrate(mu, proj)
        if reassemble(d) != mu or any(not c.is_probability() for c in d.conditionals.values()):
            disintegration = CheckResult.fail("disintegration", (lbl(x),), "disintegration does not reconstruct μ")
            break
    results.append(disintegration)

    for r in results:
        Log.msg(lambda r=r: f"{r.name}: {'pass' if r.passed else 'FAIL'}")
    Log.exit("haar")
    return HaarReport(tuple(results))


# ============================================================================
# Classifiers
# ============================================================================


@dataclass(frozen=True)
class SplitResult:
    """Classifier verdict with the extracted τ family on success.

    For ``is_split`` the family is keyed by (element, class); for
    ``is_strongly_split`` by class alone.
    """

    holds: bool
    witness: Optional[tuple[str, ...]] = None
    detail: str = ""
    tau: Mapping[object, Measure[int]] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds


def is_l2_invariant(g: RelationalGroupoid, rhs: RelationalHaarSystem) -> CheckResult:
    """μ_g = μ_h whenever (g, h) ∈ L2."""
    for a, b in g.l2.ordered:
        if a < b and rhs.measure(a) != rhs.measure(b):
            return CheckResult.fail("l2-invariant", (g.label(a), g.label(b)), "measures of L2-related elements differ")
    return CheckResult.ok("l2-invariant")


def is_split(g: RelationalGroupoid, rhs: RelationalHaarSystem, qd: Optional[QuotientData] = None) -> SplitResult:
    """Every conditional is the product of its marginals, and marginals agree per (g, class)."""
    qd = qd or quotient_groupoid(g)
    proj = pair_projection(qd)
    qlabel = qd.quotient.label
    tau: dict[object, Measure[int]] = {}
    for x in g.constraint_elements:
        d = disintegrate(rhs.measure(x), proj)
        for (a, b), cond in sorted(d.conditionals.items()):
            first, second = cond.marginal(0), cond.marginal(1)
            if Measure.product(first, second) != cond:
                return SplitResult(
                    False, (g.label(x), qlabel(a), qlabel(b)), "conditional is not a product of its marginals"
                )
            for cls, marginal in ((a, first), (b, second)):
                known = tau.get((x, cls))
                if known is not None and known != marginal:
                    return SplitResult(
                        False, (g.label(x), qlabel(cls)), "marginals over the same class differ between fibers"
                    )
                tau[(x, cls)] = marginal
    return SplitResult(True, tau=tau)


def is_strongly_split(
    g: RelationalGroupoid, rhs: RelationalHaarSystem, qd: Optional[QuotientData] = None
) -> SplitResult:
    """Split with a family τ that does not depend on the element."""
    qd = qd or quotient_groupoid(g)
    split = is_split(g, rhs, qd)
    if not split:
        return split
    qlabel = qd.quotient.label
    tau: dict[object, Measure[int]] = {}
    owner: dict[int, int] = {}
    for key, marginal in sorted(split.tau.items(), key=lambda item: item[0]):  # type: ignore[arg-type,return-value]
        x, cls = key  # type: ignore[misc]
        if cls in tau and tau[cls] != marginal:
            return SplitResult(
                False,
                (g.label(owner[cls]), g.label(x), qlabel(cls)),
                "τ over the same class depends on the element",
            )
        tau.setdefault(cls, marginal)
        owner.setdefault(cls, x)
    return SplitResult(True, tau=tau)


# ============================================================================
# Constructors
# ============================================================================


ConditionalFactory = Callable[[int, int, int], Measure[Pair]]


def build_from_conditionals(
    g: RelationalGroupoid,
    nu: RightHaarSystem,
    conditional: ConditionalFactory,
    qd: Optional[QuotientData] = None,
) -> RelationalHaarSystem:
    """μ_x(h, k) = ν_{s(q x)}(q k) · conditional(x, q h, q k)(h, k) on the fiber of x ∈ C."""
    qd = qd or quotient_groupoid(g)
    quotient = qd.quotient
    if nu.table.morphisms != quotient.morphisms:
        raise HaarSystemError("ν must live on the quotient groupoid")
    fibers: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for a, b, c in quotient.products:
        fibers[c].append((a, b))
    measures: dict[int, Measure[Pair]] = {}
    for x in g.constraint_elements:
        gbar = qd.project(x)
        fiber = set(g.fiber(x))
        total: dict[Pair, Fraction] = {}
        for a, b in fibers[gbar]:
            base = nu.measure(quotient.source[gbar]).weight(b)
            if base == 0:
                continue
            cond = conditional(x, a, b)
            if not cond.is_probability():
                raise HaarSystemError(f"conditional at {g.label(x)} over class pair ({a},{b}) is not a probability")
            for (h, k), w in cond.items():
                if (h, k) not in fiber or qd.project(h) != a or qd.project(k) != b:
                    raise HaarSystemError(
                        f"conditional at {g.label(x)} charges ({g.label(h)},{g.label(k)}) outside its class pair"
                    )
                total[(h, k)] = base * w
        measures[x] = Measure(total)
    return RelationalHaarSystem(g, measures)


def _check_tau(qd: QuotientData, cls: int, tau: Measure[int]) -> None:
    if not tau.is_probability():
        raise HaarSystemError(f"τ over class {qd.quotient.label(cls)} is not a probability measure")
    members = set(qd.lift(cls))
    if any(p not in members for p in tau.points()):
        raise HaarSystemError(f"τ over class {qd.quotient.label(cls)} charges points outside the class")


def build_split(
    g: RelationalGroupoid,
    nu: RightHaarSystem,
    tau_for: Callable[[int, int], Measure[int]],
    qd: Optional[QuotientData] = None,
) -> RelationalHaarSystem:
    """Conditionals τ^x_{q h} × τ^x_{q k}, with τ^x given per element x and class."""
    qd = qd or quotient_groupoid(g)

    def conditional(x: int, a: int, b: int) -> Measure[Pair]:
        first, second = tau_for(x, a), tau_for(x, b)
        _check_tau(qd, a, first)
        _check_tau(qd, b, second)
        return Measure.product(first, second)

    return build_from_conditionals(g, nu, conditional, qd)


def build_strongly_split(
    g: RelationalGroupoid,
    nu: RightHaarSystem,
    tau: Mapping[int, Measure[int]],
    qd: Optional[QuotientData] = None,
) -> RelationalHaarSystem:
    """μ_g(h, k) = ν_ḡ(q h, q k) · τ_{q h}(h) · τ_{q k}(k) with one τ per class."""
    qd = qd or quotient_groupoid(g)
    for cls, measure in tau.items():
        _check_tau(qd, cls, measure)

    def tau_for(_x: int, cls: int) -> Measure[int]:
        if cls not in tau:
            raise HaarSystemError(f"no τ given for class {qd.quotient.label(cls)}")
        return tau[cls]

    return build_split(g, nu, tau_for, qd)


def representative_tau(qd: QuotientData) -> dict[int, Measure[int]]:
    """Dirac measures at the canonical representatives."""
    return {cls: Measure.dirac(qd.representative(cls)) for cls in range(len(qd.classes))}


def counting_tau(qd: QuotientData) -> dict[int, Measure[int]]:
    """Normalized counting measure on every class."""
    return {cls: Measure.normalized_counting(members) for cls, members in enumerate(qd.classes)}


def induced_relational_haar(
    table: GroupoidTable, haar: RightHaarSystem
) -> tuple[RelationalGroupoid, RelationalHaarSystem]:
    """Embed a groupoid and carry μ_x to the fibers: μ_γ(γ∘β⁻¹, β) = μ_{s(γ)}(β)."""
    g = from_groupoid(table)
    measures: dict[int, Measure[Pair]] = {}
    for gamma in table.morphisms:
        mu = haar.measure(table.source[gamma])
        measures[gamma] = Measure(
            {(a, b): mu.weight(b) for a, b in g.fiber(gamma)}
        )
    return g, RelationalHaarSystem(g, measures)


def saturation_invariance(
    g: RelationalGroupoid,
    rhs: RelationalHaarSystem,
    qd: Optional[QuotientData] = None,
    pairs: Optional[Sequence[tuple[int, int]]] = None,
) -> CheckResult:
    """μ_x(A) = μ_k((id×R_h)∘A) for saturated A (whole class pairs) and k ∈ xh."""
    name = "saturation-invariance"
    qd = qd or quotient_groupoid(g)
    proj = pair_projection(qd)
    todo = pairs if pairs is not None else [(x, h) for x in g.carrier for h in g.carrier]
    for x, h in todo:
        product_set = g.set_product(x, h)
        if not product_set:
            continue
        by_class: dict[Pair, list[Pair]] = defaultdict(list)
        for pair in g.fiber(x):
            by_class[proj(pair)].append(pair)
        for k in product_set:
            for cls_pair, block in sorted(by_class.items()):
                moved = {(a, z2) for a, z1 in block for z2 in g.set_product(z1, h)}
                if rhs.measure(x).measure_of(block) != rhs.measure(k).measure_of(moved):
                    return CheckResult.fail(
                        name, (g.label(x), g.label(h), g.label(k)), f"mass of class pair {cls_pair} not preserved"
                    )
    return CheckResult.ok(name)
