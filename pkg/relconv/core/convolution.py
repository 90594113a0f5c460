"""Convolution algebras of relational groupoids and of honest groupoids.

Functions on a finite carrier are ``AlgebraElement`` values with exact
Gaussian-rational coefficients. The relational product is

    (f1⋆f2)(k) = Σ_{(h, l) ∈ G2_k} f1(h) f2(l) μ_k(h, l)

and the groupoid product is

    (f1⋆f2)(γ) = Σ_{η ∈ G_{s(γ)}} f1(γ∘η⁻¹) f2(η) μ_{s(γ)}(η).

Associativity checks scan the delta basis once through a precomputed
product table and extend by bilinearity.
"""

import logging
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Union

from relconv.core.checks import CheckResult
from relconv.core.exceptions import AlgebraError, NotInvariantError
from relconv.core.groupoid_table import GroupoidTable
from relconv.core.haar import RelationalHaarSystem, RightHaarSystem, quotient_haar
from relconv.core.measure import Measure
from relconv.core.reduction import QuotientData, quotient_groupoid
from relconv.core.relation import FiniteSet
from relconv.core.relational_groupoid import RelationalGroupoid
from relconv.core.scalars import ONE, ZERO, Scalar, conjugate, format_scalar, is_zero, scalar
from relconv.core.settings import get_settings
from relconv.runner.batch_processor import JobInfo, ThreadBatchProcessor
from relconv.utils.logger import Log

logger = logging.getLogger(__name__)

Coefficient = Union[int, Fraction, Scalar]


def _coerce(value: Coefficient) -> Scalar:
    if isinstance(value, (int, Fraction)):
        return scalar(value)
    return value


class AlgebraElement:
    """A function from a finite carrier to exact complex scalars; unset points are 0."""

    __slots__ = ("_values", "carrier")

    def __init__(self, carrier: FiniteSet, values: Optional[Mapping[int, Coefficient]] = None) -> None:
        self.carrier = carrier
        cleaned: dict[int, Scalar] = {}
        for point, value in (values or {}).items():
            if not 0 <= point < len(carrier):
                raise AlgebraError(f"point {point} is outside the carrier {carrier.name or ''}")
            z = _coerce(value)
            if not is_zero(z):
                cleaned[point] = z
        self._values = cleaned

    @classmethod
    def zero(cls, carrier: FiniteSet) -> "AlgebraElement":
        return cls(carrier)

    @classmethod
    def delta(cls, carrier: FiniteSet, point: int, coefficient: Coefficient = 1) -> "AlgebraElement":
        return cls(carrier, {point: coefficient})

    @classmethod
    def indicator(cls, carrier: FiniteSet, points: Iterable[int]) -> "AlgebraElement":
        return cls(carrier, dict.fromkeys(points, ONE))

    @classmethod
    def constant(cls, carrier: FiniteSet, value: Coefficient = 1) -> "AlgebraElement":
        return cls(carrier, dict.fromkeys(carrier, value))

    def __getitem__(self, point: int) -> Scalar:
        return self._values.get(point, ZERO)

    def items(self) -> list[tuple[int, Scalar]]:
        return sorted(self._values.items())

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._values))

    def __iter__(self) -> Iterator[int]:
        return iter(self.support())

    def is_zero(self) -> bool:
        return not self._values

    def _check_carrier(self, other: "AlgebraElement") -> None:
        if other.carrier != self.carrier:
            raise AlgebraError("functions live on different carriers")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_carrier(other)
        total = dict(self._values)
        for p, z in other._values.items():
            total[p] = total.get(p, ZERO) + z
        return AlgebraElement(self.carrier, total)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.carrier, {p: -z for p, z in self._values.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, c: Coefficient) -> "AlgebraElement":
        factor = _coerce(c)
        return AlgebraElement(self.carrier, {p: z * factor for p, z in self._values.items()})

    def __rmul__(self, c: Coefficient) -> "AlgebraElement":
        return self.scale(c)

    def restrict(self, points: Iterable[int]) -> "AlgebraElement":
        keep = set(points)
        return AlgebraElement(self.carrier, {p: z for p, z in self._values.items() if p in keep})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.carrier == other.carrier and self._values == other._values

    def __hash__(self) -> int:
        return hash((self.carrier, frozenset((p, str(z)) for p, z in self._values.items())))

    def format(self) -> str:
        """Nonzero entries as "label: value", or "0"."""
        if not self._values:
            return "0"
        return ", ".join(f"{self.carrier.label(p)}: {format_scalar(z)}" for p, z in self.items())

    def __repr__(self) -> str:
        return f"AlgebraElement({self.format()})"


def _combine(terms: Iterable[tuple[Scalar, AlgebraElement]], carrier: FiniteSet) -> AlgebraElement:
    total: dict[int, Scalar] = {}
    for coefficient, element in terms:
        for p, z in element.items():
            total[p] = total.get(p, ZERO) + coefficient * z
    return AlgebraElement(carrier, total)


# ============================================================================
# Products
# ============================================================================


def convolve(
    g: RelationalGroupoid, rhs: RelationalHaarSystem, f1: AlgebraElement, f2: AlgebraElement
) -> AlgebraElement:
    """The relational convolution product; vanishes off C."""
    out: dict[int, Scalar] = {}
    for k in g.constraint_elements:
        acc = ZERO
        for (h, l), w in rhs.measure(k).items():
            a = f1[h]
            if is_zero(a):
                continue
            acc += a * f2[l] * scalar(w)
        out[k] = acc
    return AlgebraElement(g.carrier, out)


def convolve_groupoid(
    table: GroupoidTable, haar: RightHaarSystem, f1: AlgebraElement, f2: AlgebraElement
) -> AlgebraElement:
    """The groupoid convolution product for a right Haar system."""
    out: dict[int, Scalar] = {}
    for gamma in table.morphisms:
        x = table.source[gamma]
        acc = ZERO
        for eta, w in haar.measure(x).items():
            b = f2[eta]
            if is_zero(b):
                continue
            acc += f1[table.mult[(gamma, table.inverse[eta])]] * b * scalar(w)
        out[gamma] = acc
    return AlgebraElement(table.morphisms, out)


def involution(g: Union[GroupoidTable, RelationalGroupoid], f: AlgebraElement) -> AlgebraElement:
    """f*(γ) = conj(f(γ⁻¹)), with the inverse of the table or the involution I."""
    inverse = g.inverse if isinstance(g, GroupoidTable) else g.inverse_map
    return AlgebraElement(f.carrier, {inverse[p]: conjugate(z) for p, z in f.items()})


ProductTable = list[list[AlgebraElement]]


def _table_rows(n: int, row: Callable[[int], list[AlgebraElement]], threads: Optional[int]) -> ProductTable:
    threads = get_settings().threads if threads is None else threads
    if threads <= 1:
        return [row(a) for a in range(n)]
    rows: dict[int, list[AlgebraElement]] = {}
    processor = ThreadBatchProcessor(max_threads=threads)
    for a in range(n):
        processor.queue(a, row, a)

    def store(job: JobInfo) -> None:
        if job.ret_val != 0:
            raise AlgebraError(f"product row {job.tag} failed: {job.stderr}")
        rows[job.tag] = job.result

    processor.wait(store)
    return [rows[a] for a in range(n)]


def product_table(
    n: int, carrier: FiniteSet, product: Callable[[AlgebraElement, AlgebraElement], AlgebraElement],
    threads: Optional[int] = None,
) -> ProductTable:
    """P[a][b] = δa⋆δb over an n-element basis, one row per job when threaded."""
    deltas = [AlgebraElement.delta(carrier, i) for i in range(n)]

    def row(a: int) -> list[AlgebraElement]:
        return [product(deltas[a], deltas[b]) for b in range(n)]

    return _table_rows(n, row, threads)


def _times(table: ProductTable, f: AlgebraElement, b: int) -> AlgebraElement:
    return _combine(((z, table[a][b]) for a, z in f.items()), f.carrier)


def _times_left(table: ProductTable, a: int, f: AlgebraElement) -> AlgebraElement:
    return _combine(((z, table[a][b]) for b, z in f.items()), f.carrier)


def _basis_associativity(
    name: str, table: ProductTable, labels: FiniteSet, basis: Optional[Sequence[int]] = None
) -> CheckResult:
    indices = list(basis) if basis is not None else list(range(len(table)))
    for a in indices:
        for b in indices:
            ab = table[a][b]
            for c in indices:
                if _times(table, ab, c) != _times_left(table, a, table[b][c]):
                    return CheckResult.fail(
                        name,
                        (labels.label(a), labels.label(b), labels.label(c)),
                        "(δa⋆δb)⋆δc differs from δa⋆(δb⋆δc)",
                    )
    return CheckResult.ok(name)


def relational_product_table(
    g: RelationalGroupoid, rhs: RelationalHaarSystem, threads: Optional[int] = None
) -> ProductTable:
    """P[a][b] = δa⋆δb, read off the Haar system: (δa⋆δb)(k) = μ_k(a, b) for k ∈ C."""
    n = len(g.carrier)
    charged: list[dict[int, dict[int, Fraction]]] = [defaultdict(dict) for _ in range(n)]
    for k in g.constraint_elements:
        for (h, l), w in rhs.measure(k).items():
            charged[h][l][k] = w

    def row(a: int) -> list[AlgebraElement]:
        return [AlgebraElement(g.carrier, charged[a].get(b, {})) for b in range(n)]

    return _table_rows(n, row, threads)


def check_associativity(
    g: RelationalGroupoid,
    rhs: RelationalHaarSystem,
    threads: Optional[int] = None,
    table: Optional[ProductTable] = None,
) -> CheckResult:
    """Scan every delta-basis triple; the witness is the first failing (a, b, c)."""
    Log.enter("associativity", f"scanning {len(g.carrier)}³ basis triples")
    products = table if table is not None else relational_product_table(g, rhs, threads)
    result = _basis_associativity("associativity", products, g.carrier)
    Log.exit("associativity", "pass" if result else f"witness {result.witness}")
    return result


def check_groupoid_associativity(table: GroupoidTable, haar: RightHaarSystem) -> CheckResult:
    products = product_table(
        len(table.morphisms), table.morphisms, lambda f1, f2: convolve_groupoid(table, haar, f1, f2)
    )
    return _basis_associativity("groupoid-associativity", products, table.morphisms)


def check_involution_antihomomorphism(table: GroupoidTable, haar: RightHaarSystem) -> CheckResult:
    """(δa⋆δb)* = δb*⋆δa* on the basis."""
    name = "involution-antihomomorphism"
    n = len(table.morphisms)
    for a in range(n):
        da = AlgebraElement.delta(table.morphisms, a)
        for b in range(n):
            db = AlgebraElement.delta(table.morphisms, b)
            lhs = involution(table, convolve_groupoid(table, haar, da, db))
            rhs = convolve_groupoid(table, haar, involution(table, db), involution(table, da))
            if lhs != rhs:
                return CheckResult.fail(name, (table.label(a), table.label(b)), "(f1⋆f2)* differs from f2*⋆f1*")
    return CheckResult.ok(name)


# ============================================================================
# Invariant functions and the quotient
# ============================================================================


def is_l2_invariant_fn(g: RelationalGroupoid, f: AlgebraElement) -> bool:
    """f is constant on every L2-class."""
    return all(f[a] == f[b] for a, b in g.l2.tuples)


def _require_invariant(g: RelationalGroupoid, f: AlgebraElement) -> None:
    for a, b in g.l2.ordered:
        if f[a] != f[b]:
            raise NotInvariantError(
                f"function is not constant on the L2-class of {g.label(a)}",
                context={"witness": (g.label(a), g.label(b))},
            )


def pullback(qd: QuotientData, carrier: FiniteSet, f: AlgebraElement) -> AlgebraElement:
    """q*f̃ = f̃∘q on C and 0 elsewhere."""
    return AlgebraElement(carrier, {x: f[cls] for cls, members in enumerate(qd.classes) for x in members})


def pushforward_invariant(g: RelationalGroupoid, qd: QuotientData, f: AlgebraElement) -> AlgebraElement:
    """q_*f for an L2-invariant f: the value on any representative."""
    _require_invariant(g, f)
    return AlgebraElement(qd.quotient.morphisms, {cls: f[members[0]] for cls, members in enumerate(qd.classes)})


def pushforward_split(qd: QuotientData, f: AlgebraElement, tau: Mapping[int, Measure[int]]) -> AlgebraElement:
    """q_*f(ḡ) = Σ_{g ∈ ḡ} f(g) τ_ḡ(g) for a strongly split family τ."""
    out: dict[int, Scalar] = {}
    for cls in range(len(qd.classes)):
        out[cls] = sum((f[p] * scalar(w) for p, w in tau[cls].items()), ZERO)
    return AlgebraElement(qd.quotient.morphisms, out)


def check_split_factorization(
    g: RelationalGroupoid,
    rhs: RelationalHaarSystem,
    tau: Mapping[int, Measure[int]],
    qd: Optional[QuotientData] = None,
) -> CheckResult:
    """q_*∘q* = id, and δa⋆δb = q*(q_*δa ⋆ q_*δb) on the whole basis."""
    name = "split-factorization"
    qd = qd or quotient_groupoid(g)
    nu = quotient_haar(g, rhs, qd)
    quotient = qd.quotient
    for cls in quotient.morphisms:
        basis = AlgebraElement.delta(quotient.morphisms, cls)
        if pushforward_split(qd, pullback(qd, g.carrier, basis), tau) != basis:
            return CheckResult.fail(name, (quotient.label(cls),), "q_*∘q* is not the identity")
    pushed = {a: pushforward_split(qd, AlgebraElement.delta(g.carrier, a), tau) for a in g.carrier}
    for a in g.carrier:
        for b in g.carrier:
            lhs = convolve(g, rhs, AlgebraElement.delta(g.carrier, a), AlgebraElement.delta(g.carrier, b))
            rhs_value = pullback(qd, g.carrier, convolve_groupoid(quotient, nu, pushed[a], pushed[b]))
            if lhs != rhs_value:
                return CheckResult.fail(name, (g.label(a), g.label(b)), "product does not factor through q")
    return CheckResult.ok(name)


def check_l2conv_lemma(
    g: RelationalGroupoid,
    rhs: RelationalHaarSystem,
    f1: AlgebraElement,
    f2: AlgebraElement,
    qd: Optional[QuotientData] = None,
) -> CheckResult:
    """For L2-invariant f1, f2: f1⋆f2 = q*(q_*f1 ⋆ q_*f2) on C and 0 off C."""
    name = "l2-convolution"
    qd = qd or quotient_groupoid(g)
    nu = quotient_haar(g, rhs, qd)
    lhs = convolve(g, rhs, f1, f2)
    reduced = convolve_groupoid(qd.quotient, nu, pushforward_invariant(g, qd, f1), pushforward_invariant(g, qd, f2))
    expected = pullback(qd, g.carrier, reduced)
    if lhs == expected:
        return CheckResult.ok(name)
    bad = next(p for p in g.carrier if lhs[p] != expected[p])
    return CheckResult.fail(
        name, (g.label(bad),), f"got {format_scalar(lhs[bad])}, expected {format_scalar(expected[bad])}"
    )


def invariant_basis(g: RelationalGroupoid, qd: QuotientData) -> tuple[AlgebraElement, ...]:
    """Indicators of the L2-classes, in class order."""
    return tuple(AlgebraElement.indicator(g.carrier, members) for members in qd.classes)


def check_invariant_subalgebra(
    g: RelationalGroupoid, rhs: RelationalHaarSystem, qd: Optional[QuotientData] = None
) -> CheckResult:
    """Products of class indicators stay invariant and associate."""
    name = "invariant-subalgebra"
    qd = qd or quotient_groupoid(g)
    basis = invariant_basis(g, qd)
    n = len(basis)
    products = [[convolve(g, rhs, basis[i], basis[j]) for j in range(n)] for i in range(n)]
    labels = qd.quotient.morphisms
    for i in range(n):
        for j in range(n):
            if not is_l2_invariant_fn(g, products[i][j]):
                return CheckResult.fail(name, (labels.label(i), labels.label(j)), "product leaves the subalgebra")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs = convolve(g, rhs, products[i][j], basis[k])
                right = convolve(g, rhs, basis[i], products[j][k])
                if lhs != right:
                    return CheckResult.fail(
                        name, (labels.label(i), labels.label(j), labels.label(k)), "invariant products do not associate"
                    )
    return CheckResult.ok(name)


def check_support_in_constraint_set(
    g: RelationalGroupoid, rhs: RelationalHaarSystem, table: Optional[ProductTable] = None
) -> CheckResult:
    name = "support-in-C"
    products = table if table is not None else relational_product_table(g, rhs)
    constraint = set(g.constraint_elements)
    for a in g.carrier:
        for b in g.carrier:
            outside = [p for p in products[a][b].support() if p not in constraint]
            if outside:
                return CheckResult.fail(
                    name, (g.label(a), g.label(b), g.label(outside[0])), "product charges a point off C"
                )
    return CheckResult.ok(name)


def verify_ideal(
    g: RelationalGroupoid, rhs: RelationalHaarSystem, table: Optional[ProductTable] = None
) -> CheckResult:
    """Functions vanishing on C form a two-sided ideal: δx⋆f and f⋆δx vanish on C for x ∉ C."""
    name = "ideal"
    products = table if table is not None else relational_product_table(g, rhs)
    constraint = set(g.constraint_elements)
    outside = [x for x in g.carrier if x not in constraint]
    for x in outside:
        for b in g.carrier:
            for left, right in ((x, b), (b, x)):
                if any(p in constraint for p in products[left][right].support()):
                    return CheckResult.fail(name, (g.label(left), g.label(right)), "product with I_C is nonzero on C")
    return CheckResult.ok(name)


def restrict_to_constraint(g: RelationalGroupoid, f: AlgebraElement) -> AlgebraElement:
    """The class of f in A(G)/I_C, realized as its restriction to C."""
    return f.restrict(g.constraint_elements)


@dataclass(frozen=True)
class ReducedAlgebra:
    """The reduced algebra of L2-invariant functions and the map Φ onto the quotient algebra."""

    groupoid: RelationalGroupoid
    haar: RelationalHaarSystem
    quotient: QuotientData
    nu: RightHaarSystem

    @cached_property
    def basis(self) -> tuple[AlgebraElement, ...]:
        return invariant_basis(self.groupoid, self.quotient)

    def restrict(self, f: AlgebraElement) -> AlgebraElement:
        return restrict_to_constraint(self.groupoid, f)

    def phi(self, f: AlgebraElement) -> AlgebraElement:
        """Φ(f)(q(g)) = f(g) for L2-invariant f."""
        return pushforward_invariant(self.groupoid, self.quotient, f)

    def phi_inverse(self, f: AlgebraElement) -> AlgebraElement:
        return pullback(self.quotient, self.groupoid.carrier, f)

    def convolve(self, f1: AlgebraElement, f2: AlgebraElement) -> AlgebraElement:
        return convolve(self.groupoid, self.haar, f1, f2)

    def convolve_reduced(self, f1: AlgebraElement, f2: AlgebraElement) -> AlgebraElement:
        return convolve_groupoid(self.quotient.quotient, self.nu, f1, f2)

    def verify_isomorphism(self) -> CheckResult:
        """Φ maps the basis onto the deltas and is multiplicative on it."""
        name = "reduction-isomorphism"
        labels = self.quotient.quotient.morphisms
        images = [self.phi(b) for b in self.basis]
        for i, image in enumerate(images):
            if image != AlgebraElement.delta(labels, i):
                return CheckResult.fail(name, (labels.label(i),), "Φ does not send the class indicator to a delta")
            if self.phi_inverse(image) != self.basis[i]:
                return CheckResult.fail(name, (labels.label(i),), "Φ⁻¹∘Φ is not the identity")
        for i, bi in enumerate(self.basis):
            for j, bj in enumerate(self.basis):
                product = self.convolve(bi, bj)
                if not is_l2_invariant_fn(self.groupoid, product):
                    return CheckResult.fail(name, (labels.label(i), labels.label(j)), "product is not L2-invariant")
                if self.phi(product) != self.convolve_reduced(images[i], images[j]):
                    return CheckResult.fail(
                        name, (labels.label(i), labels.label(j)), "Φ(f1⋆f2) differs from Φ(f1)⋆Φ(f2)"
                    )
        return CheckResult.ok(name)


def reduce_algebra(
    g: RelationalGroupoid, rhs: RelationalHaarSystem, qd: Optional[QuotientData] = None
) -> ReducedAlgebra:
    qd = qd or quotient_groupoid(g)
    reduced = ReducedAlgebra(groupoid=g, haar=rhs, quotient=qd, nu=quotient_haar(g, rhs, qd))
    logger.debug("Reduced algebra of %s has dimension %d", g.name, len(qd.classes))
    return reduced
