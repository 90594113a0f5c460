"""Finite sets and relations between finite products.

A relation is typed by a list of domain factors and a list of codomain
factors; its tuples hold element indices, domain components first. A
relation with no domain factors is a subset of the codomain product (a
relation out of the one-point set).
"""

import itertools
import logging
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

from relconv.core.exceptions import CarrierError, RelationArityError
from relconv.core.settings import get_settings

logger = logging.getLogger(__name__)

IndexTuple = tuple[int, ...]


class FiniteSet:
    """An ordered carrier of distinct string labels."""

    __slots__ = ("_index", "labels", "name")

    def __init__(self, labels: Iterable[str], name: str = "", limit: Optional[int] = None) -> None:
        self.labels: tuple[str, ...] = tuple(str(label) for label in labels)
        self.name = name
        cap = get_settings().max_carrier_size if limit is None else limit
        if len(self.labels) > cap:
            raise CarrierError(f"carrier {name or '?'} exceeds the size cap of {cap}", size=len(self.labels))
        self._index: dict[str, int] = {}
        for i, label in enumerate(self.labels):
            if label in self._index:
                raise CarrierError("duplicate element label", label=label)
            self._index[label] = i

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[int]:
        return iter(range(len(self.labels)))

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteSet):
            return NotImplemented
        return self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return f"FiniteSet({self.name or ''}{list(self.labels)})"

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise CarrierError(f"unknown element label in {self.name or 'carrier'}", label=str(label)) from None

    def label(self, i: int) -> str:
        return self.labels[i]


@dataclass(frozen=True)
class Relation:
    """A subset of (domain factors) x (codomain factors), stored as index tuples."""

    domain: tuple[FiniteSet, ...]
    codomain: tuple[FiniteSet, ...]
    tuples: frozenset[IndexTuple]

    def __post_init__(self) -> None:
        factors = self.factors
        width = len(factors)
        for t in self.tuples:
            if len(t) != width:
                raise RelationArityError(f"tuple {t} does not have {width} components")
            for pos, (i, factor) in enumerate(zip(t, factors)):
                if not 0 <= i < len(factor):
                    raise RelationArityError(f"index {i} out of range for factor {factor.name or pos}", position=pos)

    @property
    def factors(self) -> tuple[FiniteSet, ...]:
        return self.domain + self.codomain

    @property
    def arity(self) -> tuple[int, int]:
        return len(self.domain), len(self.codomain)

    @cached_property
    def ordered(self) -> tuple[IndexTuple, ...]:
        return tuple(sorted(self.tuples))

    def __iter__(self) -> Iterator[IndexTuple]:
        return iter(self.ordered)

    def __len__(self) -> int:
        return len(self.tuples)

    def __contains__(self, t: object) -> bool:
        return t in self.tuples

    def labelled(self, t: IndexTuple) -> tuple[str, ...]:
        return tuple(factor.label(i) for i, factor in zip(t, self.factors))

    @cached_property
    def successors(self) -> Mapping[IndexTuple, tuple[IndexTuple, ...]]:
        """Map each domain tuple to the sorted codomain tuples related to it."""
        k = len(self.domain)
        table: dict[IndexTuple, list[IndexTuple]] = defaultdict(list)
        for t in self.ordered:
            table[t[:k]].append(t[k:])
        return {key: tuple(values) for key, values in table.items()}

    def is_function(self) -> bool:
        """True when every domain tuple has exactly one image."""
        domain_size = 1
        for factor in self.domain:
            domain_size *= len(factor)
        succ = self.successors
        return len(succ) == domain_size and all(len(v) == 1 for v in succ.values())

    def as_function(self) -> dict[IndexTuple, IndexTuple]:
        """Return the single-valued part of the relation as a dict."""
        return {key: values[0] for key, values in self.successors.items() if len(values) == 1}

    def with_tuples(self, tuples: Iterable[IndexTuple]) -> "Relation":
        return Relation(self.domain, self.codomain, frozenset(tuples))


# ============================================================================
# Constructors
# ============================================================================


def identity(*factors: FiniteSet) -> Relation:
    """The identity relation on a product of factors."""
    points = itertools.product(*(range(len(f)) for f in factors))
    return Relation(tuple(factors), tuple(factors), frozenset(p + p for p in points))


def graph(source: FiniteSet, target: FiniteSet, mapping: Union[Sequence[int], Mapping[int, int]]) -> Relation:
    """The graph of a (possibly partial) map between two carriers."""
    items = mapping.items() if isinstance(mapping, Mapping) else enumerate(mapping)
    return Relation((source,), (target,), frozenset((i, j) for i, j in items))


def subset(factors: Union[FiniteSet, Sequence[FiniteSet]], members: Iterable[Union[int, IndexTuple]]) -> Relation:
    """A subset of a product, typed as a relation out of the one-point set."""
    fs = (factors,) if isinstance(factors, FiniteSet) else tuple(factors)
    tuples = frozenset((m,) if isinstance(m, int) else tuple(m) for m in members)
    return Relation((), fs, tuples)


def full(factors: Union[FiniteSet, Sequence[FiniteSet]]) -> Relation:
    fs = (factors,) if isinstance(factors, FiniteSet) else tuple(factors)
    return subset(fs, itertools.product(*(range(len(f)) for f in fs)))


def image(r: Relation) -> Relation:
    """The set of codomain tuples reached by r, typed as a subset."""
    k = len(r.domain)
    return Relation((), r.codomain, frozenset(t[k:] for t in r.tuples))


def restrict(r: Relation, keep: Iterable[int]) -> Relation:
    """Restrict an endorelation on one carrier to keep x keep."""
    kept = set(keep)
    return r.with_tuples(t for t in r.tuples if all(i in kept for i in t))


def elements(r: Relation) -> list[int]:
    """Sorted members of a one-factor subset."""
    if r.arity != (0, 1):
        raise RelationArityError("elements() expects a subset of a single carrier")
    return [t[0] for t in r.ordered]


# ============================================================================
# Algebra
# ============================================================================


def _check_chain(r: Relation, s: Relation) -> None:
    if len(r.codomain) != len(s.domain):
        raise RelationArityError(
            f"cannot compose: {len(r.codomain)} codomain factors against {len(s.domain)} domain factors",
            position=min(len(r.codomain), len(s.domain)),
        )
    for pos, (a, b) in enumerate(zip(r.codomain, s.domain)):
        if a != b:
            raise RelationArityError(f"carrier mismatch at factor {pos}: {a!r} vs {b!r}", position=pos)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _compose_binary(r: Relation, s: Relation) -> frozenset[IndexTuple]:
    rows = [0] * len(s.domain[0])
    for b, c in s.tuples:
        rows[b] |= 1 << c
    reach: dict[int, int] = defaultdict(int)
    for a, b in r.tuples:
        reach[a] |= rows[b]
    return frozenset((a, c) for a, mask in reach.items() for c in _bits(mask))


def compose(r: Relation, s: Relation) -> Relation:
    """Relational composite: first r, then s.

    Returns {(a, c) | there is b with (a, b) in r and (b, c) in s}.
    """
    _check_chain(r, s)
    if r.arity == (1, 1) and s.arity == (1, 1):
        return Relation(r.domain, s.codomain, _compose_binary(r, s))
    k = len(r.domain)
    succ = s.successors
    tuples = frozenset(t[:k] + c for t in r.tuples for c in succ.get(t[k:], ()))
    return Relation(r.domain, s.codomain, tuples)


def dagger(r: Relation) -> Relation:
    """The converse relation."""
    k = len(r.domain)
    return Relation(r.codomain, r.domain, frozenset(t[k:] + t[:k] for t in r.tuples))


def product(r: Relation, s: Relation) -> Relation:
    """Cartesian product of relations: (a, a') relates to (b, b')."""
    kr, ks = len(r.domain), len(s.domain)
    tuples = frozenset(t[:kr] + u[:ks] + t[kr:] + u[ks:] for t in r.tuples for u in s.tuples)
    return Relation(r.domain + s.domain, r.codomain + s.codomain, tuples)


def symmetric_difference_witness(r: Relation, s: Relation) -> Optional[IndexTuple]:
    """Smallest tuple in exactly one of r, s; None when they are equal."""
    if r.domain != s.domain or r.codomain != s.codomain:
        for pos, (a, b) in enumerate(itertools.zip_longest(r.factors, s.factors)):
            if a != b:
                raise RelationArityError(f"relations differ in typing at factor {pos}", position=pos)
        raise RelationArityError("relations split their factors differently", position=len(r.domain))
    diff = r.tuples ^ s.tuples
    return min(diff) if diff else None


# ============================================================================
# Equivalence check
# ============================================================================


@dataclass(frozen=True)
class EquivalenceCheck:
    holds: bool
    witness: Optional[IndexTuple] = None
    failed_property: Optional[str] = None

    def __bool__(self) -> bool:
        return self.holds


def is_equivalence(r: Relation, carrier: Optional[Iterable[int]] = None) -> EquivalenceCheck:
    """Check that r restricted to carrier is reflexive, symmetric and transitive.

    The witness is a missing tuple.
    """
    if r.arity != (1, 1) or r.domain != r.codomain:
        raise RelationArityError("is_equivalence expects an endorelation on one carrier")
    points = sorted(set(range(len(r.domain[0]))) if carrier is None else set(carrier))
    inside = set(points)
    local = {t for t in r.tuples if t[0] in inside and t[1] in inside}

    for x in points:
        if (x, x) not in local:
            return EquivalenceCheck(False, (x, x), "reflexive")
    for x, y in sorted(local):
        if (y, x) not in local:
            return EquivalenceCheck(False, (y, x), "symmetric")
    succ: dict[int, list[int]] = defaultdict(list)
    for x, y in sorted(local):
        succ[x].append(y)
    for x, y in sorted(local):
        for z in succ[y]:
            if (x, z) not in local:
                return EquivalenceCheck(False, (x, z), "transitive")
    return EquivalenceCheck(True)


def classes_of(r: Relation, carrier: Iterable[int]) -> list[tuple[int, ...]]:
    """Partition carrier into r-classes, assuming r is an equivalence there.

    Classes are ordered by their smallest member.
    """
    seen: set[int] = set()
    out: list[tuple[int, ...]] = []
    succ = r.successors
    inside = set(carrier)
    for x in sorted(inside):
        if x in seen:
            continue
        members = tuple(sorted(y for (y,) in succ.get((x,), ()) if y in inside))
        seen.update(members)
        out.append(members)
    return out
