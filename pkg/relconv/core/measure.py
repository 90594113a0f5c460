"""Finite measures with exact nonnegative rational weights."""

from collections import defaultdict
from collections.abc import Hashable, Iterable, Iterator, Mapping
from fractions import Fraction
from typing import Any, Callable, Generic, Optional, TypeVar, Union

from relconv.core.exceptions import HaarSystemError, PushforwardError
from relconv.core.relation import Relation

P = TypeVar("P", bound=Hashable)
Q = TypeVar("Q", bound=Hashable)

Weight = Union[int, Fraction, str]


def to_fraction(value: Weight) -> Fraction:
    f = Fraction(value)
    if f < 0:
        raise HaarSystemError(f"negative weight {f}")
    return f


class Measure(Generic[P]):
    """A map from points to nonnegative rationals; points outside the support have weight 0."""

    __slots__ = ("_weights", "support_set")

    def __init__(self, weights: Optional[Mapping[P, Weight]] = None, support_set: Optional[Iterable[P]] = None):
        self.support_set: Optional[frozenset[P]] = None if support_set is None else frozenset(support_set)
        cleaned: dict[P, Fraction] = {}
        for point, value in (weights or {}).items():
            w = to_fraction(value)
            if w == 0:
                continue
            if self.support_set is not None and point not in self.support_set:
                raise HaarSystemError(f"weight placed outside the support set at {point!r}")
            cleaned[point] = w
        self._weights = cleaned

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def dirac(cls, point: P) -> "Measure[P]":
        return cls({point: 1})

    @classmethod
    def counting(cls, points: Iterable[P], scale: Weight = 1) -> "Measure[P]":
        pts = list(points)
        return cls(dict.fromkeys(pts, Fraction(scale)), support_set=pts)

    @classmethod
    def normalized_counting(cls, points: Iterable[P]) -> "Measure[P]":
        pts = list(points)
        if not pts:
            return cls()
        return cls.counting(pts, Fraction(1, len(pts)))

    @staticmethod
    def product(first: "Measure[Any]", second: "Measure[Any]") -> "Measure[tuple[Any, Any]]":
        return Measure({(a, b): wa * wb for a, wa in first.items() for b, wb in second.items()})

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    def weight(self, point: P) -> Fraction:
        return self._weights.get(point, Fraction(0))

    def __getitem__(self, point: P) -> Fraction:
        return self.weight(point)

    def items(self) -> list[tuple[P, Fraction]]:
        return sorted(self._weights.items(), key=lambda item: item[0])  # type: ignore[arg-type,return-value]

    def points(self) -> list[P]:
        return [p for p, _ in self.items()]

    def __iter__(self) -> Iterator[P]:
        return iter(self.points())

    def __len__(self) -> int:
        return len(self._weights)

    def mass(self) -> Fraction:
        return sum(self._weights.values(), Fraction(0))

    def is_probability(self) -> bool:
        return self.mass() == 1

    def is_zero(self) -> bool:
        return not self._weights

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Measure):
            return NotImplemented
        return self._weights == other._weights

    def __hash__(self) -> int:
        return hash(frozenset(self._weights.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{p!r}: {w}" for p, w in self.items())
        return f"Measure({{{body}}})"

    # ------------------------------------------------------------------
    # Operations
    # ------------------------------------------------------------------

    def scaled(self, factor: Weight) -> "Measure[P]":
        c = to_fraction(factor)
        return Measure({p: w * c for p, w in self._weights.items()}, self.support_set)

    def restrict(self, points: Iterable[P]) -> "Measure[P]":
        keep = set(points)
        return Measure({p: w for p, w in self._weights.items() if p in keep})

    def measure_of(self, points: Iterable[P]) -> Fraction:
        return sum((self.weight(p) for p in set(points)), Fraction(0))

    def __add__(self, other: "Measure[P]") -> "Measure[P]":
        total: dict[P, Fraction] = defaultdict(Fraction)
        for p, w in self._weights.items():
            total[p] += w
        for p, w in other._weights.items():
            total[p] += w
        return Measure(total)

    def marginal(self, axis: int) -> "Measure[Any]":
        """Pushforward along the projection of tuple points onto one coordinate."""
        return self.pushforward(lambda point: point[axis])  # type: ignore[index]

    def pushforward(self, f: Union[Mapping[P, Q], Callable[[P], Q], Relation]) -> "Measure[Q]":
        return pushforward(self, f)


def _as_callable(f: Union[Mapping[Any, Any], Callable[[Any], Any], Relation]) -> Callable[[Any], Any]:
    if isinstance(f, Relation):
        succ = f.successors
        single = f.arity == (1, 1)

        def through_relation(point: Any) -> Any:
            key = (point,) if single else point
            images = succ.get(key, ())
            if len(images) != 1:
                raise PushforwardError(f"relation is not single-valued at {point!r} ({len(images)} images)")
            return images[0][0] if single else images[0]

        return through_relation
    if isinstance(f, Mapping):
        mapping = f

        def through_mapping(point: Any) -> Any:
            try:
                return mapping[point]
            except KeyError:
                raise PushforwardError(f"map is not defined at support point {point!r}") from None

        return through_mapping
    return f


def pushforward(m: Measure[P], f: Union[Mapping[P, Q], Callable[[P], Q], Relation]) -> Measure[Q]:
    """(f_*m)(y) = Σ_{f(x)=y} m(x)."""
    func = _as_callable(f)
    out: dict[Q, Fraction] = defaultdict(Fraction)
    for point, w in m.items():
        out[func(point)] += w
    return Measure(out)
