"""Honest finite groupoids given by their multiplication tables.

Composition follows the convention of the convolution product: ``a∘b``
(``compose(a, b)``) is defined exactly when ``target[b] == source[a]``; the
result has the source of ``b`` and the target of ``a``.
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from relconv.core.exceptions import InvalidGroupoidTableError
from relconv.core.relation import FiniteSet

logger = logging.getLogger(__name__)

GROUP_OBJECT = "*"


@dataclass(frozen=True)
class GroupoidTable:
    """Morphisms, objects, structure maps and the partial multiplication."""

    morphisms: FiniteSet
    objects: FiniteSet
    source: tuple[int, ...]
    target: tuple[int, ...]
    products: tuple[tuple[int, int, int], ...]
    inverse: tuple[int, ...]
    unit: tuple[int, ...]

    @cached_property
    def mult(self) -> Mapping[tuple[int, int], int]:
        return {(a, b): c for a, b, c in self.products}

    @property
    def is_group(self) -> bool:
        return len(self.objects) == 1

    def composable(self, a: int, b: int) -> bool:
        return self.target[b] == self.source[a]

    def compose(self, a: int, b: int) -> Optional[int]:
        """a∘b, or None when the pair is not composable."""
        return self.mult.get((a, b))

    @cached_property
    def _s_fibers(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(m for m in self.morphisms if self.source[m] == x) for x in range(len(self.objects))
        )

    def s_fiber(self, x: int) -> tuple[int, ...]:
        """Morphisms with source x, in index order."""
        return self._s_fibers[x]

    def label(self, m: int) -> str:
        return self.morphisms.label(m)

    def validate(self) -> None:
        """Verify every groupoid law, raising on the first violation."""
        n, k = len(self.morphisms), len(self.objects)
        if not (len(self.source) == len(self.target) == len(self.inverse) == n and len(self.unit) == k):
            raise InvalidGroupoidTableError("structure maps have the wrong length", law="shape")
        lbl = self.label

        for a in self.morphisms:
            for b in self.morphisms:
                defined = (a, b) in self.mult
                if defined != self.composable(a, b):
                    law = "undefined composite" if not defined else "composite of non-composable pair"
                    raise InvalidGroupoidTableError(
                        "multiplication must be defined exactly on composable pairs",
                        law=law,
                        witness=(lbl(a), lbl(b)),
                    )
                if defined:
                    c = self.mult[(a, b)]
                    if self.source[c] != self.source[b] or self.target[c] != self.target[a]:
                        raise InvalidGroupoidTableError(
                            "composite has wrong source or target", law="source/target", witness=(lbl(a), lbl(b))
                        )

        for (a, b), ab in self.mult.items():
            for c in self.morphisms:
                if not self.composable(b, c):
                    continue
                if self.mult[(ab, c)] != self.mult[(a, self.mult[(b, c)])]:
                    raise InvalidGroupoidTableError(
                        "multiplication is not associative", law="associativity", witness=(lbl(a), lbl(b), lbl(c))
                    )

        for x in self.objects:
            e = self.unit[x]
            if self.source[e] != x or self.target[e] != x:
                raise InvalidGroupoidTableError("unit is not a loop at its object", law="unit", witness=(lbl(e),))
        for a in self.morphisms:
            if self.mult[(a, self.unit[self.source[a]])] != a or self.mult[(self.unit[self.target[a]], a)] != a:
                raise InvalidGroupoidTableError("unit law fails", law="unit", witness=(lbl(a),))
            inv = self.inverse[a]
            if self.source[inv] != self.target[a] or self.target[inv] != self.source[a]:
                raise InvalidGroupoidTableError("inverse has wrong source or target", law="inverse", witness=(lbl(a),))
            if self.mult[(a, inv)] != self.unit[self.target[a]] or self.mult[(inv, a)] != self.unit[self.source[a]]:
                raise InvalidGroupoidTableError("inverse law fails", law="inverse", witness=(lbl(a),))
        logger.debug("Validated groupoid with %d morphisms over %d objects", n, k)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_group(cls, labels: Sequence[str], table: Sequence[Sequence[str]], name: str = "") -> "GroupoidTable":
        """Build a one-object groupoid from a Cayley table (row a, column b holds a·b)."""
        morphisms = FiniteSet(labels, name=name or "group")
        n = len(morphisms)
        if len(table) != n or any(len(row) != n for row in table):
            raise InvalidGroupoidTableError("Cayley table must be square over the element labels", law="shape")
        products = tuple(
            (a, b, morphisms.index(table[a][b])) for a in range(n) for b in range(n)
        )
        mult = {(a, b): c for a, b, c in products}
        identity = next(
            (e for e in range(n) if all(mult[(e, g)] == g and mult[(g, e)] == g for g in range(n))), None
        )
        if identity is None:
            raise InvalidGroupoidTableError("table has no identity element", law="unit")
        inverse = []
        for g in range(n):
            inv = next((h for h in range(n) if mult[(g, h)] == identity and mult[(h, g)] == identity), None)
            if inv is None:
                raise InvalidGroupoidTableError("element has no inverse", law="inverse", witness=(morphisms.label(g),))
            inverse.append(inv)
        result = cls(
            morphisms=morphisms,
            objects=FiniteSet([GROUP_OBJECT], name="objects"),
            source=(0,) * n,
            target=(0,) * n,
            products=products,
            inverse=tuple(inverse),
            unit=(identity,),
        )
        result.validate()
        return result

    @classmethod
    def pair_groupoid(cls, points: Sequence[str]) -> "GroupoidTable":
        """The pair groupoid: one morphism (a,b) from b to a for every pair of points."""
        objects = FiniteSet(points, name="objects")
        k = len(objects)
        morphisms = FiniteSet([f"({a},{b})" for a in objects.labels for b in objects.labels], name="pairs")

        def idx(a: int, b: int) -> int:
            return a * k + b

        products = tuple(
            (idx(a, b), idx(b, c), idx(a, c)) for a in range(k) for b in range(k) for c in range(k)
        )
        result = cls(
            morphisms=morphisms,
            objects=objects,
            source=tuple(b for a in range(k) for b in range(k)),
            target=tuple(a for a in range(k) for b in range(k)),
            products=tuple(sorted(products)),
            inverse=tuple(idx(b, a) for a in range(k) for b in range(k)),
            unit=tuple(idx(a, a) for a in range(k)),
        )
        result.validate()
        return result
