"""Finite groups and groupoids as multiplication tables, and relational groups built from them."""

import itertools
import logging
import random
from collections.abc import Callable, Iterable, Mapping, Sequence
from typing import Literal, Union

from relconv.core.exceptions import ActionAxiomError, InvalidArgumentError
from relconv.core.groupoid_table import GroupoidTable
from relconv.core.haar import RightHaarSystem
from relconv.core.relation import FiniteSet, Relation, graph
from relconv.core.relational_groupoid import (
    RelationalGroupoid,
    from_group_and_normal_subgroup,
    from_structure_relations,
)

logger = logging.getLogger(__name__)

MutationKind = Literal["drop-tuple", "add-tuple", "swap-I"]


# ============================================================================
# Group tables
# ============================================================================


def _from_mult(labels: Sequence[str], mult: Callable[[int, int], int], name: str) -> GroupoidTable:
    n = len(labels)
    return GroupoidTable.from_group(labels, [[labels[mult(a, b)] for b in range(n)] for a in range(n)], name=name)


def cyclic_table(n: int) -> GroupoidTable:
    if n < 1:
        raise InvalidArgumentError(f"cyclic group order must be positive, got {n}")
    return _from_mult([str(i) for i in range(n)], lambda a, b: (a + b) % n, f"Z{n}")


def dihedral_table(n: int) -> GroupoidTable:
    """D_n of order 2n: rotations r0..r(n-1) and reflections s_k = r^k s."""
    if n < 1:
        raise InvalidArgumentError(f"dihedral group needs n >= 1, got {n}")
    labels = [f"r{k}" for k in range(n)] + [f"s{k}" for k in range(n)]

    def mult(a: int, b: int) -> int:
        ra, sa = a % n, a >= n
        rb, sb = b % n, b >= n
        if not sa:
            return (ra + rb) % n + (n if sb else 0)
        return (ra - rb) % n + (0 if sb else n)

    return _from_mult(labels, mult, f"D{n}")


def permutation_table(perms: Sequence[tuple[int, ...]], name: str) -> GroupoidTable:
    """Group of permutations in one-line notation; (p∘q)(i) = p[q[i]]."""
    index = {p: i for i, p in enumerate(perms)}
    labels = ["".join(str(v) for v in p) for p in perms]

    def mult(a: int, b: int) -> int:
        p, q = perms[a], perms[b]
        composite = tuple(p[q[i]] for i in range(len(q)))
        if composite not in index:
            raise InvalidArgumentError("permutations are not closed under composition", context={"name": name})
        return index[composite]

    return _from_mult(labels, mult, name)


def symmetric_table(k: int) -> GroupoidTable:
    return permutation_table(sorted(itertools.permutations(range(k))), f"S{k}")


def direct_product_table(first: GroupoidTable, second: GroupoidTable) -> GroupoidTable:
    n2 = len(second.morphisms)
    labels = [f"({a},{b})" for a in first.morphisms.labels for b in second.morphisms.labels]

    def mult(x: int, y: int) -> int:
        (a1, b1), (a2, b2) = divmod(x, n2), divmod(y, n2)
        return first.mult[(a1, a2)] * n2 + second.mult[(b1, b2)]

    return _from_mult(labels, mult, f"{first.morphisms.name}x{second.morphisms.name}")


# ============================================================================
# Subgroups
# ============================================================================


def _indices(table: GroupoidTable, members: Iterable[Union[str, int]]) -> set[int]:
    return {m if isinstance(m, int) else table.morphisms.index(m) for m in members}


def subgroup_closure(table: GroupoidTable, generators: Iterable[Union[str, int]]) -> tuple[int, ...]:
    """Smallest subgroup containing the generators."""
    found = {table.unit[0]} | _indices(table, generators)
    frontier = list(found)
    while frontier:
        a = frontier.pop()
        for b in list(found):
            for c in (table.mult[(a, b)], table.mult[(b, a)], table.inverse[a]):
                if c not in found:
                    found.add(c)
                    frontier.append(c)
    return tuple(sorted(found))


def normal_closure(table: GroupoidTable, generators: Iterable[Union[str, int]]) -> tuple[int, ...]:
    """Smallest normal subgroup containing the generators."""
    gens = _indices(table, generators)
    conjugates = {table.mult[(table.mult[(g, x)], table.inverse[g])] for g in table.morphisms for x in gens}
    return subgroup_closure(table, conjugates)


def is_normal(table: GroupoidTable, members: Iterable[Union[str, int]]) -> bool:
    h = _indices(table, members)
    return all(table.mult[(table.mult[(g, x)], table.inverse[g])] in h for g in table.morphisms for x in h)


# ============================================================================
# Relational groups
# ============================================================================


def cyclic_relational(n: int, m: int, check: bool = True) -> RelationalGroupoid:
    """Z_n with the normal subgroup generated by m; the quotient is Z_m."""
    if m < 1 or n % m != 0:
        raise InvalidArgumentError(f"{m} does not divide {n}", context={"n": n, "m": m})
    table = cyclic_table(n)
    subgroup = [str(k) for k in range(0, n, m)]
    return from_group_and_normal_subgroup(table, subgroup, name=f"Z{n}/<{m % n}>", check=check)


def dihedral_relational(n: int, check: bool = True) -> RelationalGroupoid:
    """D_n with its rotation subgroup; the quotient is Z2."""
    table = dihedral_table(n)
    return from_group_and_normal_subgroup(table, [f"r{k}" for k in range(n)], name=f"D{n}/R", check=check)


def s3_a3(check: bool = True) -> RelationalGroupoid:
    table = symmetric_table(3)
    even = ["012", "120", "201"]
    return from_group_and_normal_subgroup(table, even, name="S3/A3", check=check)


# ============================================================================
# Action groupoids
# ============================================================================


Action = Union[Callable[[int, int], int], Mapping[tuple[int, int], int]]


def action_groupoid(
    group: GroupoidTable, points: Sequence[str], action: Action, name: str = ""
) -> tuple[GroupoidTable, RightHaarSystem]:
    """G⋉X with morphisms (g, x): x → g·x and the normalized counting Haar system.

    Composition is (h, g·x)∘(g, x) = (hg, x).
    """
    if not group.is_group:
        raise InvalidArgumentError("action groupoids need a group")
    if isinstance(action, Mapping):
        table_action = action

        def act(g: int, x: int) -> int:
            return table_action[(g, x)]

    else:
        act = action
    objects = FiniteSet(points, name="objects")
    n, k = len(group.morphisms), len(objects)

    def apply(g: int, x: int) -> int:
        y = act(g, x)
        if not 0 <= y < k:
            raise ActionAxiomError("action leaves the point set", witness=(group.label(g), objects.label(x)))
        return y

    e = group.unit[0]
    for x in range(k):
        if apply(e, x) != x:
            raise ActionAxiomError("identity does not act trivially", witness=(objects.label(x),))
        for g in range(n):
            for h in range(n):
                if apply(group.mult[(h, g)], x) != apply(h, apply(g, x)):
                    raise ActionAxiomError(
                        "action is not compatible with multiplication",
                        witness=(group.label(h), group.label(g), objects.label(x)),
                    )

    morphisms = FiniteSet(
        [f"({group.label(g)},{objects.label(x)})" for g in range(n) for x in range(k)],
        name=name or f"{group.morphisms.name}x{k}",
    )

    def idx(g: int, x: int) -> int:
        return g * k + x

    products = tuple(
        sorted(
            (idx(h, apply(g, x)), idx(g, x), idx(group.mult[(h, g)], x))
            for g in range(n)
            for x in range(k)
            for h in range(n)
        )
    )
    table = GroupoidTable(
        morphisms=morphisms,
        objects=objects,
        source=tuple(x for g in range(n) for x in range(k)),
        target=tuple(apply(g, x) for g in range(n) for x in range(k)),
        products=products,
        inverse=tuple(idx(group.inverse[g], apply(g, x)) for g in range(n) for x in range(k)),
        unit=tuple(idx(e, x) for x in range(k)),
    )
    table.validate()
    return table, RightHaarSystem.normalized_counting(table)


# ============================================================================
# Mutations
# ============================================================================


def mutate(g: RelationalGroupoid, kind: MutationKind, seed: int = 0) -> RelationalGroupoid:
    """Apply one deterministic random mutation; the result is not validated."""
    rng = random.Random(seed)
    G = g.carrier
    inverse = list(g.inverse_map)
    l3 = set(g.l3.tuples)
    if kind == "drop-tuple":
        if not l3:
            raise InvalidArgumentError("nothing to drop from an empty L3")
        l3.discard(rng.choice(sorted(l3)))
    elif kind == "add-tuple":
        missing = [t for t in itertools.product(G, G, G) if t not in l3]
        if not missing:
            raise InvalidArgumentError("L3 is already full")
        l3.add(rng.choice(missing))
    elif kind == "swap-I":
        x, y = rng.randrange(len(G)), rng.randrange(len(G))
        return swap_involution(g, x, y)
    else:
        raise InvalidArgumentError(f"unknown mutation {kind!r}")
    logger.debug("Mutation %s with seed %d on %s", kind, seed, g.name)
    return from_structure_relations(G, inverse, Relation((G, G), (G,), frozenset(l3)), name=f"{g.name}~{kind}")


def swap_involution(g: RelationalGroupoid, x: int, y: int) -> RelationalGroupoid:
    """Exchange the I-images of x and y, keeping L; a no-op when x == y."""
    if x == y:
        return g
    inverse = list(g.inverse_map)
    inverse[x], inverse[y] = inverse[y], inverse[x]
    return RelationalGroupoid(
        carrier=g.carrier,
        triples=g.triples,
        involution=graph(g.carrier, g.carrier, inverse),
        name=f"{g.name}~swap-I",
    )


def drop_l3_tuple(g: RelationalGroupoid, t: tuple[int, int, int]) -> RelationalGroupoid:
    """Remove one multiplication triple and rebuild L = I∘L3."""
    remaining = frozenset(g.l3.tuples - {t})
    G = g.carrier
    return from_structure_relations(G, list(g.inverse_map), Relation((G, G), (G,), remaining), name=f"{g.name}-{t}")


def add_l3_tuple(g: RelationalGroupoid, t: tuple[int, int, int]) -> RelationalGroupoid:
    """Add one multiplication triple and rebuild L = I∘L3."""
    G = g.carrier
    extended = frozenset(g.l3.tuples | {t})
    return from_structure_relations(G, list(g.inverse_map), Relation((G, G), (G,), extended), name=f"{g.name}+{t}")


def isolated_extension(g: RelationalGroupoid, label: str = "iso") -> RelationalGroupoid:
    """Add one element that lies in no triple and is its own inverse."""
    carrier = FiniteSet(list(g.carrier.labels) + [label], name=g.carrier.name)
    n = len(g.carrier)
    inverse = list(g.inverse_map) + [n]
    triples = Relation((carrier, carrier), (carrier,), g.triples.tuples)
    return RelationalGroupoid(
        carrier=carrier,
        triples=triples,
        involution=graph(carrier, carrier, inverse),
        name=f"{g.name}+{label}",
    )


def random_relational_groups(
    count: int = 100, seed: int = 0, max_order: int = 24
) -> list[RelationalGroupoid]:
    """Seeded cyclic and dihedral relational groups of order at most max_order (unchecked)."""
    rng = random.Random(seed)
    out: list[RelationalGroupoid] = []
    while len(out) < count:
        if rng.random() < 0.5:
            n = rng.randint(1, max_order)
            divisors = [m for m in range(1, n + 1) if n % m == 0]
            out.append(cyclic_relational(n, rng.choice(divisors), check=False))
        else:
            half = rng.randint(1, max(1, max_order // 2))
            table = dihedral_table(half)
            choice = rng.randrange(3)
            if choice == 0:
                subgroup: tuple[int, ...] = tuple(range(half))
            elif choice == 1:
                subgroup = normal_closure(table, [rng.randrange(half)])
            else:
                subgroup = normal_closure(table, [half + rng.randrange(half)])
            out.append(
                from_group_and_normal_subgroup(table, subgroup, name=f"D{half}/N{len(out)}", check=False)
            )
    return out
