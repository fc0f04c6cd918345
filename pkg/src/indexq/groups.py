"""Finite abelian groups presented as products of cyclic factors.

Elements are plain integer tuples ``(g_1, ..., g_k)`` with ``0 <= g_i < n_i``.
Iteration order is lexicographic on the tuples and fixes the index <-> element
bijection used for statevector layout everywhere else in the package.
"""
from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import InvalidArgument, RefusedOperation

Element = tuple[int, ...]

MAX_GROUP_SIZE = 4096


@dataclass(frozen=True)
class Group:
    orders: tuple[int, ...]

    def __post_init__(self) -> None:
        orders = tuple(int(n) for n in self.orders)
        if not orders:
            raise InvalidArgument("a group needs at least one cyclic factor")
        if any(n < 1 for n in orders):
            raise InvalidArgument(f"cyclic factor orders must be >= 1, got {orders}")
        object.__setattr__(self, "orders", orders)

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __contains__(self, g: object) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == self.rank
            and all(isinstance(x, int) and 0 <= x < n for x, n in zip(g, self.orders))
        )

    def __str__(self) -> str:
        return format_group(self)

    @cached_property
    def elements(self) -> tuple[Element, ...]:
        return tuple(itertools.product(*(range(n) for n in self.orders)))

    @cached_property
    def _strides(self) -> tuple[int, ...]:
        strides = []
        acc = 1
        for n in reversed(self.orders):
            strides.append(acc)
            acc *= n
        return tuple(reversed(strides))

    def index(self, g: Element) -> int:
        self.check(g)
        return sum(x * s for x, s in zip(g, self._strides))

    def element(self, i: int) -> Element:
        if not 0 <= i < self.size:
            raise InvalidArgument(f"index {i} out of range for a group of size {self.size}")
        return tuple((i // s) % n for s, n in zip(self._strides, self.orders))

    def check(self, g: Sequence[int]) -> Element:
        g = tuple(g)
        if len(g) != self.rank:
            raise InvalidArgument(f"element {g} has arity {len(g)}, group {self} has rank {self.rank}")
        if not all(0 <= x < n for x, n in zip(g, self.orders)):
            raise InvalidArgument(f"element {g} is not in {self}")
        return g

    def identity(self) -> Element:
        return (0,) * self.rank

    def add(self, g: Element, h: Element) -> Element:
        if len(g) != self.rank or len(h) != self.rank:
            raise InvalidArgument(f"arity mismatch adding {g} and {h} in {self}")
        return tuple((a + b) % n for a, b, n in zip(g, h, self.orders))

    def neg(self, g: Element) -> Element:
        if len(g) != self.rank:
            raise InvalidArgument(f"arity mismatch negating {g} in {self}")
        return tuple(-a % n for a, n in zip(g, self.orders))

    def sub(self, g: Element, h: Element) -> Element:
        return self.add(g, self.neg(h))

    def scale(self, k: int, g: Element) -> Element:
        return tuple(k * a % n for a, n in zip(g, self.orders))

    def order_of(self, g: Element) -> int:
        return math.lcm(*(n // math.gcd(a, n) for a, n in zip(g, self.orders)))

    @property
    def exponent(self) -> int:
        return math.lcm(*self.orders)

    def require_small(self, cap: int = MAX_GROUP_SIZE) -> None:
        if self.size > cap:
            raise RefusedOperation(f"|G| = {self.size} exceeds the exhaustive-routine cap {cap}")


def make_group(orders: Iterable[int]) -> Group:
    return Group(tuple(orders))


def identity(G: Group) -> Element:
    return G.identity()


def add(G: Group, g: Element, h: Element) -> Element:
    return G.add(g, h)


def neg(G: Group, g: Element) -> Element:
    return G.neg(g)


@dataclass(frozen=True)
class Subgroup:
    """An enumerated subgroup; ``generators`` is kept only as a certificate."""

    parent: Group
    elements: tuple[Element, ...]
    generators: tuple[Element, ...] = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.parent.size // self.order

    @cached_property
    def _members(self) -> frozenset[Element]:
        return frozenset(self.elements)

    def __contains__(self, g: object) -> bool:
        return g in self._members

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __len__(self) -> int:
        return self.order

    def __le__(self, other: Subgroup) -> bool:
        return self.parent == other.parent and self._members <= other._members

    def __lt__(self, other: Subgroup) -> bool:
        return self <= other and self.order < other.order

    def __and__(self, other: Subgroup) -> Subgroup:
        if self.parent != other.parent:
            raise InvalidArgument("cannot intersect subgroups of different groups")
        common = tuple(g for g in self.elements if g in other._members)
        return Subgroup(self.parent, common, generating_set(self.parent, common))


def _closure(G: Group, start: Iterable[Element], gens: Sequence[Element]) -> set[Element]:
    found = set(start)
    found.add(G.identity())
    frontier = list(found)
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = G.add(g, s)
                if h not in found:
                    found.add(h)
                    nxt.append(h)
        frontier = nxt
    return found


def generating_set(G: Group, elements: Iterable[Element]) -> tuple[Element, ...]:
    # greedy: walk in enumeration order, keep anything not yet generated
    gens: list[Element] = []
    span = {G.identity()}
    for g in sorted(elements):
        if g not in span:
            gens.append(g)
            span = _closure(G, span, gens)
    return tuple(gens)


def subgroup_closure(G: Group, generators: Iterable[Sequence[int]]) -> Subgroup:
    gens = []
    for g in generators:
        try:
            gens.append(G.check(g))
        except InvalidArgument as exc:
            raise InvalidArgument(f"generator {tuple(g)} does not belong to {G}") from exc
    elements = tuple(sorted(_closure(G, [], gens)))
    return Subgroup(G, elements, tuple(gens))


def trivial_subgroup(G: Group) -> Subgroup:
    return subgroup_closure(G, [])


def whole_group(G: Group) -> Subgroup:
    return Subgroup(G, G.elements, generating_set(G, G.elements))


def _join(G: Group, members: frozenset[Element], g: Element) -> frozenset[Element]:
    # <S, g> = union of the translates S + k*g
    grown = set(members)
    acc = g
    while acc not in members:
        grown.update(G.add(acc, s) for s in members)
        acc = G.add(acc, g)
    return frozenset(grown)


def _grow_subgroups(G: Group, keep) -> dict[frozenset[Element], Subgroup]:
    trivial = trivial_subgroup(G)
    seen = {frozenset(trivial.elements): trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for S in frontier:
            members = S._members
            for block in cosets(G, S):
                g = block[0]
                if g in members:
                    continue
                key = _join(G, members, g)
                if key in seen or not keep(len(key)):
                    continue
                seen[key] = Subgroup(G, tuple(sorted(key)), S.generators + (g,))
                nxt.append(seen[key])
        frontier = nxt
    return seen


def all_subgroups(G: Group, cap: int = MAX_GROUP_SIZE) -> list[Subgroup]:
    """Every subgroup of G, sorted by order then by element tuple."""
    G.require_small(cap)
    found = _grow_subgroups(G, lambda n: True).values()
    return sorted(found, key=lambda S: (S.order, S.elements))


def enumerate_subgroups_of_index(G: Group, q: int, cap: int = MAX_GROUP_SIZE) -> list[Subgroup]:
    G.require_small(cap)
    if q < 1 or G.size % q:
        return []
    target = G.size // q
    if target == G.size:
        return [whole_group(G)]
    # only subgroups whose order divides the target can grow into one of that order
    seen = _grow_subgroups(G, lambda n: target % n == 0)
    found = [S for S in seen.values() if S.order == target]
    return sorted(found, key=lambda S: S.elements)


def cosets(G: Group, H: Subgroup) -> list[tuple[Element, ...]]:
    """Cosets of H in G; the representative of each is its least element."""
    if H.parent != G:
        raise InvalidArgument("subgroup does not belong to this group")
    assigned: set[Element] = set()
    blocks = []
    for g in G.elements:
        if g in assigned:
            continue
        block = tuple(sorted(G.add(g, h) for h in H.elements))
        assigned.update(block)
        blocks.append(block)
    return blocks


def coset_index_map(G: Group, H: Subgroup) -> dict[Element, int]:
    return {g: i for i, block in enumerate(cosets(G, H)) for g in block}


def _coset_order(G: Group, H: Subgroup, g: Element) -> int:
    k, acc = 1, g
    while acc not in H:
        acc = G.add(acc, g)
        k += 1
    return k


def _prime_factors(n: int) -> list[int]:
    primes, p = [], 2
    while p * p <= n:
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        primes.append(n)
    return primes


@dataclass(frozen=True)
class QuotientType:
    cyclic_factors: tuple[int, ...]
    is_cyclic: bool

    @property
    def order(self) -> int:
        return math.prod(self.cyclic_factors)


def quotient_type(G: Group, H: Subgroup) -> QuotientType:
    """Invariant factors of G/H from the order statistics of its cosets.

    For each prime p, the number of cosets killed by p^k pins down how many
    elementary divisors are at least p^k; the p-parts are then recombined.
    """
    reps = [block[0] for block in cosets(G, H)]
    index = len(reps)
    if index == 1:
        return QuotientType((1,), True)
    orders = Counter(_coset_order(G, H, r) for r in reps)
    divisors_by_prime: dict[int, list[int]] = {}
    for p in _prime_factors(index):
        exps = []
        k, prev = 1, 1
        while True:
            killed = sum(c for o, c in orders.items() if (p**k) % o == 0)
            if killed == prev:
                break
            # killed / prev = p^(number of elementary divisors >= p^k)
            at_least = round(math.log(killed // prev, p))
            exps.append(at_least)
            prev = killed
            k += 1
        # exps[k-1] = #{i : e_i >= k}; convert to the list of exponents e_i
        counts = exps + [0]
        divs = []
        for k in range(len(exps), 0, -1):
            divs += [p**k] * (counts[k - 1] - counts[k])
        divisors_by_prime[p] = sorted(divs, reverse=True)
    width = max(len(d) for d in divisors_by_prime.values())
    factors = [1] * width
    for divs in divisors_by_prime.values():
        for i, d in enumerate(divs):
            factors[i] *= d
    factors = sorted(factors)
    is_cyclic = max(orders) == index
    return QuotientType(tuple(factors), is_cyclic)


def cyclic_coset_coordinates(G: Group, H: Subgroup) -> list[int]:
    """For cyclic G/H, the map coset index -> k with coset = k * (generating coset).

    The generating coset is the first one, in enumeration order, whose order is
    [G:H]. Composing a labeling with this map makes label assignments relative
    to a group isomorphism G/H -> Z_q.
    """
    blocks = cosets(G, H)
    index = len(blocks)
    where = coset_index_map(G, H)
    gen = next((b[0] for b in blocks if _coset_order(G, H, b[0]) == index), None)
    if gen is None:
        raise InvalidArgument(f"G/H is not cyclic for G={G}, |H|={H.order}")
    coords = [0] * index
    acc = G.identity()
    for k in range(index):
        coords[where[acc]] = k
        acc = G.add(acc, gen)
    return coords


_FACTOR = re.compile(r"z\s*(\d+)", re.IGNORECASE)


def parse_group(text: str) -> Group:
    """Parse ``"Z4xZ2 x Z3"`` style strings (case-insensitive, spaces ignored)."""
    tokens = re.sub(r"\s+", "", text).lower().split("x")
    orders = []
    for tok in tokens:
        m = _FACTOR.fullmatch(tok)
        if not m:
            raise InvalidArgument(f"cannot parse group factor {tok!r} in {text!r}")
        orders.append(int(m.group(1)))
    return make_group(orders)


def format_group(G: Group) -> str:
    return "x".join(f"Z{n}" for n in G.orders)


def parse_generators(text: str) -> list[Element]:
    """Parse ``"1,1;0,2"`` into a list of coordinate tuples. Empty string -> []."""
    text = text.strip()
    if not text:
        return []
    gens = []
    for chunk in text.split(";"):
        chunk = chunk.strip().strip("()")
        try:
            gens.append(tuple(int(x) for x in chunk.split(",")))
        except ValueError as exc:
            raise InvalidArgument(f"cannot parse generator {chunk!r}") from exc
    return gens


def format_generators(gens: Iterable[Element]) -> str:
    return ";".join(",".join(str(x) for x in g) for g in gens)


def parse_subgroup(G: Group, text: str) -> Subgroup:
    return subgroup_closure(G, parse_generators(text))
