"""Characters of finite abelian groups.

A character of ``Z_{n_1} x ... x Z_{n_k}`` is labelled by an exponent tuple
``a`` in the same coordinate lattice, ``chi_a(g) = exp(2 pi i sum_j a_j g_j / n_j)``.
All kernel and triviality decisions are made on the exact phase
``sum_j a_j g_j / n_j mod 1``; floats appear only when a value is evaluated.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidArgument
from .groups import Element, Group, Subgroup, generating_set

_QUARTER_TURNS = (1 + 0j, 1j, -1 + 0j, -1j)


def unit_root(turns: Fraction) -> complex:
    """exp(2 pi i * turns); exact for multiples of a quarter turn."""
    turns = turns % 1
    if (4 * turns).denominator == 1:
        return _QUARTER_TURNS[int(4 * turns)]
    return cmath.exp(2j * math.pi * turns.numerator / turns.denominator)


@dataclass(frozen=True)
class Character:
    group: Group
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        exps = tuple(int(a) for a in self.exponents)
        if len(exps) != self.group.rank:
            raise InvalidArgument(f"character exponents {exps} do not match {self.group}")
        object.__setattr__(self, "exponents", tuple(a % n for a, n in zip(exps, self.group.orders)))

    def phase(self, g: Element) -> Fraction:
        """The exact phase of chi(g) in turns, reduced to [0, 1)."""
        if len(g) != self.group.rank:
            raise InvalidArgument(f"element {g} does not belong to {self.group}")
        L = self.group.exponent
        k = sum(a * x * (L // n) for a, x, n in zip(self.exponents, g, self.group.orders))
        return Fraction(k % L, L)

    def __call__(self, g: Element) -> complex:
        return unit_root(self.phase(g))

    def __mul__(self, other: Character) -> Character:
        if other.group != self.group:
            raise InvalidArgument("characters of different groups")
        return Character(self.group, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def conjugate(self) -> Character:
        return Character(self.group, tuple(-a for a in self.exponents))

    @property
    def is_trivial(self) -> bool:
        return not any(self.exponents)

    def order(self) -> int:
        return self.group.order_of(self.exponents)

    def __str__(self) -> str:
        return format_character(self)


def eval_character(chi: Character, g: Element) -> complex:
    if g not in chi.group:
        raise InvalidArgument(f"element {g} does not belong to {chi.group}")
    return chi(g)


def trivial_character(G: Group) -> Character:
    return Character(G, G.identity())


def dual_group(G: Group) -> list[Character]:
    """All characters of G, lexicographic by exponent tuple (same order as G)."""
    return [Character(G, a) for a in G.elements]


def kernel(rho: Character) -> Subgroup:
    G = rho.group
    members = tuple(g for g in G.elements if rho.phase(g) == 0)
    return Subgroup(G, members, generating_set(G, members))


def h_perp(G: Group, H: Subgroup) -> list[Character]:
    """Characters of G that are trivial on H."""
    if H.parent != G:
        raise InvalidArgument("subgroup does not belong to this group")
    probe = H.generators or H.elements
    return [chi for chi in dual_group(G) if all(chi.phase(h) == 0 for h in probe)]


def is_faithful_on_quotient(rho: Character, H: Subgroup) -> bool:
    if H.parent != rho.group:
        raise InvalidArgument("subgroup does not belong to the character's group")
    if any(rho.phase(h) != 0 for h in H.elements):
        raise InvalidArgument(f"character {rho} is not trivial on the subgroup")
    return kernel(rho) == H


def faithful_quotient_characters(G: Group, H: Subgroup) -> list[Character]:
    return [rho for rho in h_perp(G, H) if kernel(rho) == H]


@lru_cache(maxsize=64)
def _phase_table(G: Group) -> np.ndarray:
    L = G.exponent
    els = np.array(G.elements, dtype=np.int64).reshape(G.size, G.rank)
    weights = np.array([L // n for n in G.orders], dtype=np.int64)
    return ((els * weights) @ els.T) % L


@lru_cache(maxsize=64)
def character_table(G: Group) -> np.ndarray:
    """Matrix T[chi, g] = chi(g); rows and columns in enumeration order (read-only)."""
    k = _phase_table(G)
    table = np.exp(2j * np.pi * k / G.exponent)
    # integer phases that land on quarter turns are set exactly
    L = G.exponent
    for q, value in enumerate(_QUARTER_TURNS):
        if (q * L) % 4 == 0:
            table[k == q * L // 4] = value
    table.setflags(write=False)
    return table


def format_character(chi: Character) -> str:
    return "(" + ",".join(str(a) for a in chi.exponents) + ")"


def parse_character(G: Group, text: str) -> Character:
    body = re.sub(r"\s+", "", text).strip("()")
    try:
        exps = tuple(int(x) for x in body.split(",")) if body else ()
    except ValueError as exc:
        raise InvalidArgument(f"cannot parse character {text!r}") from exc
    return Character(G, exps)

