"""Hiding functions and the oracles that expose them.

An oracle only ever sees a value table (domain index -> output label) and the
output alphabet's group structure; the hidden subgroup stays with the
:class:`HidingFunction` that built the table and is used only for verification.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .characters import unit_root
from .errors import InvalidArgument, InvalidState
from .groups import (
    Group,
    Subgroup,
    cosets,
    format_generators,
    format_group,
    generating_set,
    parse_generators,
    parse_group,
    subgroup_closure,
)
from .statesim import TOL, Basis, StateVector, joint_space


@dataclass(frozen=True)
class OutputAlphabet:
    """Labels ``0..q-1`` carrying a Z_q structure.

    ``structure[x]`` is the Z_q value of label ``x``; the default identity
    permutation makes label arithmetic ordinary addition mod q.
    """

    q: int
    structure: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.q < 1:
            raise InvalidArgument("alphabet size must be positive")
        structure = tuple(range(self.q)) if self.structure is None else tuple(self.structure)
        if sorted(structure) != list(range(self.q)):
            raise InvalidArgument(f"{structure} is not a permutation of range({self.q})")
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "_label_of", tuple(structure.index(v) for v in range(self.q)))

    def value(self, label: int) -> int:
        return self.structure[label]

    def label(self, value: int) -> int:
        return self._label_of[value % self.q]

    def add(self, x: int, y: int) -> int:
        return self.label(self.value(x) + self.value(y))

    def neg(self, x: int) -> int:
        return self.label(-self.value(x))

    @property
    def zero(self) -> int:
        return self.label(0)

    def character(self, m: int, label: int) -> complex:
        """chi_m(label) = exp(2 pi i m value(label) / q)."""
        return unit_root(Fraction(m * self.value(label), self.q))

    def character_vector(self, m: int) -> np.ndarray:
        return np.array([self.character(m, x) for x in range(self.q)])

    def is_faithful(self, m: int) -> bool:
        return math.gcd(m, self.q) == 1

    def verify(self) -> None:
        labels = range(self.q)
        for x in labels:
            if self.add(x, self.zero) != x or self.add(x, self.neg(x)) != self.zero:
                raise AssertionError("identity/inverse axiom fails")
            for y in labels:
                if self.add(x, y) != self.add(y, x):
                    raise AssertionError("not commutative")
                for z in labels:
                    if self.add(self.add(x, y), z) != self.add(x, self.add(y, z)):
                        raise AssertionError("not associative")


@dataclass(frozen=True)
class HidingFunction:
    """f = labeling o (coset projection); ``table[i]`` is f at the i-th element."""

    group: Group
    subgroup: Subgroup
    labeling: tuple[int, ...]
    q: int
    table: tuple[int, ...] = field(repr=False)

    def __call__(self, g) -> int:
        return self.table[self.group.index(tuple(g))]

    def to_record(self) -> dict:
        return {
            "group": format_group(self.group),
            "subgroup": format_generators(self.subgroup.generators),
            "labeling": list(self.labeling),
            "q": self.q,
        }

    @classmethod
    def from_record(cls, record: dict) -> HidingFunction:
        G = parse_group(record["group"])
        H = subgroup_closure(G, parse_generators(record["subgroup"]))
        return make_hiding_function(G, H, record["labeling"], record["q"])


def make_hiding_function(
    G: Group, H: Subgroup, labeling: Sequence[int], q: int | None = None
) -> HidingFunction:
    labeling = tuple(int(x) for x in labeling)
    blocks = cosets(G, H)
    if len(labeling) != len(blocks):
        raise InvalidArgument(f"labeling has {len(labeling)} entries for {len(blocks)} cosets")
    if len(set(labeling)) != len(labeling):
        raise InvalidArgument(f"labeling {labeling} is not injective")
    if q is None:
        q = max(len(labeling), max(labeling) + 1)
    if any(not 0 <= x < q for x in labeling):
        raise InvalidArgument(f"labels {labeling} fall outside the alphabet of size {q}")
    if not H.generators and H.order > 1:
        H = Subgroup(G, H.elements, generating_set(G, H.elements))
    table = [0] * G.size
    for label, block in zip(labeling, blocks):
        for g in block:
            table[G.index(g)] = label
    fn = HidingFunction(G, H, labeling, q, tuple(table))
    _check_hides(fn)
    return fn


def _check_hides(fn: HidingFunction) -> None:
    G, H = fn.group, fn.subgroup
    if len(set(fn.table)) != H.index:
        raise AssertionError("image size differs from the subgroup index")
    for block in cosets(G, H):
        if len({fn(g) for g in block}) != 1:
            raise AssertionError("hiding function is not constant on a coset")


class OracleKind(enum.Enum):
    SHIFT = "shift"
    PHASE = "phase"


@dataclass(eq=False)
class OracleHandle:
    """Black-box access to a value table, counting every application."""

    values: tuple[int, ...]
    alphabet: OutputAlphabet
    kind: OracleKind = OracleKind.SHIFT
    character: int | None = None
    queries: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        self.values = tuple(int(v) for v in self.values)
        if any(not 0 <= v < self.alphabet.q for v in self.values):
            raise InvalidArgument("oracle values fall outside the alphabet")
        if self.kind is OracleKind.PHASE and self.character is not None:
            if self.character % self.alphabet.q == 0:
                raise InvalidArgument("a phase oracle needs a nontrivial character")

    @classmethod
    def for_function(
        cls,
        fn: HidingFunction,
        kind: OracleKind = OracleKind.SHIFT,
        character: int | None = None,
        structure: Sequence[int] | None = None,
    ) -> OracleHandle:
        return cls(fn.table, OutputAlphabet(fn.q, structure), kind, character)

    @property
    def domain_size(self) -> int:
        return len(self.values)

    def _count(self) -> None:
        self.queries += 1


def _handle(oracle: OracleHandle | HidingFunction, kind: OracleKind) -> OracleHandle:
    if isinstance(oracle, HidingFunction):
        return OracleHandle.for_function(oracle, kind)
    if oracle.kind is not kind:
        raise InvalidArgument(f"this operation needs a {kind.value} oracle, got {oracle.kind.value}")
    return oracle


def apply_shift_oracle(oracle: OracleHandle | HidingFunction, psi: StateVector) -> StateVector:
    """|x>|y> -> |x>|f(x) + y>, addition in the alphabet's Z_q structure."""
    oracle = _handle(oracle, OracleKind.SHIFT)
    psi.require(Basis.ELEMENT)
    q = oracle.alphabet.q
    if psi.space.rank < 2 or psi.space.orders[-1] != q or psi.dim != oracle.domain_size * q:
        raise InvalidState(f"shift oracle acts on a {oracle.domain_size} x {q} space, got {psi.space}")
    amps = psi.amplitudes.reshape(oracle.domain_size, q)
    value = np.array(oracle.alphabet.structure)
    label = np.argsort(value)
    # target[x, y] = label of value(f(x)) + value(y)
    target = label[(value[list(oracle.values)][:, None] + value[None, :]) % q]
    out = np.empty_like(amps)
    out[np.arange(oracle.domain_size)[:, None], target] = amps
    oracle._count()
    return psi.with_amplitudes(out.reshape(-1))


def apply_phase_oracle_direct(
    oracle: OracleHandle | HidingFunction, chi: int, psi: StateVector
) -> StateVector:
    """|x> -> chi(f(x)) |x> for the alphabet character with exponent ``chi``."""
    oracle = _handle(oracle, OracleKind.PHASE)
    if oracle.character is not None and (chi - oracle.character) % oracle.alphabet.q:
        raise InvalidArgument(f"phase oracle is fixed to character {oracle.character}, not {chi}")
    psi.require(Basis.ELEMENT)
    if psi.dim != oracle.domain_size:
        raise InvalidState(f"phase oracle acts on dimension {oracle.domain_size}, got {psi.dim}")
    phases = oracle.alphabet.character_vector(chi)[list(oracle.values)]
    oracle._count()
    return psi.with_amplitudes(psi.amplitudes * phases)


def ancilla_state(alphabet: OutputAlphabet, chi: int) -> StateVector:
    """conj(chi(x)) / sqrt(q) over the labels: the inverse QFT of |chi>."""
    amps = alphabet.character_vector(chi).conj() / math.sqrt(alphabet.q)
    return StateVector(Group((alphabet.q,)), amps)


def compile_phase_from_shift(
    oracle: OracleHandle | HidingFunction, chi: int, psi: StateVector
) -> StateVector:
    """Realize the phase oracle with one shift query on an ancilla.

    The ancilla is prepared in the character's eigenvector of the shift action,
    the shift oracle is applied once, and the ancilla is projected back out
    after checking the joint state still factorizes.
    """
    oracle = _handle(oracle, OracleKind.SHIFT)
    psi.require(Basis.ELEMENT)
    if psi.dim != oracle.domain_size:
        raise InvalidState(f"oracle acts on dimension {oracle.domain_size}, got {psi.dim}")
    anc = ancilla_state(oracle.alphabet, chi)
    space = joint_space(psi.space, oracle.alphabet.q)
    joint = StateVector(space, np.kron(psi.amplitudes, anc.amplitudes))
    joint = apply_shift_oracle(oracle, joint)
    out, residual = _split_off_ancilla(joint, anc)
    if residual > TOL:
        raise RuntimeError(f"ancilla left entangled (residual {residual:.3e})")
    return psi.with_amplitudes(out)


def _split_off_ancilla(joint: StateVector, anc: StateVector) -> tuple[np.ndarray, float]:
    M = joint.amplitudes.reshape(-1, anc.dim)
    out = M @ anc.amplitudes.conj()
    residual = float(np.linalg.norm(M - np.outer(out, anc.amplitudes)))
    return out, residual


def hidden_subgroup_of(G: Group, table: Sequence[int]) -> Subgroup:
    """The period group {a : f(a + g) = f(g) for all g} of a value table."""
    if len(table) != G.size:
        raise InvalidArgument(f"table has {len(table)} entries, |G| = {G.size}")
    periods = tuple(
        a for a in G.elements if all(table[G.index(G.add(a, g))] == table[i] for i, g in enumerate(G.elements))
    )
    return Subgroup(G, periods, generating_set(G, periods))


def function_from_table(G: Group, table: Sequence[int], q: int) -> HidingFunction:
    """Wrap a raw value table, checking that it hides its period group."""
    H = hidden_subgroup_of(G, table)
    index_of = {}
    for block in cosets(G, H):
        index_of[block[0]] = table[G.index(block[0])]
    labeling = tuple(index_of[block[0]] for block in cosets(G, H))
    fn = make_hiding_function(G, H, labeling, q)
    if fn.table != tuple(table):
        raise InvalidArgument("table is not constant-and-distinct on the cosets of any subgroup")
    return fn
