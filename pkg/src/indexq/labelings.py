"""Z_q structures on a q-element alphabet: affine bijections and compatibility.

A labeling is a permutation of ``range(q)``. It is affine when it has the form
``x -> alpha*x + beta mod q`` with ``gcd(alpha, q) == 1``. Relative to a
compatible base labeling, these are the relabelings that keep chi o f a
character up to a global phase, so the one-query identification still
measures a single character.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .algorithms import index_q_identify
from .errors import InvalidArgument, RefusedOperation
from .groups import Group, Subgroup, cyclic_coset_coordinates, quotient_type
from .oracles import OracleHandle, OracleKind, make_hiding_function

Labeling = tuple[int, ...]

MAX_CLASSIFY_Q = 8
MAX_SCAN_Q = 5


def euler_totient(q: int) -> int:
    if q < 1:
        raise InvalidArgument(f"totient is defined for q >= 1, got {q}")
    return sum(1 for m in range(1, q + 1) if math.gcd(m, q) == 1)


@dataclass(frozen=True)
class AffineMap:
    q: int
    alpha: int
    beta: int

    def __post_init__(self) -> None:
        if math.gcd(self.alpha, self.q) != 1:
            raise InvalidArgument(f"alpha={self.alpha} is not a unit mod {self.q}")

    def __call__(self, x: int) -> int:
        return (self.alpha * x + self.beta) % self.q

    def compose(self, other: AffineMap) -> AffineMap:
        """self o other."""
        return AffineMap(self.q, self.alpha * other.alpha % self.q, (self.alpha * other.beta + self.beta) % self.q)

    def as_labeling(self) -> Labeling:
        return tuple(self(x) for x in range(self.q))


def _check_permutation(perm: Sequence[int]) -> Labeling:
    perm = tuple(perm)
    if sorted(perm) != list(range(len(perm))):
        raise InvalidArgument(f"{perm} is not a permutation of range({len(perm)})")
    return perm


def is_affine(labeling: Sequence[int]) -> AffineMap | None:
    perm = _check_permutation(labeling)
    q = len(perm)
    if q == 1:
        return AffineMap(1, 1, 0)
    beta = perm[0]
    alpha = (perm[1] - perm[0]) % q
    if math.gcd(alpha, q) != 1:
        return None
    witness = AffineMap(q, alpha, beta)
    if all(witness(x) == perm[x] for x in range(q)):
        return witness
    return None


def all_affine_maps(q: int) -> list[AffineMap]:
    return [AffineMap(q, a, b) for a in range(1, q + 1) if math.gcd(a, q) == 1 for b in range(q)]


@dataclass(frozen=True)
class LabelingClassification:
    q: int
    affine: list[tuple[Labeling, AffineMap]]
    non_affine: list[Labeling]

    @property
    def affine_count(self) -> int:
        return len(self.affine)

    @property
    def non_affine_count(self) -> int:
        return len(self.non_affine)


def classify_all_labelings(q: int) -> LabelingClassification:
    if q < 1:
        raise InvalidArgument("q must be positive")
    if q > MAX_CLASSIFY_Q:
        raise RefusedOperation(f"enumerating {q}! labelings is above the cap q <= {MAX_CLASSIFY_Q}")
    affine, other = [], []
    for perm in itertools.permutations(range(q)):
        w = is_affine(perm)
        if w is None:
            other.append(perm)
        else:
            affine.append((perm, w))
    return LabelingClassification(q, affine, other)


@dataclass(frozen=True)
class ScanRecord:
    labeling: Labeling
    affine: AffineMap | None
    success_probability: float
    deterministic: bool

    def to_record(self) -> dict:
        return {
            "labeling": list(self.labeling),
            "affine": None if self.affine is None else {"alpha": self.affine.alpha, "beta": self.affine.beta},
            "success_probability": f"{self.success_probability:.12f}",
            "deterministic": self.deterministic,
        }


def labeling_for_quotient(G: Group, H: Subgroup, perm: Sequence[int]) -> Labeling:
    """Coset-index labeling sending the coset k*c (c a generating coset) to perm[k]."""
    coords = cyclic_coset_coordinates(G, H)
    return tuple(perm[k] for k in coords)


def behavioral_compatibility_scan(G: Group, H: Subgroup, chi: int = 1) -> list[ScanRecord]:
    """Run the identification under every Z_q labeling and record its success.

    Labelings are taken relative to a generator of G/H, so the identity
    permutation is an isomorphism G/H -> Z_q. ``success_probability`` is the
    chance the measured character has kernel H; ``deterministic`` says the
    outcome is a single character. Affine labelings must succeed with
    certainty; a failure there raises.
    """
    qt = quotient_type(G, H)
    if not qt.is_cyclic:
        raise InvalidArgument(f"G/H has invariant factors {qt.cyclic_factors}; the scan needs a cyclic quotient")
    q = H.index
    if q > MAX_SCAN_Q:
        raise RefusedOperation(f"scan over {q}! labelings is above the cap q <= {MAX_SCAN_Q}")
    records = []
    for perm in itertools.permutations(range(q)):
        fn = make_hiding_function(G, H, labeling_for_quotient(G, H, perm), q)
        result = index_q_identify(OracleHandle.for_function(fn, OracleKind.PHASE), G, chi)
        p = result.probability_of(H)
        certain = result.success_certain and result.recovered_subgroup == H
        witness = is_affine(perm)
        if witness is not None and not (certain and abs(p - 1) <= 1e-9):
            raise RuntimeError(f"affine labeling {perm} identified H only with probability {p}")
        records.append(ScanRecord(perm, witness, p, certain))
    return records
