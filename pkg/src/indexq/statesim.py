"""Dense statevectors over CG (and CG (x) CX), the group QFT, and measurement.

Amplitudes are indexed through the group's lexicographic element order. A
state also records whether its computational basis currently stands for
group elements or for characters; the QFT toggles between the two.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .characters import Character, character_table
from .errors import InvalidArgument, InvalidState
from .groups import Element, Group, format_group, parse_group

TOL = 1e-9


class Basis(enum.Enum):
    ELEMENT = "element"
    CHARACTER = "character"


@dataclass(frozen=True, eq=False)
class StateVector:
    space: Group
    amplitudes: np.ndarray
    basis: Basis = Basis.ELEMENT

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.space.size:
            raise InvalidArgument(f"{amps.shape[0]} amplitudes for a space of size {self.space.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > TOL:
            raise InvalidState(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.space.size

    def amplitude(self, label: Element) -> complex:
        return complex(self.amplitudes[self.space.index(label)])

    def require(self, basis: Basis, space: Group | None = None) -> None:
        if self.basis is not basis:
            raise InvalidState(f"expected a state in the {basis.value} basis, got {self.basis.value}")
        if space is not None and self.space != space:
            raise InvalidState(f"state lives on {self.space}, expected {space}")

    def with_amplitudes(self, amps: np.ndarray, basis: Basis | None = None) -> StateVector:
        return StateVector(self.space, amps, self.basis if basis is None else basis)

    def to_record(self) -> dict:
        return {
            "basis": self.basis.value,
            "group": format_group(self.space),
            "amplitudes": [[float(z.real), float(z.imag)] for z in self.amplitudes],
        }

    @classmethod
    def from_record(cls, record: dict) -> StateVector:
        amps = np.array([complex(re, im) for re, im in record["amplitudes"]])
        return cls(parse_group(record["group"]), amps, Basis(record["basis"]))


def basis_state(space: Group, label: Element, basis: Basis = Basis.ELEMENT) -> StateVector:
    amps = np.zeros(space.size, dtype=complex)
    amps[space.index(label)] = 1
    return StateVector(space, amps, basis)


def democratic_state(space: Group) -> StateVector:
    return StateVector(space, np.full(space.size, 1 / math.sqrt(space.size), dtype=complex))


def random_state(space: Group, rng: np.random.Generator, basis: Basis = Basis.ELEMENT) -> StateVector:
    v = rng.normal(size=space.size) + 1j * rng.normal(size=space.size)
    return StateVector(space, v / np.linalg.norm(v), basis)


def inner(phi: StateVector, psi: StateVector) -> complex:
    """<phi|psi>."""
    if phi.space != psi.space:
        raise InvalidState("inner product of states on different spaces")
    return complex(np.vdot(phi.amplitudes, psi.amplitudes))


def fidelity(phi: StateVector, psi: StateVector) -> float:
    """|<phi|psi>|, insensitive to global phase."""
    return abs(inner(phi, psi))


def equal_up_to_phase(phi: StateVector, psi: StateVector, tol: float = TOL) -> bool:
    return phi.basis is psi.basis and fidelity(phi, psi) >= 1 - tol


def remove_global_phase(psi: StateVector) -> StateVector:
    """Rotate so the largest-magnitude amplitude is real and positive."""
    k = int(np.argmax(np.abs(psi.amplitudes)))
    z = psi.amplitudes[k]
    return psi.with_amplitudes(psi.amplitudes * (abs(z) / z))


# --- QFT ------------------------------------------------------------------


@lru_cache(maxsize=64)
def _qft(G: Group) -> np.ndarray:
    F = character_table(G) / math.sqrt(G.size)
    F.setflags(write=False)
    return F


def qft_matrix(G: Group) -> np.ndarray:
    """F[chi, g] = chi(g) / sqrt|G|, rows and columns in enumeration order."""
    return _qft(G)


def qft(psi: StateVector) -> StateVector:
    psi.require(Basis.ELEMENT)
    return psi.with_amplitudes(_qft(psi.space) @ psi.amplitudes, Basis.CHARACTER)


def inverse_qft(psi: StateVector) -> StateVector:
    psi.require(Basis.CHARACTER)
    return psi.with_amplitudes(_qft(psi.space).conj().T @ psi.amplitudes, Basis.ELEMENT)


def delta_chi_state(G: Group, chi: Character) -> StateVector:
    """The normalized vector sum_g conj(chi(g)) |g> / sqrt|G|."""
    if chi.group != G:
        raise InvalidArgument("character belongs to a different group")
    amps = np.array([chi(g).conjugate() for g in G.elements]) / math.sqrt(G.size)
    return StateVector(G, amps)


@lru_cache(maxsize=256)
def _shift_perm(G: Group, a: Element) -> np.ndarray:
    # perm[i] = index of a + element(i)
    return np.array([G.index(G.add(a, g)) for g in G.elements], dtype=np.intp)


def shift_action(a: Element, psi: StateVector) -> StateVector:
    psi.require(Basis.ELEMENT)
    G = psi.space
    a = G.check(a)
    new = np.empty_like(psi.amplitudes)
    new[_shift_perm(G, a)] = psi.amplitudes
    return psi.with_amplitudes(new)


def phase_action(a: Element, psi: StateVector) -> StateVector:
    psi.require(Basis.CHARACTER)
    G = psi.space
    a = G.check(a)
    phases = character_table(G)[:, G.index(a)]
    return psi.with_amplitudes(psi.amplitudes * phases)


def apply_unitary(U: np.ndarray, psi: StateVector, basis: Basis | None = None) -> StateVector:
    U = np.asarray(U)
    if U.shape != (psi.dim, psi.dim):
        raise InvalidState(f"unitary of shape {U.shape} on a state of dimension {psi.dim}")
    return psi.with_amplitudes(U @ psi.amplitudes, basis)


def is_unitary(U: np.ndarray, tol: float = TOL) -> bool:
    U = np.asarray(U)
    return U.shape[0] == U.shape[1] and np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))) < tol


# --- measurement ----------------------------------------------------------


def probabilities(psi: StateVector) -> np.ndarray:
    p = np.abs(psi.amplitudes) ** 2
    return p / p.sum()


def measure_distribution(psi: StateVector) -> dict[Element, float]:
    """Exact outcome distribution, keyed by basis label."""
    return dict(zip(psi.space.elements, probabilities(psi).tolist()))


def sample_measurement(psi: StateVector, rng_seed: int | np.random.Generator) -> Element:
    rng = np.random.default_rng(rng_seed)
    i = int(rng.choice(psi.dim, p=probabilities(psi)))
    return psi.space.element(i)


# --- two registers --------------------------------------------------------


def joint_space(G: Group, q: int) -> Group:
    """Index set of CG (x) CX with the X register as the last (fastest) factor."""
    return Group(G.orders + (q,))


def first_register(space: Group) -> Group:
    if space.rank < 2:
        raise InvalidState(f"{space} is not a two-register space")
    return Group(space.orders[:-1])


def tensor(psi: StateVector, phi: StateVector) -> StateVector:
    psi.require(Basis.ELEMENT)
    phi.require(Basis.ELEMENT)
    if phi.space.rank != 1:
        raise InvalidState("second register must be a single cyclic index set")
    space = joint_space(psi.space, phi.dim)
    return StateVector(space, np.kron(psi.amplitudes, phi.amplitudes))


def second_register_marginal(psi: StateVector) -> np.ndarray:
    q = psi.space.orders[-1]
    return (np.abs(psi.amplitudes.reshape(-1, q)) ** 2).sum(axis=0)


def collapse_second_register(psi: StateVector, outcome: int) -> StateVector:
    """Project the X register onto ``outcome`` and renormalize the G register."""
    psi.require(Basis.ELEMENT)
    G = first_register(psi.space)
    q = psi.space.orders[-1]
    column = psi.amplitudes.reshape(G.size, q)[:, outcome]
    weight = np.linalg.norm(column)
    if weight < TOL:
        raise RuntimeError(f"outcome {outcome} has zero probability")
    return StateVector(G, column / weight)


def partial_measure_second_register(
    psi: StateVector, rng_seed: int | np.random.Generator
) -> tuple[int, StateVector]:
    psi.require(Basis.ELEMENT)
    marginal = second_register_marginal(psi)
    rng = np.random.default_rng(rng_seed)
    outcome = int(rng.choice(marginal.shape[0], p=marginal / marginal.sum()))
    return outcome, collapse_second_register(psi, outcome)


def schmidt_coefficients(psi: StateVector) -> np.ndarray:
    q = psi.space.orders[-1]
    return np.linalg.svd(psi.amplitudes.reshape(-1, q), compute_uv=False)


# --- unitaries with a uniform first column --------------------------------


class UnitaryChoice(enum.Enum):
    GROUP_QFT = "group-qft"
    CYCLIC_QFT = "cyclic-qft"
    RANDOM = "random"


def _default_factors(N: int) -> tuple[int, ...]:
    # prime factorization with multiplicity: Z_2^n for N = 2^n
    factors, p = [], 2
    while p * p <= N:
        while N % p == 0:
            factors.append(p)
            N //= p
        p += 1
    if N > 1 or not factors:
        factors.append(N)
    return tuple(factors)


def uniform_first_column_unitaries(
    N: int,
    which: UnitaryChoice | str,
    factors: Sequence[int] | None = None,
    seed: int = 0,
) -> np.ndarray:
    """An N x N unitary V with <x|V|0> = 1/sqrt(N) for every x.

    ``GROUP_QFT`` is the inverse QFT of ``factors`` (by default the prime
    factorization of N, so Z_2^n for N = 2^n), ``CYCLIC_QFT`` the inverse QFT
    of Z_N, and ``RANDOM`` completes the uniform vector to a unitary with a
    seeded random complement via QR.
    """
    if N < 1:
        raise InvalidArgument("N must be positive")
    which = UnitaryChoice(which)
    if which is UnitaryChoice.CYCLIC_QFT:
        return _qft(Group((N,))).conj().T.copy()
    if which is UnitaryChoice.GROUP_QFT:
        orders = tuple(factors) if factors is not None else _default_factors(N)
        if math.prod(orders) != N:
            raise InvalidArgument(f"factors {orders} do not multiply to {N}")
        return _qft(Group(orders)).conj().T.copy()
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    u = np.full(N, 1 / math.sqrt(N), dtype=complex)
    A[:, 0] = u
    Q, R = np.linalg.qr(A)
    # A[:, 0] = Q[:, 0] * R[0, 0] with |R[0, 0]| = 1
    Q[:, 0] *= R[0, 0]
    return Q


def has_uniform_first_column(V: np.ndarray, tol: float = TOL) -> bool:
    V = np.asarray(V)
    N = V.shape[0]
    return bool(np.max(np.abs(V[:, 0] - 1 / math.sqrt(N))) < tol)
