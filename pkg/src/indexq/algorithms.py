"""One-query procedures: DJH decision, index-q identification, Shor-Kitaev, BV.

Each procedure runs against an :class:`~indexq.oracles.OracleHandle` and
checks afterwards that it made exactly the number of queries it claims.
Exact mode (``seed=None``) keeps the whole final distribution and reports its
most likely outcome; sampling mode draws the measurement from a seeded
generator.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .characters import Character, h_perp, kernel
from .errors import InvalidArgument, InvalidState, PromiseViolation
from .groups import Element, Group, Subgroup, whole_group
from .oracles import (
    OracleHandle,
    OracleKind,
    OutputAlphabet,
    apply_phase_oracle_direct,
    apply_shift_oracle,
    compile_phase_from_shift,
)
from .statesim import (
    TOL,
    Basis,
    StateVector,
    apply_unitary,
    basis_state,
    collapse_second_register,
    has_uniform_first_column,
    inverse_qft,
    is_unitary,
    probabilities,
    qft,
    second_register_marginal,
    tensor,
)


class Verdict(enum.Enum):
    CONSTANT = "constant"
    BALANCED = "balanced"


@dataclass(frozen=True)
class DecisionResult:
    verdict: Verdict
    final_distribution: dict[int, float]
    queries_used: int

    @property
    def p_start(self) -> float:
        return self.final_distribution[0]


@dataclass(frozen=True)
class IdentificationResult:
    measured_character: Character
    recovered_subgroup: Subgroup
    success_certain: bool
    queries_used: int
    distribution: dict[Element, float]
    final_state: StateVector

    def probability_of(self, H: Subgroup) -> float:
        """Probability that the final measurement yields a character with kernel H."""
        G = H.parent
        return sum(p for a, p in self.distribution.items() if p > 0 and kernel(Character(G, a)) == H)


@dataclass(frozen=True)
class SKSample:
    character: Character
    kernel: Subgroup
    second_register: int


def _queried(oracle: OracleHandle, before: int, expected: int = 1) -> int:
    used = oracle.queries - before
    if used != expected:
        raise RuntimeError(f"expected {expected} oracle quer{'y' if expected == 1 else 'ies'}, made {used}")
    return used


def _query_phase(oracle: OracleHandle, chi: int, psi: StateVector) -> StateVector:
    # a phase handle is queried directly; a shift handle goes through the ancilla trick
    if oracle.kind is OracleKind.PHASE:
        return apply_phase_oracle_direct(oracle, chi, psi)
    return compile_phase_from_shift(oracle, chi, psi)


def djh_decide(oracle: OracleHandle, chi: int, V: np.ndarray) -> DecisionResult:
    """Decide constant vs balanced for f: S -> X with one phase query.

    V is any unitary whose first column is uniform; the verdict is read off
    the probability of returning to the start state ``|0>``.
    """
    q = oracle.alphabet.q
    if chi % q == 0:
        raise InvalidArgument("DJH needs a nontrivial character of the output alphabet")
    V = np.asarray(V, dtype=complex)
    N = oracle.domain_size
    if V.shape != (N, N) or not is_unitary(V) or not has_uniform_first_column(V):
        raise InvalidArgument("V must be an N x N unitary with a uniform first column")
    S = Group((N,))
    before = oracle.queries
    psi = apply_unitary(V, basis_state(S, (0,)))
    psi = _query_phase(oracle, chi, psi)
    psi = apply_unitary(V.conj().T, psi)
    used = _queried(oracle, before)
    probs = probabilities(psi)
    p0 = float(probs[0])
    if p0 >= 1 - TOL:
        verdict = Verdict.CONSTANT
    elif p0 <= TOL:
        verdict = Verdict.BALANCED
    else:
        raise PromiseViolation(f"probability {p0:.6f} of the start state fits neither promise")
    return DecisionResult(verdict, dict(enumerate(probs.tolist())), used)


def index_q_identify(
    oracle: OracleHandle, G: Group, chi: int = 1, seed: int | None = None
) -> IdentificationResult:
    """Identify the hidden subgroup with a single phase query.

    Start in the trivial character, inverse-QFT to the uniform superposition,
    query, QFT back and read a character; its kernel is the answer. ``chi``
    must be a faithful character of the alphabet's Z_q structure.
    """
    q = oracle.alphabet.q
    if not oracle.alphabet.is_faithful(chi):
        raise InvalidArgument(f"character exponent {chi} is not faithful on Z_{q}")
    if oracle.domain_size != G.size:
        raise InvalidState(f"oracle domain has {oracle.domain_size} points, |G| = {G.size}")
    before = oracle.queries
    psi = basis_state(G, G.identity(), Basis.CHARACTER)
    psi = inverse_qft(psi)
    psi = _query_phase(oracle, chi, psi)
    psi = qft(psi)
    used = _queried(oracle, before)

    probs = probabilities(psi)
    p_trivial = float(probs[0])
    if TOL < p_trivial < 1 - TOL:
        raise PromiseViolation(
            f"trivial character measured with probability {p_trivial:.6f}; f is neither constant nor balanced"
        )
    if seed is None:
        i = int(np.argmax(probs))
    else:
        i = int(np.random.default_rng(seed).choice(G.size, p=probs))
    rho = Character(G, G.element(i))
    return IdentificationResult(
        measured_character=rho,
        recovered_subgroup=kernel(rho),
        success_certain=bool(probs.max() >= 1 - TOL),
        queries_used=used,
        distribution=dict(zip(G.elements, probs.tolist())),
        final_state=psi,
    )


def rho_f_character(values: tuple[int, ...], G: Group, alphabet: OutputAlphabet, chi: int) -> Character | None:
    """The character equal to chi(f(g)) / chi(f(0)) on all of G, if there is one.

    Decided on exact phases: the candidate's exponents are read off the unit
    vectors and then checked at every element.
    """
    def turns(g: Element) -> Fraction:
        v = alphabet.value(values[G.index(g)]) - alphabet.value(values[0])
        return Fraction(chi * v, alphabet.q) % 1

    exps = []
    for j, n in enumerate(G.orders):
        unit = tuple(int(i == j) for i in range(G.rank))
        a = turns(unit) * n
        if a.denominator != 1:
            return None
        exps.append(int(a))
    rho = Character(G, tuple(exps))
    if all(rho.phase(g) == turns(g) for g in G.elements):
        return rho
    return None


# --- Shor-Kitaev ----------------------------------------------------------


def _sk_after_query(oracle: OracleHandle, G: Group) -> StateVector:
    if oracle.kind is not OracleKind.SHIFT:
        raise InvalidArgument("Shor-Kitaev uses the shift oracle")
    if oracle.domain_size != G.size:
        raise InvalidState(f"oracle domain has {oracle.domain_size} points, |G| = {G.size}")
    q = oracle.alphabet.q
    first = inverse_qft(basis_state(G, G.identity(), Basis.CHARACTER))
    second = basis_state(Group((q,)), (oracle.alphabet.zero,))
    return apply_shift_oracle(oracle, tensor(first, second))


def shor_kitaev_distribution(oracle: OracleHandle, G: Group) -> dict[Element, float]:
    """Exact law of the sampled character, averaged over the discarded outcome."""
    before = oracle.queries
    joint = _sk_after_query(oracle, G)
    _queried(oracle, before)
    marginal = second_register_marginal(joint)
    total = np.zeros(G.size)
    for x, w in enumerate(marginal):
        if w > TOL:
            total += w * probabilities(qft(collapse_second_register(joint, x)))
    total /= total.sum()
    return dict(zip(G.elements, total.tolist()))


def shor_kitaev_sample(oracle: OracleHandle, G: Group, seed: int | np.random.SeedSequence) -> SKSample:
    rng = np.random.default_rng(seed)
    before = oracle.queries
    joint = _sk_after_query(oracle, G)
    _queried(oracle, before)
    marginal = second_register_marginal(joint)
    x = int(rng.choice(marginal.shape[0], p=marginal / marginal.sum()))
    psi = qft(collapse_second_register(joint, x))
    i = int(rng.choice(G.size, p=probabilities(psi)))
    rho = Character(G, G.element(i))
    return SKSample(rho, kernel(rho), x)


def shor_kitaev_samples(oracle: OracleHandle, G: Group, t: int, seed: int) -> list[SKSample]:
    if t < 1:
        raise InvalidArgument("need at least one sample")
    children = np.random.SeedSequence(seed).spawn(t)
    return [shor_kitaev_sample(oracle, G, child) for child in children]


def shor_kitaev_intersect(oracle: OracleHandle, G: Group, t: int, seed: int) -> Subgroup:
    """Intersection of the kernels of ``t`` independent samples (t queries)."""
    before = oracle.queries
    samples = shor_kitaev_samples(oracle, G, t, seed)
    _queried(oracle, before, t)
    result = whole_group(G)
    for s in samples:
        result = result & s.kernel
    return result


def sk_success_probability(G: Group, H: Subgroup) -> Fraction:
    """Chance that one Shor-Kitaev sample has kernel exactly H."""
    perp = h_perp(G, H)
    good = sum(1 for rho in perp if kernel(rho) == H)
    return Fraction(good, len(perp))


# --- Bernstein-Vazirani ---------------------------------------------------


def bv_table(s: tuple[int, ...]) -> tuple[int, ...]:
    G = Group((2,) * len(s))
    return tuple(sum(a * b for a, b in zip(x, s)) % 2 for x in G.elements)


def bv_oracle(s: tuple[int, ...], kind: OracleKind = OracleKind.PHASE) -> OracleHandle:
    return OracleHandle(bv_table(s), OutputAlphabet(2), kind, 1 if kind is OracleKind.PHASE else None)


def bernstein_vazirani(oracle: OracleHandle, n: int) -> tuple[int, ...]:
    """Recover s from f(x) = x.s as the index-2 instance on Z_2^n."""
    G = Group((2,) * n)
    result = index_q_identify(oracle, G, chi=1)
    if not result.success_certain:
        raise PromiseViolation("final distribution is not concentrated; f is not linear")
    return result.measured_character.exponents

