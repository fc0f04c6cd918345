"""Table-1 style comparison of the one-query procedures, computed from live runs.

Every cell is derived by running the algorithms on a fixture suite; the
expected values are only used afterwards to flag mismatches.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .algorithms import (
    Verdict,
    bernstein_vazirani,
    bv_oracle,
    djh_decide,
    index_q_identify,
    shor_kitaev_distribution,
    sk_success_probability,
)
from .characters import Character, kernel
from .errors import PromiseViolation
from .fixtures import KLEIN, klein_functions
from .groups import Group, Subgroup, make_group, quotient_type, subgroup_closure, trivial_subgroup
from .labelings import euler_totient, labeling_for_quotient
from .oracles import HidingFunction, OracleHandle, OracleKind, OutputAlphabet, make_hiding_function
from .statesim import qft_matrix, uniform_first_column_unitaries

EXACT = 1e-9


@dataclass(frozen=True)
class Instance:
    """A hidden subgroup with a labeling of its cosets into Z_q."""

    group: Group
    subgroup: Subgroup
    labeling: tuple[int, ...]
    q: int

    def function(self) -> HidingFunction:
        return make_hiding_function(self.group, self.subgroup, self.labeling, self.q)


def _cyclic(G: Group, H: Subgroup, perm: tuple[int, ...] | None = None) -> Instance:
    perm = tuple(range(H.index)) if perm is None else perm
    return Instance(G, H, labeling_for_quotient(G, H, perm), H.index)


def _z(*orders: int) -> Group:
    return make_group(orders)


@dataclass
class ReportFixtures:
    """Inputs for every row; tests perturb these to check the cells react."""

    # (name, table over an unstructured set S, alphabet size)
    djh: list[tuple[str, tuple[int, ...], int]] = field(default_factory=list)
    djh_unitaries: tuple[str, ...] = ("group-qft", "cyclic-qft", "random")
    bv_n: int = 3
    decision: list[tuple[Instance, bool]] = field(default_factory=list)
    general_q: tuple[int, ...] = (2, 3, 4, 5)
    general: dict[int, list[tuple[Group, Subgroup]]] = field(default_factory=dict)
    structured_cyclic: list[Instance] = field(default_factory=list)
    structured_noncyclic: list[Instance] = field(default_factory=list)
    sk_cyclic: list[Instance] = field(default_factory=list)


def default_fixtures() -> ReportFixtures:
    fx = ReportFixtures()
    fx.djh = [(name, fn.table, 2) for name, fn in klein_functions().items()]
    fx.djh += [
        ("z3-constant-on-6", (2,) * 6, 3),
        ("z3-balanced-on-6", (0, 1, 2, 2, 1, 0), 3),
        ("z4-balanced-on-8", (3, 1, 0, 2, 2, 0, 1, 3), 4),
    ]

    z4, z6, z2x4, z9 = _z(4), _z(6), _z(2, 4), _z(9)
    z33 = _z(3, 3)
    fx.decision = [
        (Instance(z4, trivial_subgroup(z4), (0, 1, 3, 2), 4), False),
        (Instance(KLEIN, trivial_subgroup(KLEIN), (0, 1, 2, 3), 4), False),
        (Instance(z33, subgroup_closure(z33, [(1, 1)]), (2, 0, 1), 3), False),
        (Instance(z2x4, subgroup_closure(z2x4, [(1, 2)]), (3, 0, 2, 1), 4), False),
        (Instance(z9, subgroup_closure(z9, [(1,)]), (1,), 3), True),
        (Instance(z6, subgroup_closure(z6, [(1,)]), (0,), 5), True),
    ]
    fx.general = {
        2: [(KLEIN, subgroup_closure(KLEIN, [(1, 1)])), (_z(2, 2, 2), subgroup_closure(_z(2, 2, 2), [(1, 1, 0), (0, 0, 1)]))],
        3: [(z33, subgroup_closure(z33, [(1, 2)])), (z9, subgroup_closure(z9, [(3,)]))],
        4: [(z4, trivial_subgroup(z4)), (z2x4, subgroup_closure(z2x4, [(1, 0)]))],
        5: [(_z(5), trivial_subgroup(_z(5)))],
    }
    fx.structured_cyclic = [
        _cyclic(KLEIN, subgroup_closure(KLEIN, [(0, 1)])),
        _cyclic(z33, subgroup_closure(z33, [(1, 0)]), (0, 2, 1)),
        _cyclic(z4, trivial_subgroup(z4)),
        _cyclic(z2x4, subgroup_closure(z2x4, [(1, 0)]), (1, 0, 3, 2)),
        _cyclic(z6, trivial_subgroup(z6)),
        _cyclic(_z(10), subgroup_closure(_z(10), [(5,)]), (2, 4, 1, 3, 0)),
    ]
    fx.structured_noncyclic = [
        Instance(KLEIN, trivial_subgroup(KLEIN), perm, 4) for perm in itertools.permutations(range(4))
    ] + [Instance(_z(2, 4), trivial_subgroup(_z(2, 4)), tuple(range(8)), 8)]
    fx.sk_cyclic = [
        _cyclic(KLEIN, subgroup_closure(KLEIN, [(1, 1)])),
        _cyclic(z33, subgroup_closure(z33, [(1, 1)])),
        _cyclic(z4, trivial_subgroup(z4)),
        _cyclic(_z(10), subgroup_closure(_z(10), [(5,)])),
    ]
    return fx


@dataclass(frozen=True)
class ReportRow:
    problem: str
    setting: str
    one_query_deterministic: str
    success_probability: str
    queries_used: int
    expected_deterministic: str
    expected_success: str | None = None

    @property
    def matches(self) -> bool:
        if self.one_query_deterministic != self.expected_deterministic:
            return False
        return self.expected_success is None or self.success_probability == self.expected_success

    def to_record(self) -> dict:
        return {
            "problem": self.problem,
            "setting": self.setting,
            "one_query_deterministic": self.one_query_deterministic,
            "success_probability": self.success_probability,
            "queries_used": self.queries_used,
            "expected_deterministic": self.expected_deterministic,
            "expected_success": self.expected_success,
            "matches": self.matches,
        }


def format_probability(p: float) -> str:
    frac = Fraction(p).limit_denominator(1000)
    if abs(float(frac) - p) < 1e-12:
        return str(frac)
    return f"{p:.12f}"


def _yes(flag: bool) -> str:
    return "Yes" if flag else "No"


def _djh_row(fx: ReportFixtures) -> ReportRow:
    ok, worst, queries = True, 1.0, 0
    for _, table, q in fx.djh:
        constant = len(set(table)) == 1
        N = len(table)
        for which in fx.djh_unitaries:
            V = uniform_first_column_unitaries(N, which, seed=11)
            for chi in range(1, q):
                oracle = OracleHandle(table, OutputAlphabet(q), OracleKind.SHIFT)
                try:
                    res = djh_decide(oracle, chi, V)
                except PromiseViolation:
                    ok = False
                    continue
                queries = max(queries, res.queries_used)
                right = res.verdict is (Verdict.CONSTANT if constant else Verdict.BALANCED)
                ok &= right
                worst = min(worst, res.p_start if constant else 1 - res.p_start)
    return ReportRow(
        "Deutsch-Jozsa-Hoyer (DJH)", "no structure on the domain; abelian X",
        _yes(ok) + " (decision)", format_probability(worst), queries, "Yes (decision)", "1",
    )


def _bv_row(fx: ReportFixtures) -> ReportRow:
    n = fx.bv_n
    ok, queries = True, 0
    for s in itertools.product(range(2), repeat=n):
        oracle = bv_oracle(s)
        try:
            ok &= bernstein_vazirani(oracle, n) == s
        except PromiseViolation:
            ok = False
        queries = max(queries, oracle.queries)
    return ReportRow(
        "Bernstein-Vazirani (BV)", f"G=Z2^{n}, H=ker(x.s)", _yes(ok), "1" if ok else "<1", queries, "Yes", "1"
    )


def _decision_row(fx: ReportFixtures) -> ReportRow:
    ok, queries = True, 0
    for inst, constant in fx.decision:
        fn = inst.function()
        V = qft_matrix(inst.group).conj().T
        for chi in range(1, inst.q):
            oracle = OracleHandle.for_function(fn, OracleKind.SHIFT)
            try:
                res = djh_decide(oracle, chi, V)
            except PromiseViolation:
                ok = False
                continue
            ok &= res.verdict is (Verdict.CONSTANT if constant else Verdict.BALANCED)
            queries = max(queries, res.queries_used)
    return ReportRow(
        "Index-q HSP: decision", "G finite abelian, [G:H] in {1, q}; any structure on X",
        _yes(ok), "1" if ok else "<1", queries, "Yes", "1",
    )


def _identify(inst: Instance, chi: int = 1) -> tuple[float, bool, int]:
    """(P[kernel of the outcome is H], outcome is one fixed character with kernel H, queries)."""
    oracle = OracleHandle.for_function(inst.function(), OracleKind.PHASE)
    res = index_q_identify(oracle, inst.group, chi)
    certain = res.success_certain and res.recovered_subgroup == inst.subgroup
    return res.probability_of(inst.subgroup), certain, res.queries_used


def _general_row(fx: ReportFixtures) -> ReportRow:
    always = []
    worst: dict[int, float] = {}
    queries = 0
    for q in fx.general_q:
        cases = fx.general.get(q, [])
        all_ok = bool(cases)
        for G, H in cases:
            for perm in itertools.permutations(range(q)):
                p, certain, used = _identify(Instance(G, H, perm, q))
                queries = max(queries, used)
                worst[q] = min(worst.get(q, 1.0), p)
                all_ok &= certain
        if all_ok:
            always.append(q)
    if always == list(fx.general_q):
        cell = "Yes"
    elif not always:
        cell = "No"
    else:
        cell = "Yes for q∈{" + ",".join(map(str, always)) + "}; otherwise no"
    success = "; ".join(f"q={q}: {format_probability(p)}" for q, p in sorted(worst.items()))
    return ReportRow(
        "Index-q HSP: identification (general)", "G finite abelian, [G:H] in {1, q}; every labeling of X",
        cell, "worst P[ker=H] " + success, queries, "Yes for q∈{2,3}; otherwise no",
    )


def _structured_row(fx: ReportFixtures) -> ReportRow:
    queries = 0
    cyclic_ok = bool(fx.structured_cyclic)
    for inst in fx.structured_cyclic:
        _, certain, used = _identify(inst)
        queries = max(queries, used)
        cyclic_ok &= certain
    noncyclic_best = 0.0
    noncyclic_fails = True
    for inst in fx.structured_noncyclic:
        if quotient_type(inst.group, inst.subgroup).is_cyclic:
            raise ValueError("non-cyclic fixture has a cyclic quotient")
        p, certain, used = _identify(inst)
        queries = max(queries, used)
        noncyclic_best = max(noncyclic_best, p)
        noncyclic_fails &= not certain
    if cyclic_ok and noncyclic_fails:
        cell = "Yes iff G/H cyclic"
    elif cyclic_ok:
        cell = "Yes"
    else:
        cell = "No"
    success = f"cyclic: {'1' if cyclic_ok else '<1'}; non-cyclic best P[ker=H]: {format_probability(noncyclic_best)}"
    return ReportRow(
        "Index-q HSP: identification (structured outputs)", "G/H = Z_q or trivial; compatible Z_q structure",
        cell, success, queries, "Yes iff G/H cyclic",
    )


def _sk_row(fx: ReportFixtures) -> ReportRow:
    deterministic = True
    cells, expected, queries = [], [], 0
    for inst in fx.sk_cyclic:
        G, H, q = inst.group, inst.subgroup, inst.subgroup.index
        oracle = OracleHandle.for_function(inst.function(), OracleKind.SHIFT)
        dist = shor_kitaev_distribution(oracle, G)
        queries = max(queries, oracle.queries)
        p = sum(w for a, w in dist.items() if w > EXACT and kernel(Character(G, a)) == H)
        if abs(p - float(sk_success_probability(G, H))) > 1e-12:
            raise RuntimeError("sampled and counted Shor-Kitaev success disagree")
        deterministic &= p >= 1 - EXACT
        cells.append(f"q={q}: {format_probability(p)}")
        expected.append(f"q={q}: {Fraction(euler_totient(q), q)}")
    return ReportRow(
        "Abelian HSP / Shor-Kitaev (SK)", "G finite abelian, H arbitrary; shift oracle",
        _yes(deterministic), "; ".join(cells), queries, "No", "; ".join(expected),
    )


def build_report(fixtures: ReportFixtures | None = None) -> list[ReportRow]:
    fx = default_fixtures() if fixtures is None else fixtures
    return [
        _djh_row(fx),
        _bv_row(fx),
        _decision_row(fx),
        _general_row(fx),
        _structured_row(fx),
        _sk_row(fx),
    ]


def render_table(rows: list[ReportRow]) -> str:
    headers = ("Problem / algorithm", "1-query deterministic?", "Success probability", "Queries", "Expected")
    body = [
        (r.problem, r.one_query_deterministic, r.success_probability, str(r.queries_used), "ok" if r.matches else "MISMATCH")
        for r in rows
    ]
    widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(headers)]
    line = lambda cells: " | ".join(c.ljust(w) for c, w in zip(cells, widths))
    out = [line(headers), "-+-".join("-" * w for w in widths)]
    out += [line(b) for b in body]
    return "\n".join(out)
