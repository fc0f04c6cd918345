import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_groups
from indexq.algorithms import (
    Verdict,
    bernstein_vazirani,
    bv_oracle,
    djh_decide,
    index_q_identify,
    rho_f_character,
    shor_kitaev_distribution,
    shor_kitaev_intersect,
    shor_kitaev_sample,
    sk_success_probability,
)
from indexq.characters import Character, h_perp, kernel
from indexq.errors import InvalidArgument, PromiseViolation
from indexq.fixtures import KLEIN, KLEIN_FUNCTIONS, klein_function
from indexq.groups import (
    all_subgroups,
    enumerate_subgroups_of_index,
    format_group,
    make_group,
    quotient_type,
    subgroup_closure,
    trivial_subgroup,
    whole_group,
)
from indexq.labelings import euler_totient, labeling_for_quotient
from indexq.oracles import OracleHandle, OracleKind, OutputAlphabet, make_hiding_function
from indexq.statesim import Basis, UnitaryChoice, basis_state, fidelity, uniform_first_column_unitaries

CONSTANT = {"f0", "f1"}


def _phase(fn, structure=None):
    return OracleHandle.for_function(fn, OracleKind.PHASE, structure=structure)


def _shift(fn, structure=None):
    return OracleHandle.for_function(fn, OracleKind.SHIFT, structure=structure)


# --- DJH --------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(KLEIN_FUNCTIONS))
@pytest.mark.parametrize("which", [c.value for c in UnitaryChoice])
@pytest.mark.parametrize("kind", [OracleKind.PHASE, OracleKind.SHIFT])
def test_djh_on_klein_functions(name, which, kind):
    fn = klein_function(name)
    oracle = OracleHandle.for_function(fn, kind)
    result = djh_decide(oracle, 1, uniform_first_column_unitaries(4, which, seed=3))
    assert result.verdict is (Verdict.CONSTANT if name in CONSTANT else Verdict.BALANCED)
    assert result.p_start in (pytest.approx(0, abs=1e-9), pytest.approx(1, abs=1e-9))
    assert result.queries_used == 1 == oracle.queries


@pytest.mark.parametrize(
    "table, q, constant",
    [((2,) * 6, 3, True), ((0, 1, 2, 2, 1, 0), 3, False), ((3, 1, 0, 2, 2, 0, 1, 3), 4, False), ((1,) * 5, 2, True)],
)
def test_djh_on_unstructured_sets(table, q, constant):
    N = len(table)
    for chi, seed in itertools.product(range(1, q), range(3)):
        V = uniform_first_column_unitaries(N, "random", seed=seed)
        res = djh_decide(OracleHandle(table, OutputAlphabet(q), OracleKind.PHASE), chi, V)
        assert res.verdict is (Verdict.CONSTANT if constant else Verdict.BALANCED)


def test_djh_rejects_bad_inputs():
    oracle = _phase(klein_function("left"))
    with pytest.raises(InvalidArgument):
        djh_decide(oracle, 0, uniform_first_column_unitaries(4, "group-qft"))
    with pytest.raises(InvalidArgument):
        djh_decide(oracle, 1, np.eye(4))
    with pytest.raises(InvalidArgument):
        djh_decide(oracle, 1, uniform_first_column_unitaries(2, "group-qft"))
    assert oracle.queries == 0


def test_djh_flags_unbalanced_function():
    oracle = OracleHandle((0, 0, 0, 1), OutputAlphabet(2), OracleKind.PHASE)
    with pytest.raises(PromiseViolation):
        djh_decide(oracle, 1, uniform_first_column_unitaries(4, "cyclic-qft"))


# --- identification ---------------------------------------------------------


def _check_certain_and_rho_f(fn, result, oracle, chi=1):
    rho = rho_f_character(oracle.values, fn.group, oracle.alphabet, chi)
    assert rho is not None
    # sum_g rho(g)|g> is the delta-state of conj(rho), so the QFT lands there
    target = basis_state(fn.group, rho.conjugate().exponents, Basis.CHARACTER)
    assert fidelity(target, result.final_state) >= 1 - 1e-9
    assert result.measured_character == rho.conjugate()
    assert result.recovered_subgroup == fn.subgroup == kernel(rho)
    assert result.success_certain and result.queries_used == 1 == oracle.queries


def test_identify_xor():
    fn = klein_function("xor")
    oracle = _phase(fn)
    result = index_q_identify(oracle, KLEIN)
    assert result.measured_character.exponents == (1, 1)
    _check_certain_and_rho_f(fn, result, oracle)


@pytest.mark.parametrize("name", sorted(KLEIN_FUNCTIONS))
def test_identify_all_klein_functions(name):
    fn = klein_function(name)
    oracle = _phase(fn)
    _check_certain_and_rho_f(fn, index_q_identify(oracle, KLEIN), oracle)


def test_constant_function_gives_trivial_character():
    G = make_group([3, 3])
    fn = make_hiding_function(G, whole_group(G), (2,), 3)
    result = index_q_identify(_phase(fn), G)
    assert result.measured_character.is_trivial and result.recovered_subgroup == whole_group(G)


@pytest.mark.parametrize("H", enumerate_subgroups_of_index(make_group([3, 3]), 3), ids=lambda H: str(H.generators))
@pytest.mark.parametrize("labeling", list(itertools.permutations(range(3))))
@pytest.mark.parametrize("chi", [1, 2])
def test_z3_squared_every_labeling_recovers_h(H, labeling, chi):
    fn = make_hiding_function(H.parent, H, labeling, 3)
    oracle = _phase(fn)
    _check_certain_and_rho_f(fn, index_q_identify(oracle, H.parent, chi), oracle, chi)


def test_z4_non_affine_labeling_is_uncertain():
    G = make_group([4])
    fn = make_hiding_function(G, trivial_subgroup(G), (0, 1, 3, 2), 4)
    result = index_q_identify(_phase(fn), G)
    assert not result.success_certain
    assert result.probability_of(trivial_subgroup(G)) < 1 - 1e-9
    assert rho_f_character(fn.table, G, OutputAlphabet(4), 1) is None


def test_identification_requires_faithful_character():
    G = make_group([4])
    fn = make_hiding_function(G, trivial_subgroup(G), (0, 1, 2, 3), 4)
    oracle = _phase(fn)
    with pytest.raises(InvalidArgument):
        index_q_identify(oracle, G, chi=2)
    assert oracle.queries == 0


def test_identification_flags_broken_promise():
    # f takes value 0 on three quarters of Z4: neither constant nor balanced
    oracle = OracleHandle((0, 0, 0, 1), OutputAlphabet(2), OracleKind.PHASE)
    with pytest.raises(PromiseViolation):
        index_q_identify(oracle, make_group([4]))


def test_sampling_mode_is_reproducible():
    G = make_group([4])
    fn = make_hiding_function(G, trivial_subgroup(G), (0, 1, 3, 2), 4)
    a = index_q_identify(_phase(fn), G, seed=11)
    b = index_q_identify(_phase(fn), G, seed=11)
    assert a.measured_character == b.measured_character


def test_shift_handle_uses_compiled_phase():
    fn = klein_function("right")
    oracle = _shift(fn)
    result = index_q_identify(oracle, KLEIN)
    assert result.recovered_subgroup == fn.subgroup and oracle.queries == 1


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([[2, 2], [4], [6], [2, 4], [3, 3], [2, 2, 2], [5]]), st.data())
def test_identify_and_decide_agree(orders, data):
    G = make_group(orders)
    qs = sorted({H.index for H in all_subgroups(G) if H.index > 1})
    q = data.draw(st.sampled_from(qs))
    H = data.draw(st.sampled_from([K for K in all_subgroups(G) if K.index in (1, q)]))
    labeling = data.draw(st.permutations(range(q)))[: H.index]
    fn = make_hiding_function(G, H, labeling, q)
    result = index_q_identify(_phase(fn), G)
    decision = djh_decide(_phase(fn), 1, uniform_first_column_unitaries(G.size, "random", seed=1))
    assert result.measured_character.is_trivial == (decision.verdict is Verdict.CONSTANT)
    assert decision.verdict is (Verdict.CONSTANT if H.index == 1 else Verdict.BALANCED)


def test_affine_relabelings_keep_certainty_on_cyclic_quotients():
    for orders, gens in [([4], []), ([6], []), ([2, 4], [(1, 0)]), ([10], [(5,)])]:
        G = make_group(orders)
        H = subgroup_closure(G, gens)
        q = H.index
        for alpha in range(1, q):
            if np.gcd(alpha, q) != 1:
                continue
            for beta in range(q):
                perm = tuple((alpha * k + beta) % q for k in range(q))
                fn = make_hiding_function(G, H, labeling_for_quotient(G, H, perm), q)
                oracle = _phase(fn)
                _check_certain_and_rho_f(fn, index_q_identify(oracle, G), oracle)


# --- Shor-Kitaev ------------------------------------------------------------


def test_sk_whole_group_gives_trivial_character():
    G = make_group([3, 2])
    fn = make_hiding_function(G, whole_group(G), (1,), 2)
    dist = shor_kitaev_distribution(_shift(fn), G)
    assert dist[(0, 0)] == pytest.approx(1, abs=1e-12)
    assert shor_kitaev_sample(_shift(fn), G, 0).character.is_trivial


def test_sk_on_z4_with_order_two_subgroup():
    G = make_group([4])
    H = subgroup_closure(G, [(2,)])
    dist = shor_kitaev_distribution(_shift(make_hiding_function(G, H, (1, 0))), G)
    assert dist == pytest.approx({(0,): 0.5, (1,): 0.0, (2,): 0.5, (3,): 0.0}, abs=1e-12)


@pytest.mark.parametrize("G", small_groups(64)[::4], ids=format_group)
def test_sk_distribution_is_uniform_on_h_perp(G):
    for H in all_subgroups(G)[:40]:
        fn = make_hiding_function(G, H, tuple(range(H.index)))
        dist = shor_kitaev_distribution(_shift(fn), G)
        perp = {chi.exponents for chi in h_perp(G, H)}
        for g, p in dist.items():
            assert abs(p - (1 / len(perp) if g in perp else 0)) < 1e-12


def test_sk_samples_land_in_h_perp():
    G = make_group([2, 6])
    H = subgroup_closure(G, [(1, 3)])
    fn = make_hiding_function(G, H, tuple(range(H.index)))
    for seed in range(30):
        oracle = _shift(fn)
        s = shor_kitaev_sample(oracle, G, seed)
        assert H <= s.kernel and oracle.queries == 1


def test_sk_rejects_phase_oracle():
    with pytest.raises(InvalidArgument):
        shor_kitaev_sample(_phase(klein_function("xor")), KLEIN, 0)


def test_intersection_of_trivial_samples_is_whole_group():
    G = make_group([4])
    fn = make_hiding_function(G, whole_group(G), (0,), 2)
    assert shor_kitaev_intersect(_shift(fn), G, 5, 1) == whole_group(G)


def test_intersection_converges_on_binary_cube():
    G = make_group([2, 2, 2])
    H = subgroup_closure(G, [(1, 1, 0), (0, 1, 1)])
    fn = make_hiding_function(G, H, (0, 1))
    oracle = _shift(fn)
    found = shor_kitaev_intersect(oracle, G, 20, 7)
    assert H <= found
    assert found == H
    assert oracle.queries == 20


def test_intersection_is_monotone_in_the_sample_count():
    G = make_group([2, 2, 4])
    H = trivial_subgroup(G)
    fn = make_hiding_function(G, H, tuple(range(16)))
    previous = whole_group(G)
    for t in range(1, 10):
        current = shor_kitaev_intersect(_shift(fn), G, t, 3)
        assert H <= current <= previous
        previous = current


@pytest.mark.parametrize(
    "orders, gens, expected",
    [
        ([2, 2], [(1, 1)], Fraction(1, 2)),
        ([2, 2], [], Fraction(0)),
        ([5], [], Fraction(4, 5)),
        ([4], [], Fraction(1, 2)),
        ([3, 3], [(1, 1)], Fraction(2, 3)),
        ([12], [], Fraction(1, 3)),
        ([3], [(1,)], Fraction(1)),
    ],
)
def test_sk_success_probability(orders, gens, expected):
    G = make_group(orders)
    assert sk_success_probability(G, subgroup_closure(G, gens)) == expected


@pytest.mark.parametrize("orders", [[4], [6], [8], [2, 4], [3, 6]])
def test_sk_success_is_totient_ratio_on_cyclic_quotients(orders):
    G = make_group(orders)
    for H in all_subgroups(G):
        qt = quotient_type(G, H)
        p = sk_success_probability(G, H)
        if qt.is_cyclic:
            assert p == Fraction(euler_totient(H.index), H.index)
        else:
            assert p == 0


def test_exact_sk_success_matches_distribution():
    G = make_group([6])
    H = trivial_subgroup(G)
    dist = shor_kitaev_distribution(_shift(make_hiding_function(G, H, tuple(range(6)))), G)
    p = sum(pr for g, pr in dist.items() if kernel(Character(G, g)) == H)
    assert p == pytest.approx(float(sk_success_probability(G, H)), abs=1e-12)


# --- Bernstein-Vazirani -----------------------------------------------------


@pytest.mark.parametrize("n", range(1, 7))
def test_bv_recovers_every_secret(n):
    for s in itertools.product((0, 1), repeat=n):
        oracle = bv_oracle(s)
        assert bernstein_vazirani(oracle, n) == s
        assert oracle.queries == 1


def test_bv_examples():
    assert bernstein_vazirani(bv_oracle((0, 0, 0)), 3) == (0, 0, 0)
    assert bernstein_vazirani(bv_oracle((1, 0, 1)), 3) == (1, 0, 1)
    assert bernstein_vazirani(bv_oracle((1, 1), OracleKind.SHIFT), 2) == (1, 1)


def test_bv_flags_nonlinear_function():
    oracle = OracleHandle((0, 0, 0, 1), OutputAlphabet(2), OracleKind.PHASE)
    with pytest.raises(PromiseViolation):
        bernstein_vazirani(oracle, 2)
