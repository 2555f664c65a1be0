import random

import pytest

from qdc.budget import BudgetExceeded, check_budget, time_budget
from qdc.ncalg import Polynomial, gen_code, word_string
from qdc.presentations import presentation
from qdc.rewrite import (
    DEGLEX,
    MonomialOrder,
    NonTerminationError,
    RuleSet,
    UnorientableError,
    complete_bounded,
    orient_relations,
    overlap_check,
    reduce,
)
from qdc.scalars import field

from conftest import random_poly


def g(kind, i, j, N=2):
    return Polynomial.gen(kind, i, j, N)


def broken_frt():
    rules = presentation("frt_T", 2).rules
    victim = rules.rules[-1]
    q = field(2).q
    return rules.with_rule(victim.lhs, {w: c * q for w, c in victim.rhs.items()})


def test_empty_relations():
    rs = orient_relations([], 2)
    assert len(rs) == 0
    assert rs.reduce(g("T", 1, 1) * g("T", 2, 2)) == g("T", 1, 1) * g("T", 2, 2)


def test_frt2_has_six_rules():
    rs = presentation("frt_T", 2).rules
    assert len(rs) == 6
    t_kind = gen_code("T", 1, 1) >> 16
    for r in rs:
        assert len(r.lhs) == 2 and all(x >> 16 == t_kind for x in r.lhs)
        assert all(DEGLEX.less(w, r.lhs) for w in r.rhs)


def test_frt3_has_36_rules():
    assert len(presentation("frt_T", 3).rules) == 36


def test_frt1_trivial():
    pres = presentation("frt_T", 1)
    assert len(pres.generators) == 1 and len(pres.rules) == 0


def test_inner_derivation_rules_have_constant_tails():
    rs = presentation("swz", 2).rules
    im = gen_code("Im", 1, 1) >> 16
    om = gen_code("Om", 1, 1) >> 16
    pairing = [r for r in rs if len(r.lhs) == 2 and r.lhs[0] >> 16 == im and r.lhs[1] >> 16 == om]
    assert pairing
    assert all(r.source == "eq-861-ImOm" for r in pairing)
    assert any(() in r.rhs for r in pairing)


def test_frt_commutator_normal_form():
    F = field(2)
    pres = presentation("frt_T", 2)
    got = pres.reduce(g("T", 1, 1) * g("T", 2, 2) - g("T", 2, 2) * g("T", 1, 1))
    assert got == (g("T", 1, 2) * g("T", 2, 1)).scale(F.lam)


@pytest.mark.parametrize("name", ["frt_T", "swz", "lbasis", "fp"])
def test_relations_reduce_to_zero(name):
    pres = presentation(name, 2)
    for tag, rel in pres.relations():
        assert pres.reduce(rel).is_zero(), tag


def test_xi_squared_vanishes():
    pres = presentation("swz", 2)
    xi = pres.symbols["XiX"]
    assert pres.reduce(xi * xi).is_zero()


@pytest.mark.parametrize("name", ["frt_T", "lbasis"])
def test_no_critical_pairs(name):
    assert overlap_check(presentation(name, 2).rules, 3) == []


def test_broken_rules_have_critical_pairs():
    pairs = overlap_check(broken_frt(), 3)
    assert pairs
    assert all(not cp.difference.is_zero() for cp in pairs)
    assert "T[" in str(pairs[0])


def test_overlap_degree_guard():
    with pytest.raises(ValueError):
        overlap_check(presentation("frt_T", 2).rules, 2)


def test_overlap_degree_four_still_clean():
    assert overlap_check(presentation("frt_T", 2).rules, 4) == []


def test_completion_leaves_confluent_input_alone():
    rs = presentation("frt_T", 2).rules
    out = complete_bounded(rs)
    assert [(r.lhs, r.rhs) for r in out] == [(r.lhs, r.rhs) for r in rs]
    assert not out.truncated


def test_completion_grows_broken_input():
    rs = broken_frt()
    out = complete_bounded(rs, max_rules=20)
    assert len(out) >= len(rs) + 1
    assert not out.truncated and overlap_check(out, 3) == []


def test_completion_with_zero_budget_truncates():
    rs = broken_frt()
    out = complete_bounded(rs, max_rules=0)
    assert out.truncated
    assert [(r.lhs, r.rhs) for r in out] == [(r.lhs, r.rhs) for r in rs]


def test_reduce_idempotent(rng):
    pres = presentation("swz", 2)
    for _ in range(100):
        p = random_poly(rng, 2, max_len=4)
        nf = pres.reduce(p)
        assert pres.reduce(nf) == nf
        assert all(pres.rules.is_normal(w) for w in nf.terms)


@pytest.mark.parametrize("name", ["swz", "lbasis"])
def test_strategy_independence(name, rng):
    pres = presentation(name, 2)
    kinds = ("T", "L", "Om", "Im") if name == "swz" else ("T", "L", "OmL", "ImL")
    for k in range(200):
        p = random_poly(rng, 2, kinds=kinds, max_len=4, n_terms=2, scalars=False)
        assert pres.reduce(p, strategy="random", seed=k) == pres.reduce(p), k


def test_rules_strictly_decreasing():
    for name in ("swz", "lbasis", "fp"):
        rs = presentation(name, 2).rules
        for r in rs:
            assert all(rs.order.less(w, r.lhs) for w in r.rhs), word_string(r.lhs)


def test_monomial_order_is_multiplicative():
    rng = random.Random(3)
    gens = [gen_code(k, i, j) for k in ("T", "L", "Om", "Im") for i in (1, 2) for j in (1, 2)]
    for _ in range(500):
        n = rng.randint(1, 3)
        u = tuple(rng.choice(gens) for _ in range(n))
        v = tuple(rng.choice(gens) for _ in range(n))
        w = tuple(rng.choice(gens) for _ in range(rng.randint(0, 2)))
        if u == v:
            continue
        if DEGLEX.less(u, v):
            assert DEGLEX.less(w + u, w + v) and DEGLEX.less(u + w, v + w)


def test_plain_order_available():
    plain = MonomialOrder.plain()
    a, b = gen_code("T", 1, 1), gen_code("T", 1, 2)
    assert plain.less((a,), (b,))
    assert DEGLEX.less((b,), (a,))


def test_step_cap():
    rs = presentation("frt_T", 2).rules
    capped = RuleSet(rs.rules, 2, rs.generators, rs.order, step_cap=1)
    p = g("T", 2, 1) * g("T", 2, 2) * g("T", 1, 1) * g("T", 1, 2)
    assert len(rs.reduce(p).terms) > 1
    with pytest.raises(NonTerminationError):
        capped.reduce(p)


def test_unorientable_degree_three():
    t = g("T", 1, 1)
    with pytest.raises(UnorientableError):
        orient_relations([t * t * t], 2)


def test_inconsistent_constant():
    t = g("T", 1, 1)
    with pytest.raises(UnorientableError) as err:
        orient_relations([(t - Polynomial.const(1, 2), "a"), (t, "b")], 2)
    assert err.value.witness is not None and err.value.witness.degree() == 0


def test_linear_relation_eliminates_generator():
    t11, t12 = g("T", 1, 1), g("T", 1, 2)
    rs = orient_relations([t11 - t12.scale(3)], 2, generators=[gen_code("T", 1, 1), gen_code("T", 1, 2)])
    assert rs.reduce(t11 * t11) == (t12 * t12).scale(9)


def test_module_level_reduce_and_json():
    rs = presentation("frt_T", 2).rules
    p = g("T", 2, 2) * g("T", 1, 1)
    assert reduce(p, rs) == rs.reduce(p)
    js = rs.to_json()
    assert len(js) == 6 and set(js[0]) == {"lhs", "rhs", "source"}


def test_unknown_strategy():
    with pytest.raises(ValueError):
        presentation("frt_T", 2).rules.reduce(g("T", 1, 1), strategy="greedy")


def test_budget_context():
    with pytest.raises(BudgetExceeded):
        with time_budget(0):
            check_budget()
    with time_budget(None):
        check_budget()
    with time_budget(100):
        with time_budget(1000):
            check_budget()
