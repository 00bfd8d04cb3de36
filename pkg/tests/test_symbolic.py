from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nctoken.symbolic import (
    BTC,
    Auth,
    Authorization,
    Burn,
    Configuration,
    Deposit,
    FixedNames,
    FreshNames,
    Gen,
    Give,
    Join,
    MissingAuthorization,
    NoneFound,
    NoSuchDeposit,
    NotOwner,
    SideConditionViolated,
    Split,
    SymbolicRun,
    Xchg,
    alpha_equivalent,
    burnval,
    check_auth,
    genval,
    infer_label,
    step,
    tokval_s,
)
from nctoken.symbolic.generate import random_symbolic_run


def act(run: SymbolicRun, l, *xs: str) -> SymbolicRun:
    """Grant the owners' authorizations for xs, then fire l."""
    for x in xs:
        run = run.extend(Auth(x, run.final.deposit(x).owner, l))
    return run.extend(l)


def overview_run() -> SymbolicRun:
    run = SymbolicRun(Configuration([Deposit("a0", "A", 0, BTC), Deposit("a1", "A", 0, BTC),
                                     Deposit("a2", "A", 1, BTC)]))
    run = act(run, Gen("a0", 10), "a0")                       # x1, t1
    run = act(run, Split("x1", 8, "B"), "x1")                 # x2 (A,8) x3 (B,2)
    run = act(run, Give("x2", "B"), "x2")                     # x4 (B,8)
    run = act(run, Gen("a1", 2), "a1")                        # x5, t2
    run = act(run, Xchg("x4", "x5"), "x4", "x5")              # x6 (B,2:t2) x7 (A,8:t)
    run = act(run, Join("x7", "x3", "A"), "x7", "x3")         # x8 (A,10:t)
    run = act(run, Xchg("x6", "a2"), "x6", "a2")              # x9 (B,1:BTC) x10 (A,2:t2)
    run = act(run, Burn(("x10",), "y"), "x10")
    return run


def test_overview_amounts():
    run = overview_run()
    g = run.final
    assert sorted((d.owner, d.amount, d.token) for d in g.deposits) == [("A", 10, "t1"), ("B", 1, BTC)]
    assert not g.authorizations
    assert (genval("t1", run), burnval("t1", run), tokval_s("t1", g)) == (10, 0, 10)
    assert (genval("t2", run), burnval("t2", run), tokval_s("t2", g)) == (2, 2, 0)
    assert genval("t9", run) == burnval("t9", run) == 0


def test_gen_example():
    g = Configuration([Deposit("x", "A", 0, BTC)], [Authorization("x", "A", Gen("x", 10))])
    g2 = step(g, Gen("x", 10), FreshNames(["x"]))
    assert g2 == Configuration([Deposit("x1", "A", 10, "t1")])


def test_rule_errors():
    g = Configuration([Deposit("x", "A", 0, BTC), Deposit("y", "A", 5, "t"), Deposit("z", "B", 5, "u")])
    with pytest.raises(MissingAuthorization):
        step(g, Gen("x", 3), FreshNames(g.names()))
    with pytest.raises(SideConditionViolated) as ei:
        check_auth(g, Auth("x", "A", Gen("x", 0)))
    assert ei.value.rule == "AuthGen"
    with pytest.raises(NotOwner):
        check_auth(g, Auth("x", "B", Gen("x", 1)))
    with pytest.raises(NoSuchDeposit):
        check_auth(g, Auth("q", "A", Give("q", "B")))
    with pytest.raises(SideConditionViolated):
        check_auth(g, Auth("y", "A", Join("y", "z", "A")))  # different tokens
    with pytest.raises(SideConditionViolated):
        check_auth(g, Auth("y", "A", Burn(("y", "x"), "w")))  # a user token burnt with others
    with pytest.raises(SideConditionViolated):
        check_auth(g, Auth("x", "A", Xchg("x", "y")))  # first deposit must hold a token


def test_gen_zero_rejected_by_rule():
    g = Configuration([Deposit("x", "A", 0, BTC)], [Authorization("x", "A", Gen("x", 0))])
    with pytest.raises(SideConditionViolated):
        step(g, Gen("x", 0), FreshNames(["x"]))


def test_burn_of_several_bitcoin_deposits():
    run = SymbolicRun(Configuration([Deposit("a", "A", 1, BTC), Deposit("b", "B", 2, BTC)]))
    l = Burn(("a", "b"), "y")
    run = act(run, l, "a", "b")
    assert not run.final.deposits


def test_duplicate_authorizations_persist():
    run = SymbolicRun(Configuration([Deposit("a", "A", 1, BTC)]))
    l = Give("a", "B")
    run = run.extend(Auth("a", "A", l)).extend(Auth("a", "A", l))
    assert run.final.auth_count(Authorization("a", "A", l)) == 2
    run = run.extend(l)
    assert len(run.final.authorizations) == 1


def test_freshness_across_run():
    run = overview_run()
    introduced = []
    for s in run.steps:
        for n in s.fresh:
            assert n not in introduced and n not in run.initial.names()
            introduced.append(n)


def test_fixed_names_replay_and_json():
    run = overview_run()
    again = SymbolicRun.from_json(run.to_json())
    assert again.to_json() == run.to_json()
    assert alpha_equivalent(run, again)
    replay = SymbolicRun(run.initial)
    for s in run.steps:
        replay = replay.extend(s.label, FixedNames(s.fresh))
    assert replay.final == run.final


def test_step_then_infer_on_overview():
    run = overview_run()
    for g, s in zip(run.configs(), run.steps):
        assert infer_label(g, s.config) == s.label


def test_infer_identical_configs():
    g = Configuration([Deposit("a", "A", 1, BTC)])
    with pytest.raises(NoneFound):
        infer_label(g, g)


def test_tokval_examples():
    assert tokval_s("t", Configuration()) == 0
    g = Configuration([Deposit("a", "A", 8, "t"), Deposit("b", "B", 2, "t"), Deposit("c", "B", 5, "u")])
    assert tokval_s("t", g) == 10
    with pytest.raises(ValueError):
        tokval_s(BTC, g)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_preservation_property(seed):
    run = random_symbolic_run(random.Random(seed), 50)
    tokens = set().union(*(g.tokens() for g in run.configs())) - {BTC}
    for t in tokens:
        assert tokval_s(t, run.final) == genval(t, run) - burnval(t, run)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_step_then_infer_property(seed):
    run = random_symbolic_run(random.Random(seed), 30)
    for g, s in zip(run.configs(), run.steps):
        got = infer_label(g, s.config)
        assert got == s.label


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.randoms(use_true_random=False))
def test_monoid_reordering(seed, shuffler):
    run = random_symbolic_run(random.Random(seed), 20)
    for g, s in zip(run.configs(), run.steps):
        ds, auths = list(g.deposits), list(g.authorizations)
        shuffler.shuffle(ds)
        shuffler.shuffle(auths)
        g2 = Configuration(ds, auths)
        assert g2 == g
        assert step(g2, s.label, FixedNames(s.fresh)) == s.config
