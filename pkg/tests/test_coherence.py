from __future__ import annotations

import json
import random
from importlib.resources import files

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nctoken.coherence import (
    CoherenceMaps,
    ComputationalRun,
    ReconstructionError,
    check_coherence,
    lemma_c_to_s_check,
    lemma_s_to_c_check,
    reconstruct,
    theorem_balance_check,
)
from nctoken.coherence.comp import Append, Broadcast, SignatureMessage, decode_signature_message
from nctoken.harness.demos import forgery
from nctoken.harness.random_run import random_run
from nctoken.harness.scenario import execute_scenario
from nctoken.harness.session import Allocation, Session
from nctoken.symbolic import Auth, FixedNames, Give, SymbolicRun, Xchg, alpha_equivalent
from nctoken.token import build_give

OVERVIEW = json.loads(files("nctoken").joinpath("data/overview.json").read_text())


@pytest.fixture(scope="module")
def overview():
    return execute_scenario(OVERVIEW)


def test_overview_is_coherent(overview):
    rep = overview.report
    assert rep.verdict and rep.failure is None
    items = [s.item for s in rep.steps]
    # two gens, one split, one give, two xchgs, one join, one burn; each preceded by its auths
    assert items.count("1") == 2 and items.count("2") == 1 and items.count("3") == 1
    assert items.count("4") == 2 and items.count("5a") == 1 and items.count("6a") == 1
    assert items.count("7") == 2 and items.count("9") == 2 and items.count("10") == 4
    assert all(s.case == "1" for s in rep.steps)


def test_overview_properties(overview):
    assert all(overview.verify().values())


def test_signature_message_roundtrip(overview):
    b = next(l for l in overview.rc.labels if isinstance(l, Broadcast))
    msg = decode_signature_message(b.payload)
    assert msg is not None and msg.encode() == b.payload
    assert decode_signature_message(b"junk") is None
    assert decode_signature_message(b.payload[:-1]) is None


def test_missing_symbolic_steps_are_a_mismatch():
    s = Session(["A", "B"], ["A", "B"], [Allocation("a", "A", 0), Allocation("b", "B", 3)])
    s.gen("a", 5, as_=["x"])
    rep = check_coherence(SymbolicRun(s.run.initial), s.computational(), s.m0)
    assert not rep.verdict and rep.failed_at == 0
    assert "MismatchAt" in rep.failure


def test_give_relabelled_as_xchg():
    s = Session(["A", "B"], ["A", "B"], [Allocation("a", "A", 0), Allocation("b", "B", 3)])
    s.gen("a", 5, as_=["x"])
    n = s.name_of("x")
    s.give("x", "B")
    labels = [st_.label for st_ in s.run.steps]
    assert isinstance(labels[-1], Give)
    wrong = SymbolicRun(s.run.initial)
    for st_ in s.run.steps[:2]:
        wrong = wrong.extend(st_.label, FixedNames(st_.fresh))
    wrong = wrong.extend(Auth(n, "A", Xchg(n, s.name_of("b"))))
    rep = check_coherence(wrong, s.computational(), s.m0)
    assert not rep.verdict and rep.failure


def test_unmapped_spend_is_case_two():
    s = Session(["A", "M"], ["A"], [Allocation("a", "A", 0), Allocation("m", "M", 4)])
    s.arbitrary_spend(["m"], as_=["u1", "u2", "u3"])   # burns M's deposit: mapped input
    s.spend_unmapped(["u1", "u2"])                     # only unmapped inputs
    rep = s.report()
    assert rep.verdict
    assert rep.steps[-1].case == "2" and rep.steps[-1].item == "2.1"
    assert any(r.item == "6b" for r in rep.steps)


def test_garbage_broadcast_is_case_two():
    s = Session(["A", "M"], ["A"], [Allocation("a", "A", 0)])
    s.garbage_broadcast(16)
    rep = s.report()
    assert rep.verdict and rep.steps[-1].case == "2" and rep.steps[-1].item == "2.2"


def test_base_case_failure(overview):
    m = dict(overview.m0.txout)
    m["x9"], m["xA0"] = m["xA0"], m["x9"]  # A's 1-valued deposit onto a 0-valued output
    wrong = CoherenceMaps(m)
    rep = check_coherence(overview.rs, overview.rc, wrong)
    assert not rep.verdict and rep.failed_at is None


def test_s_to_c_detects_spent_output():
    s = Session(["A", "B"], ["A", "B"], [Allocation("a", "A", 0)])
    s.gen("a", 5, as_=["x"])
    rep = s.report()
    assert lemma_s_to_c_check(s.run, s.computational(), rep.maps)
    # spend the deposit's output behind the symbolic run's back
    T = build_give(s.chain, s.ref("x"), s.pks["B"], s.ring)
    rc2 = s.computational().extend(Append(T))
    res = lemma_s_to_c_check(s.run, rc2, rep.maps)
    assert not res and "not unspent" in res.counterexamples[0]


def test_s_to_c_vacuous_on_empty_config():
    s = Session(["A", "B"], ["A", "B"], [Allocation("a", "A", 0)])
    s.burn(["a"])
    assert not s.config.deposits
    assert lemma_s_to_c_check(s.run, s.computational(), s.report().maps)


def test_c_to_s_on_forgery():
    r = forgery()
    b = r.bundle
    assert lemma_c_to_s_check(b.rs, b.rc, b.maps)
    assert theorem_balance_check(b.rs, b.rc, b.maps, b.report)


def test_reconstruct_overview_equals_recorded(overview):
    names = {o: n for n, o in overview.m0.txout.items()}
    rs, maps, rep = reconstruct(overview.rc, overview.honest, names)
    assert rs.to_json() == overview.rs.to_json()
    assert maps.to_json() == overview.maps.to_json()


def test_reconstruct_without_names_is_alpha_equivalent(overview):
    rs, _, rep = reconstruct(overview.rc, overview.honest)
    assert rep.verdict
    assert len(rs) == len(overview.rs)
    assert alpha_equivalent(rs, SymbolicRun.from_json(rs.to_json()))


def test_reconstruct_adversary_burn():
    s = Session(["A", "M"], ["A"], [Allocation("a", "A", 0), Allocation("m", "M", 4), Allocation("n", "M", 1)])
    s.arbitrary_spend(["m", "n"])
    rs, _, _ = reconstruct(s.computational(), ["A"], {o: n for n, o in s.m0.txout.items()})
    assert type(rs.labels[-1]).__name__ == "Burn" and set(rs.labels[-1].xs) == {"m", "n"}


def test_reconstruct_rejects_unbroadcast_honest_signature():
    s = Session(["A", "B"], ["A", "B"], [Allocation("a", "A", 2)])
    T = build_give(s.chain, s.ref("a"), s.pks["B"], s.ring)
    rc = ComputationalRun(s.coinbase, (Append(T),), s.pks)
    with pytest.raises(ReconstructionError):
        reconstruct(rc, ["A", "B"])
    # broadcast by someone else first: still a forgery
    msg = SignatureMessage(T.stripped(), 1, T.witnesses[0][0]).encode()
    with pytest.raises(ReconstructionError):
        reconstruct(ComputationalRun(s.coinbase, (Broadcast("B", msg), Append(T)), s.pks), ["A", "B"])
    # broadcast by its owner: fine
    rs, _, _ = reconstruct(ComputationalRun(s.coinbase, (Broadcast("A", msg), Append(T)), s.pks), ["A", "B"])
    assert isinstance(rs.labels[-1], Give)


def test_wrong_signature_never_reaches_the_run():
    s = Session(["A", "M"], ["A"], [Allocation("a", "A", 2)])
    assert s.wrong_signature("a") is False
    assert s.rejected and s.rejected[-1].error.startswith("ScriptFailed")
    assert not s.labels


def test_report_json(overview):
    j = overview.report.to_json()
    assert j["verdict"] is True and len(j["steps"]) == len(overview.rc.labels)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**31), st.sampled_from([0.0, 0.3, 1.0]))
def test_random_runs_verify(seed, mix):
    b = random_run(seed, 15, adversary_mix=mix)
    res = b.verify()
    assert all(res.values()), {k: v.counterexamples for k, v in res.items() if not v}


def test_zero_steps_bundle():
    b = random_run(3, 0)
    assert b.report.verdict and not b.rc.labels and all(b.verify().values())
