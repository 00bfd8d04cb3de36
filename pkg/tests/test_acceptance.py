"""The acceptance criteria, each at its stated size, tolerance and time limit.

Every test prints one PASS or FAIL line; run with -v (or -s) to see them.
"""
from __future__ import annotations

import random
import time
from collections import Counter

import pytest

from generators import int_script, random_context, random_script
from nctoken.coherence import check_coherence
from nctoken.coherence.reconstruct import reconstruct
from nctoken.harness import data_file, execute_scenario, forgery, join_attack, load_scenario, random_run
from nctoken.ledger import Chain, Transaction, TxOutput
from nctoken.harness.session import user_key
from nctoken.script import evaluate, reference_eval
from nctoken.script.values import BOTTOM
from nctoken.symbolic import Burn, Gen
from nctoken.symbolic.generate import random_symbolic_run
from nctoken.symbolic.run import burnval, genval, tokval_s
from nctoken.token.scripts import E_BTC
from nctoken.turing import Payout, random_machine, run_on_chain, run_oracle

BUNDLES = 500
BUNDLE_STEPS = 30


def report(capsys, n: int, ok: bool, elapsed: float, limit: float, detail: str) -> None:
    with capsys.disabled():
        verdict = "PASS" if ok and elapsed < limit else "FAIL"
        print(f"\n[{verdict}] criterion {n}: {detail} ({elapsed:.2f}s, limit {limit:g}s)")


@pytest.fixture(scope="module")
def bundles():
    """Random honest+adversary runs shared by criteria 2 and 3; the time spent
    producing them is charged to each of those criteria."""
    t0 = time.perf_counter()
    bs = [random_run(seed, BUNDLE_STEPS, adversary_mix=0.3) for seed in range(BUNDLES)]
    return bs, time.perf_counter() - t0


def test_c1_symbolic_token_conservation(capsys):
    t0 = time.perf_counter()
    rng = random.Random(1)
    bad, steps = [], 0
    for k in range(1000):
        run = random_symbolic_run(rng, max_steps=50)
        assert len(run) <= 50
        steps += len(run)
        # independent running tally of minted and burned units, checked at every prefix
        minted: Counter = Counter()
        burned: Counter = Counter()
        prev = run.initial
        for s in run.steps:
            if isinstance(s.label, Gen):
                new = s.config.tokens() - prev.tokens()
                for t in new:
                    minted[t] += s.label.v
            elif isinstance(s.label, Burn):
                for x in s.label.xs:
                    d = prev.deposit(x)
                    burned[d.token] += d.amount
            for t in minted:
                if tokval_s(t, s.config) != minted[t] - burned[t]:
                    bad.append((k, t))
            prev = s.config
        for t in minted:
            if tokval_s(t, run.final) != genval(t, run) - burnval(t, run):
                bad.append((k, t, "final"))
    elapsed = time.perf_counter() - t0
    report(capsys, 1, not bad, elapsed, 5, f"1000 symbolic runs ({steps} steps), {len(bad)} violations")
    assert not bad
    assert elapsed < 5


def test_c2_balance_at_every_prefix(bundles, capsys):
    bs, gen_time = bundles
    t0 = time.perf_counter()
    bad, prefixes = [], 0
    for b in bs:
        assert b.report.verdict, b.report.failure
        prefixes += len(b.report.trace)
        r = b.properties()["balance"]
        if not r.ok:
            bad.append((b.seed, r.counterexamples))
    elapsed = gen_time + time.perf_counter() - t0
    report(capsys, 2, not bad, elapsed, 30, f"{len(bs)} bundles, {prefixes} prefixes, {len(bad)} mismatches")
    assert not bad
    assert elapsed < 30


def test_c3_lemma_suites(bundles, capsys):
    bs, gen_time = bundles
    t0 = time.perf_counter()
    counter = 0
    for b in bs:
        props = b.properties()
        counter += len(props["s_to_c"].counterexamples) + len(props["c_to_s"].counterexamples)
    elapsed = gen_time + time.perf_counter() - t0
    report(capsys, 3, counter == 0, elapsed, 30, f"{len(bs)} bundles, {counter} counterexamples")
    assert counter == 0
    assert elapsed < 30


def test_c4_reconstruct_and_check(capsys):
    t0 = time.perf_counter()
    ok = 0
    for seed in range(10_000, 10_000 + BUNDLES):
        b = random_run(seed, BUNDLE_STEPS, adversary_mix=0.3)
        names = {o: n for n, o in b.m0.txout.items()}
        rs, _, _ = reconstruct(b.rc, b.honest, names)
        rep = check_coherence(rs, b.rc, b.m0)
        ok += rep.verdict
    elapsed = time.perf_counter() - t0
    report(capsys, 4, ok == BUNDLES, elapsed, 60, f"{ok}/{BUNDLES} runs reconstructed and coherent")
    assert ok == BUNDLES
    assert elapsed < 60


def test_c5_overview_scenario(capsys):
    t0 = time.perf_counter()
    b = execute_scenario(load_scenario(data_file("overview.json")))
    t = b.token_aliases["t"]
    final = sorted((d.owner, d.amount, d.token) for d in b.rs.final.deposits)
    ok = (not b.expectation_failures and not b.rejected and b.report.verdict
          and final == [("A", 10, t), ("B", 1, "BTC")] and not b.rs.final.authorizations)
    elapsed = time.perf_counter() - t0
    report(capsys, 5, ok, elapsed, 1, f"final configuration {final}")
    assert ok, b.expectation_failures
    assert elapsed < 1


@pytest.mark.parametrize("demo", [join_attack, forgery], ids=["join-attack", "forgery"])
def test_c6_attack_demos(demo, capsys):
    t0 = time.perf_counter()
    r = demo(0)
    elapsed = time.perf_counter() - t0
    ok = r.rejected and r.error.startswith("ScriptFailed") and r.ok
    report(capsys, 6, ok, elapsed, 1, f"{r.name}: {r.error.split(':')[0]}, checks {r.checks}")
    assert ok
    if r.name == "forgery":
        assert r.checks["forged_unspendable"]
    assert elapsed < 1


def test_c7_counter_machines(capsys):
    t0 = time.perf_counter()
    rng = random.Random(7)
    funder, a, b = user_key("F"), user_key("A"), user_key("B")
    p = Payout(a.public_key, b.public_key)
    bad, outcomes = [], Counter()
    for k in range(50):
        m = random_machine(rng, 5, 20)
        funds = rng.randint(0, 100)
        cb = Transaction((), (), (TxOutput((funder.public_key,), E_BTC, funds),))
        r = run_on_chain(Chain.genesis(cb), m, p, cb.outpoint(1), funder, 1000)
        o = run_oracle(m, 1000)
        outcomes[r.outcome] += 1
        if (r.outcome, r.steps, r.states) != (o.outcome, o.steps, list(o.states)):
            bad.append(k)
        elif r.payout is not None:
            winner = a if o.states[-1].registers[0] == 0 else b
            out = r.chain.resolve(r.payout)
            if out.arg != (winner.public_key,) or out.val != funds:
                bad.append(k)
    elapsed = time.perf_counter() - t0
    report(capsys, 7, not bad, elapsed, 30, f"50 machines {dict(outcomes)}, {len(bad)} disagreements")
    assert not bad
    assert elapsed < 30


def test_c8_evaluator_differential(capsys):
    t0 = time.perf_counter()
    rng = random.Random(8)
    n, bottoms, bad = 10_000, 0, []
    for k in range(n):
        e = random_script(rng) if rng.random() < 0.5 else int_script(rng)
        ctx = random_context(rng)
        x, y = evaluate(e, ctx), reference_eval(e, ctx)
        bottoms += x is BOTTOM
        if not (x == y and type(x) is type(y)):
            bad.append(k)
    elapsed = time.perf_counter() - t0
    report(capsys, 8, not bad and bottoms > 0, elapsed, 30,
           f"{n} scripts ({bottoms} evaluate to bottom), {len(bad)} disagreements")
    assert not bad and bottoms > 0
    assert elapsed < 30
