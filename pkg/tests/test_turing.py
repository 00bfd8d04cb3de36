from __future__ import annotations

import random

import pytest

from nctoken.crypto import sign
from nctoken.harness.session import user_key
from nctoken.ledger import Chain, ScriptFailed, Transaction, TxOutput
from nctoken.token.scripts import E_BTC
from nctoken.turing import (
    CounterMachine,
    Instr,
    MachineState,
    Payout,
    ProgramError,
    compile_cm,
    format_program,
    machine_of,
    parse_program,
    payout_tx,
    random_machine,
    run_on_chain,
    run_oracle,
    step_tx,
)

F, PA, PB = user_key("F"), user_key("A"), user_key("B")
PAYOUT = Payout(PA.public_key, PB.public_key)


def funded(v: int = 7):
    cb = Transaction((), (), (TxOutput((F.public_key,), E_BTC, v),))
    return Chain.genesis(cb), cb.outpoint(1)


def locked(m: CounterMachine, v: int = 7):
    chain, fund = funded(v)
    init, e_cm = compile_cm(m, PAYOUT, fund, v)
    init = init.with_witnesses([(sign(F.secret_key, init),)])
    chain = chain.append(init)
    return chain, init.outpoint(1), e_cm


def test_halt_pays_a():
    chain, fund = funded()
    r = run_on_chain(chain, machine_of(["halt"], 1), PAYOUT, fund, F, 10)
    assert (r.outcome, r.steps) == ("PaidA", 0)
    out = r.chain.resolve(r.payout)
    assert out.arg == (PA.public_key,) and out.val == 7


def test_inc_then_halt_pays_b():
    chain, fund = funded()
    r = run_on_chain(chain, machine_of(["inc 1", "halt"], 1), PAYOUT, fund, F, 10)
    assert (r.outcome, r.steps) == ("PaidB", 1)
    assert r.states == [MachineState((0,), 0), MachineState((1,), 1)]
    assert r.chain.resolve(r.payout).arg == (PB.public_key,)


def test_running_off_the_end_halts():
    o = run_oracle(machine_of(["inc 2"], 2), 10)
    assert o.halted and o.steps == 1 and o.outcome == "PaidA"


def test_dec_of_zero_clamps():
    o = run_oracle(machine_of(["dec 1", "inc 1"], 1), 10)
    assert [s.registers for s in o.states] == [(0,), (0,), (1,)]


def test_step_limit():
    m = machine_of(["inc 1", "jnz 1 0"], 1)
    o = run_oracle(m, 5)
    assert not o.halted and o.steps == 5
    chain, fund = funded()
    r = run_on_chain(chain, m, PAYOUT, fund, F, 5)
    assert r.outcome == "StepLimit" and r.steps == 5 and r.payout is None
    assert r.states == list(o.states)


def test_countdown_oracle():
    # r1 := 3, then count it down into r2
    m = machine_of(["inc 1", "inc 1", "inc 1", "jnz 1 5", "halt", "dec 1", "inc 2", "jnz 1 5"], 2)
    o = run_oracle(m, 100)
    assert o.halted and o.states[-1] == MachineState((0, 3), 8) and o.outcome == "PaidA"


@pytest.mark.parametrize("bad", [
    MachineState((2,), 1),   # wrong register value
    MachineState((1,), 0),   # wrong pc
    MachineState((1,), 2),   # skips ahead
])
def test_wrong_step_rejected(bad):
    m = machine_of(["inc 1", "inc 1", "halt"], 1)
    chain, o, e_cm = locked(m)
    with pytest.raises(ScriptFailed):
        chain.append(step_tx(o, bad, e_cm, 7))
    chain.append(step_tx(o, MachineState((1,), 1), e_cm, 7))


def test_wrong_register_rejected():
    m = machine_of(["inc 2", "halt"], 2)
    chain, o, e_cm = locked(m)
    with pytest.raises(ScriptFailed):
        chain.append(step_tx(o, MachineState((1, 0), 1), e_cm, 7))


def test_value_and_script_preserved():
    m = machine_of(["inc 1", "halt"], 1)
    chain, o, e_cm = locked(m)
    nxt = MachineState((1,), 1)
    with pytest.raises(ScriptFailed):
        chain.append(Transaction((o,), ((),), (TxOutput(nxt.as_arg(), e_cm, 6), TxOutput((), E_BTC, 1))))
    with pytest.raises(ScriptFailed):
        chain.append(Transaction((o,), ((),), (TxOutput(nxt.as_arg(), E_BTC, 7),)))


def test_early_payout_rejected():
    m = machine_of(["inc 1", "halt"], 1)
    chain, o, _ = locked(m)
    with pytest.raises(ScriptFailed):
        chain.append(payout_tx(o, PA.public_key, 7))


def test_payout_only_to_winner():
    m = machine_of(["halt"], 1)
    chain, o, _ = locked(m)
    with pytest.raises(ScriptFailed):
        chain.append(payout_tx(o, PB.public_key, 7))
    chain = chain.append(payout_tx(o, PA.public_key, 7))


def test_payout_redeemable_by_winner_only():
    chain, fund = funded()
    r = run_on_chain(chain, machine_of(["halt"], 1), PAYOUT, fund, F, 10)
    spend = Transaction((r.payout,), ((),), (TxOutput((PB.public_key,), E_BTC, 7),))
    with pytest.raises(ScriptFailed):
        r.chain.append(spend.with_witnesses([(sign(PB.secret_key, spend),)]))
    r.chain.append(spend.with_witnesses([(sign(PA.secret_key, spend),)]))


def test_random_machines_match_oracle():
    rng = random.Random(11)
    for _ in range(15):
        m = random_machine(rng, 3, 8)
        o = run_oracle(m, 60)
        chain, fund = funded(rng.randint(0, 9))
        r = run_on_chain(chain, m, PAYOUT, fund, F, 60)
        assert (r.outcome, r.steps, r.states) == (o.outcome, o.steps, list(o.states))
        total = sum(r.chain.resolve(u).val for u in r.chain.utxo())
        assert total == chain.resolve(fund).val


def test_assembly_round_trip():
    rng = random.Random(5)
    for _ in range(50):
        m = random_machine(rng)
        assert parse_program(format_program(m)) == m


@pytest.mark.parametrize("text", ["inc", "jnz 1", "frob 1", "inc x", "registers 1\ninc 2", "jnz 1 4\nhalt"])
def test_parse_errors(text):
    with pytest.raises(ProgramError):
        parse_program(text)


def test_program_validation():
    with pytest.raises(ProgramError):
        CounterMachine(0, ())
    with pytest.raises(ProgramError):
        CounterMachine(1, (Instr("mul", 1),))
