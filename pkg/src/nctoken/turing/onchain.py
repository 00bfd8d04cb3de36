"""Executing a compiled counter machine by appending one transaction per step."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from ..crypto import KeyPair, sign
from ..ledger import Chain, Outpoint, Transaction, TxOutput
from ..script import Script
from ..token.scripts import E_BTC
from .compile import Payout, compile_cm
from .machine import CounterMachine, Halted, MachineState, cm_step


@dataclass
class OnChainRun:
    chain: Chain
    outcome: str
    states: list[MachineState]
    script: Script
    payout: Optional[Outpoint] = None

    @property
    def steps(self) -> int:
        return len(self.states) - 1

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "steps": self.steps,
            "final_registers": list(self.states[-1].registers),
            "final_pc": self.states[-1].pc,
            "transactions": len(self.chain),
            "payout": str(self.payout) if self.payout is not None else None,
        }


def step_tx(state_out: Outpoint, nxt: MachineState, e_cm: Script, val: int) -> Transaction:
    return Transaction((state_out,), ((),), (TxOutput(nxt.as_arg(), e_cm, val),))


def payout_tx(state_out: Outpoint, pk: bytes, val: int) -> Transaction:
    return Transaction((state_out,), ((),), (TxOutput((pk,), E_BTC, val),))


def state_outputs(chain: Chain, start: Outpoint) -> Iterator[MachineState]:
    """Machine states read back from the chain, following the state output."""
    o: Optional[Outpoint] = start
    scr = chain.resolve(start).scr
    while o is not None:
        out = chain.resolve(o)
        if out.scr is not scr:
            return
        yield MachineState.from_arg(out.arg)
        nxt = chain.spent_by(o)
        o = Outpoint(nxt[0], 1) if nxt is not None else None


def run_on_chain(chain: Chain, m: CounterMachine, p: Payout, fund: Outpoint, funder: KeyPair,
                 max_steps: int) -> OnChainRun:
    """Lock the funds in the machine, then append step transactions (each one
    validated against the script) until the machine halts or max_steps steps
    have been made.  On halt the funds are paid out by the script's rule."""
    val = chain.resolve(fund).val
    init, e_cm = compile_cm(m, p, fund, val)
    init = init.with_witnesses([(sign(funder.secret_key, init),)])
    chain = chain.append(init)
    start = init.outpoint(1)
    o, state, steps = start, m.initial_state(), 0
    while True:
        nxt = cm_step(m, state)
        if isinstance(nxt, Halted):
            pk = p.pk_a if nxt.winner == "A" else p.pk_b
            tx = payout_tx(o, pk, val)
            chain = chain.append(tx)
            return OnChainRun(chain, "Paid" + nxt.winner, list(state_outputs(chain, start)), e_cm,
                              tx.outpoint(1))
        if steps >= max_steps:
            return OnChainRun(chain, "StepLimit", list(state_outputs(chain, start)), e_cm)
        tx = step_tx(o, nxt, e_cm, val)
        chain = chain.append(tx)
        o, state, steps = tx.outpoint(1), nxt, steps + 1
