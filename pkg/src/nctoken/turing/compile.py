"""Compiling a counter machine to a script that only lets its state output be
spent by the transaction performing the next machine step.

The state lives in a single output whose arg is (r1, ..., rn, pc).  While the
machine runs, the redeeming transaction must have one input and one output
carrying the same script and value, with the arg fixed by the current
instruction.  At a halt (or once pc leaves the program) the value must be paid
in one bitcoin output to A if r1 = 0, otherwise to B.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..ledger import Outpoint, Transaction, TxOutput
from ..script import Script
from ..script.syntax import parse_text
from ..token.scripts import BTC_SOURCE
from .machine import CounterMachine, Instr


@dataclass(frozen=True)
class Payout:
    pk_a: bytes
    pk_b: bytes


def _reg(sel: str, i: int) -> str:
    return f"{sel}.arg.{i}"


def _payout(m: CounterMachine, p: Payout) -> str:
    pay = "verscr({scr}, rtxo(1)) and rtxo(1).arg.1 = 0x{pk}"
    return (f"(if {_reg('ctxo', 1)} = 0 then {pay.format(scr=BTC_SOURCE, pk=p.pk_a.hex())}"
            f" else {pay.format(scr=BTC_SOURCE, pk=p.pk_b.hex())})")


def _step(m: CounterMachine, k: int, ins: Instr) -> str:
    pc = m.n + 1
    parts = ["verrec(rtxo(1))"]
    for r in range(1, m.n + 1):
        cur, new = _reg("ctxo", r), _reg("rtxo(1)", r)
        if ins.op == "inc" and r == ins.i:
            parts.append(f"{new} = {cur} + 1")
        elif ins.op == "dec" and r == ins.i:
            parts.append(f"{new} = (if {cur} = 0 then 0 else {cur} - 1)")
        elif ins.op == "zero" and r == ins.i:
            parts.append(f"{new} = 0")
        else:
            parts.append(f"{new} = {cur}")
    if ins.op == "jnz":
        parts.append(f"{_reg('rtxo(1)', pc)} = (if {_reg('ctxo', ins.i)} = 0 then {k + 1} else {ins.j})")
    else:
        parts.append(f"{_reg('rtxo(1)', pc)} = {k + 1}")
    return " and ".join(parts)


def cm_source(m: CounterMachine, p: Payout) -> str:
    """The script text: a dispatch on pc over the instructions."""
    pc = _reg("ctxo", m.n + 1)
    lines = ["inlen(rtxo(1)) = 1 and outlen(rtxo(1)) = 1 and rtxo(1).val = ctxo.val and ("]
    for k, ins in enumerate(m.program):
        body = _payout(m, p) if ins.op == "halt" else _step(m, k, ins)
        lines.append(f" if {pc} = {k} then {body} else")
    lines.append(f" {_payout(m, p)})")
    return "\n".join(lines)


def compile_script(m: CounterMachine, p: Payout) -> Script:
    return parse_text(cm_source(m, p))


def compile_cm(m: CounterMachine, p: Payout, fund: Outpoint, funds: int) -> tuple[Transaction, Script]:
    """The (unsigned) transaction moving `funds` from `fund` into the initial
    state output, whose arg is n+1 zeros, and the machine script."""
    e_cm = compile_script(m, p)
    out = TxOutput(m.initial_state().as_arg(), e_cm, funds)
    return Transaction((fund,), ((),), (out,)), e_cm
