"""Executable checks of the properties that coherence guarantees."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..ledger import Chain, Outpoint
from ..token.spendable import is_spendable
from ..symbolic.config import BTC
from ..symbolic.run import SymbolicRun, tokval_s
from ..token.balance import token_balances
from ..token.builders import read_token
from ..token.scripts import is_btc_script, is_token_script
from .checker import CoherenceReport
from .comp import CoherenceMaps, ComputationalRun, outpoint_digest


@dataclass
class LemmaResult:
    ok: bool
    counterexamples: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, msg: str) -> None:
        self.ok = False
        self.counterexamples.append(msg)


def lemma_s_to_c_check(rs: SymbolicRun, rc: ComputationalRun, maps: CoherenceMaps,
                       chain: Optional[Chain] = None) -> LemmaResult:
    """Every final deposit has its own unspent, matching, spendable output."""
    chain = chain if chain is not None else rc.chain()
    res = LemmaResult(True)
    seen: set[Outpoint] = set()
    directory = rc.directory
    for d in rs.final.deposits:
        o = maps.txout.get(d.name)
        if o is None:
            res.fail(f"{d.name}: no output")
            continue
        if o in seen:
            res.fail(f"{d.name}: output {o} shared with another deposit")
        seen.add(o)
        if not chain.contains(o) or not chain.is_unspent(o):
            res.fail(f"{d.name}: {o} is not unspent")
            continue
        out = chain.resolve(o)
        pk = directory.pk(d.owner)
        if d.token == BTC:
            ok = is_btc_script(out.scr) and out.arg == (pk,) and out.val == d.amount
        else:
            f = read_token(out)
            src = maps.tkid.get(d.token)
            ok = (f is not None and is_token_script(out.scr) and f.owner == pk and f.tkval == d.amount
                  and src is not None and f.tkid == outpoint_digest(chain, src))
        if not ok:
            res.fail(f"{d.name}: {o} does not store {d.amount}:{d.token} of {d.owner}")
        elif not is_spendable(chain, o):
            res.fail(f"{d.name}: {o} is unspendable")
    return res


def lemma_c_to_s_check(rs: SymbolicRun, rc: ComputationalRun, maps: CoherenceMaps,
                       chain: Optional[Chain] = None) -> LemmaResult:
    """Classify every unspent token output and check the claim for its class."""
    chain = chain if chain is not None else rc.chain()
    res = LemmaResult(True)
    outputs = {tx.output_digest(i): tx.outpoint(i) for tx in chain for i in range(1, len(tx.outputs) + 1)}
    minted = {outpoint_digest(chain, src): t for t, src in maps.tkid.items()}
    final = rs.final
    for o in chain.utxo():
        out = chain.resolve(o)
        f = read_token(out)
        if not is_token_script(out.scr) or f is None:
            continue
        if f.tkid not in outputs:
            if is_spendable(chain, o):
                res.fail(f"{o}: tkid names no output, yet spendable")
            continue
        t = minted.get(f.tkid)
        if t is None:
            continue
        y = maps.name_at(o)
        if y is None:
            if is_spendable(chain, o):
                res.fail(f"{o}: forged units of {t} are spendable")
            continue
        d = final.deposit(y)
        if not is_spendable(chain, o):
            res.fail(f"{o}: deposit {y} is unspendable")
        if d is None or d.token != t or d.amount != f.tkval or rc.directory.pk(d.owner) != f.owner:
            res.fail(f"{o}: no matching deposit {y} holding {f.tkval}:{t}")
    return res


def theorem_balance_check(rs: SymbolicRun, rc: ComputationalRun, maps: CoherenceMaps,
                          report: Optional[CoherenceReport] = None) -> LemmaResult:
    """Symbolic and computational balances agree for every minted token.

    With a coherence report, every prefix recorded in its trace is checked;
    otherwise only the final states.
    """
    res = LemmaResult(True)
    configs = rs.configs()
    points = report.trace if report is not None else [(len(rs.steps), rc.chain(), maps)]
    for k, chain, m in points:
        n = len(chain)
        g = configs[k]
        balances = token_balances(chain)
        for t, src in m.tkid.items():
            s = tokval_s(t, g)
            c = balances.get(outpoint_digest(chain, src), 0)
            if s != c:
                res.fail(f"prefix ({k} symbolic, {n} txs): {t} symbolic {s} != computational {c}")
    return res


def all_properties(rs: SymbolicRun, rc: ComputationalRun, report: CoherenceReport) -> dict[str, LemmaResult]:
    chain = report.trace[-1][1] if report.trace else rc.chain()
    return {
        "s_to_c": lemma_s_to_c_check(rs, rc, report.maps, chain),
        "c_to_s": lemma_c_to_s_check(rs, rc, report.maps, chain),
        "balance": theorem_balance_check(rs, rc, report.maps, report),
    }
