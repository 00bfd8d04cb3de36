"""Lockstep coherence checker between a symbolic and a computational run."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..ledger import Chain, Outpoint, ValidationError
from ..symbolic.config import BTC, Auth, Configuration
from ..symbolic.rules import FixedNames, RuleError, apply
from ..symbolic.run import SymbolicRun, is_action
from ..token.builders import read_token
from ..token.scripts import is_token_script
from .comp import Append, Broadcast, CoherenceMaps, ComputationalRun, Directory, outpoint_digest
from .items import ItemFailed, ItemMatch, State, btc_output_ok, classify_broadcast, match_action, match_auth


class MismatchAt(Exception):
    def __init__(self, step: int, item: str, detail: str) -> None:
        super().__init__(f"step {step}: item {item}: {detail}")
        self.step = step
        self.item = item
        self.detail = detail


class MapInvariantBroken(Exception):
    pass


@dataclass(frozen=True)
class StepRecord:
    comp_index: int
    case: str  # "1" or "2"
    item: str
    sym_index: Optional[int] = None

    def to_json(self) -> dict:
        return {"comp_index": self.comp_index, "case": self.case, "item": self.item,
                "sym_index": self.sym_index}


@dataclass
class CoherenceReport:
    verdict: bool
    steps: list[StepRecord] = field(default_factory=list)
    maps: Optional[CoherenceMaps] = None
    failure: Optional[str] = None
    failed_at: Optional[int] = None
    # initially and after each computational label: (symbolic steps consumed, chain, maps)
    trace: list[tuple[int, Chain, CoherenceMaps]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.verdict

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "failure": self.failure,
            "failed_at": self.failed_at,
            "steps": [s.to_json() for s in self.steps],
        }


def check_base(initial: Configuration, rc: ComputationalRun, m0: CoherenceMaps) -> None:
    """Initial deposits map onto coinbase outputs of the right owner and value."""
    if m0.tkid or m0.txburn:
        raise MismatchAt(0, "base", "initial maps must not bind tokens or burns")
    if set(m0.txout) != initial.names():
        raise MismatchAt(0, "base", "txout does not cover exactly the initial deposits")
    cb = rc.coinbase
    for d in initial.deposits:
        o = m0.txout[d.name]
        if o.txid != cb.txid or not 1 <= o.index <= len(cb.outputs):
            raise MismatchAt(0, "base", f"{d.name} is not mapped to a coinbase output")
        pk = rc.directory.pk(d.owner)
        if pk is None or not btc_output_ok(cb.outputs[o.index - 1], pk, d.amount):
            raise MismatchAt(0, "base", f"coinbase output {o} does not match {d}")
    _injective(m0)


def _injective(m: CoherenceMaps) -> None:
    if len(set(m.txout.values())) != len(m.txout):
        raise MapInvariantBroken("txout is not injective")
    if len(set(m.tkid.values())) != len(m.tkid):
        raise MapInvariantBroken("tkid is not injective")
    if len(set(m.txburn.values())) != len(m.txburn):
        raise MapInvariantBroken("txburn is not injective")


def check_invariants(g: Configuration, m: CoherenceMaps, chain: Chain, directory: Directory) -> None:
    """Injectivity plus the output shape of every deposit."""
    _injective(m)
    if set(m.txout) != g.names():
        raise MapInvariantBroken("txout does not cover exactly the current deposits")
    for d in g.deposits:
        o = m.txout[d.name]
        if not chain.is_unspent(o):
            raise MapInvariantBroken(f"{d.name} maps to {o}, which is not unspent")
        out = chain.resolve(o)
        pk = directory.pk(d.owner)
        if d.token == BTC:
            if pk is None or not btc_output_ok(out, pk, d.amount):
                raise MapInvariantBroken(f"{o} does not match {d}")
            continue
        f = read_token(out)
        src = m.tkid.get(d.token)
        ok = (f is not None and is_token_script(out.scr) and out.val == 0 and 0 <= f.op <= 5
              and f.owner == pk and f.tkval == d.amount and src is not None
              and f.tkid == outpoint_digest(chain, src))
        if not ok:
            raise MapInvariantBroken(f"{o} does not match {d}")


def _check_parents(T, bound: Iterable[Outpoint], ever: set, exempt: Iterable[Outpoint]) -> None:
    """Every input of a transaction holding a newly mapped output was itself mapped."""
    if not list(bound):
        return
    allowed = ever | set(exempt)
    for i in T.inputs:
        if i not in allowed:
            raise MapInvariantBroken(f"mapped output of a transaction spending unmapped {i}")


class Checker:
    """Incremental coherence checking; feed computational labels one at a time."""

    def __init__(self, rs: SymbolicRun, rc: ComputationalRun, m0: CoherenceMaps) -> None:
        check_base(rs.initial, rc, m0)
        self.rs = rs
        self.directory = rc.directory
        self.chain = Chain.genesis(rc.coinbase)
        self.maps = m0
        self.config = rs.initial
        self.sym_index = 0
        self.ever: set[Outpoint] = set(m0.txout.values())
        self.records: list[StepRecord] = []

    def state(self) -> State:
        return State(self.config, self.maps, self.chain, self.directory)

    def _try_case1(self, ci: int, lab) -> Optional[ItemMatch]:
        if self.sym_index >= len(self.rs.steps):
            return None
        step = self.rs.steps[self.sym_index]
        st = self.state()
        if isinstance(lab, Append) and is_action(step.label):
            m = match_action(step.label, lab.tx, st, step.fresh)
        elif isinstance(lab, Broadcast) and isinstance(step.label, Auth):
            m = match_auth(step.label, lab.payload, st)
        else:
            return None
        try:
            g2, _ = apply(self.config, step.label, FixedNames(step.fresh))
        except RuleError as e:
            raise MismatchAt(ci, m.item, f"symbolic step not derivable: {e}") from None
        if g2 != step.config:
            raise MismatchAt(ci, m.item, "symbolic step does not lead to the recorded configuration")
        return m

    def feed(self, ci: int, lab) -> StepRecord:
        why = None
        try:
            m = self._try_case1(ci, lab)
        except ItemFailed as e:
            m, why = None, e
        if m is not None:
            old = set(self.maps.txout.values())
            if isinstance(lab, Append):
                self._append(ci, lab)
                new = set(m.maps.txout.values()) - old
                _check_parents(lab.tx, new, self.ever, m.exempt)
            self.maps = m.maps
            self.ever |= set(m.maps.txout.values())
            self.config = self.rs.steps[self.sym_index].config
            rec = StepRecord(ci, "1", m.item, self.sym_index)
            self.sym_index += 1
            check_invariants(self.config, self.maps, self.chain, self.directory)
        elif isinstance(lab, Append):
            hit = [o for o in lab.tx.inputs if o in self.maps.txout_inverse]
            if hit:
                detail = f"transaction spends mapped {hit[0]} but matches no symbolic step"
                if why is not None:
                    detail += f" ({why})"
                raise MismatchAt(ci, why.item if why else "2.1", detail)
            self._append(ci, lab)
            rec = StepRecord(ci, "2", "2.1")
        else:
            b = classify_broadcast(lab.payload, self.state())
            if b is not None:
                detail = f"broadcast grants an authorization on {b.z} that the symbolic run does not take"
                if why is not None:
                    detail += f" ({why})"
                raise MismatchAt(ci, b.item, detail)
            rec = StepRecord(ci, "2", "2.2")
        self.records.append(rec)
        return rec

    def _append(self, ci: int, lab: Append) -> None:
        try:
            self.chain = self.chain.append(lab.tx)
        except ValidationError as e:
            raise MismatchAt(ci, "append", f"invalid transaction: {e}") from None

    def finish(self) -> None:
        if self.sym_index != len(self.rs.steps):
            raise MismatchAt(len(self.records), "end",
                             f"{len(self.rs.steps) - self.sym_index} symbolic steps left unmatched")


def check_coherence(rs: SymbolicRun, rc: ComputationalRun, m0: CoherenceMaps) -> CoherenceReport:
    """Failures are reported, not raised; failed_at is None for the base case."""
    report = CoherenceReport(False, maps=m0)
    try:
        ck = Checker(rs, rc, m0)
        report.trace.append((0, ck.chain, ck.maps))
        for ci, lab in enumerate(rc.labels):
            report.failed_at = ci
            report.steps.append(ck.feed(ci, lab))
            report.trace.append((ck.sym_index, ck.chain, ck.maps))
        report.failed_at = len(rc.labels)
        ck.finish()
    except (MismatchAt, MapInvariantBroken) as e:
        report.failure = f"{type(e).__name__}: {e}"
        return report
    report.verdict = True
    report.maps = ck.maps
    return report

