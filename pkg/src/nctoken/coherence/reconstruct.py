"""Lift a computational run to a coherent symbolic run.

Deposits are named after the outpoints they map to, tokens after the outpoint
spent to mint them, and burn targets after the burning transaction's sighash,
so the reconstructed run is canonical.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Optional

from ..crypto import verify
from ..ledger import Outpoint, Transaction, ValidationError
from ..symbolic.config import BTC, Action, Auth, Burn, Configuration, Deposit, Give, Join, Split, Xchg
from ..symbolic.rules import FixedNames, RuleError
from ..symbolic.run import SymbolicRun
from ..token.builders import owner_of, read_token
from ..token.scripts import OP_BURN, OP_JOIN, OP_SPLIT, OP_XCHG, is_btc_script, is_token_script
from .checker import Checker, CoherenceReport, MapInvariantBroken, MismatchAt, check_coherence
from .comp import Append, CoherenceMaps, ComputationalRun, decode_signature_message
from .items import ItemFailed, State, burn_target, check_action, classify_action, classify_broadcast


class ReconstructionError(Exception):
    pass


def deposit_name(o: Outpoint) -> str:
    return str(o)


def token_name(o: Outpoint) -> str:
    return "tok:" + str(o)


def initial_state(rc: ComputationalRun,
                  initial_names: Optional[Mapping[Outpoint, str]] = None) -> tuple[Configuration, CoherenceMaps]:
    """One bitcoin deposit per well-formed coinbase output."""
    names = dict(initial_names or {})
    deposits, txout = [], {}
    cb = rc.coinbase
    for i, out in enumerate(cb.outputs, 1):
        if not (is_btc_script(out.scr) and len(out.arg) == 1 and type(out.arg[0]) is bytes):
            continue
        o = cb.outpoint(i)
        x = names.get(o, deposit_name(o))
        deposits.append(Deposit(x, rc.directory.name(out.arg[0]), out.val, BTC))
        txout[x] = o
    return Configuration(deposits), CoherenceMaps(txout)


def _fresh_for(l: Action, T: Transaction, item: str, st: State) -> tuple[str, ...]:
    """Fresh names, chosen as the outpoints the new deposits will map to."""
    op = T.outpoint
    if isinstance(l, Burn):
        return ()
    if isinstance(l, (Split, Xchg)):
        return deposit_name(op(1)), deposit_name(op(2))
    if isinstance(l, Give) and item == "5c":
        return (deposit_name(op(2)),)
    if isinstance(l, (Join, Give)):
        return (deposit_name(op(1)),)
    # gen
    return deposit_name(op(1)), token_name(st.maps.txout[l.x])


def _token_dispatch(T: Transaction, st: State) -> Action:
    """Decision tree for a transaction spending at least one mapped token deposit."""
    names = [st.maps.name_at(o) for o in T.inputs]
    x = next(n for n in names if n is not None and st.config.deposit(n).token != BTC)
    f1 = read_token(T.outputs[0]) if T.outputs else None
    op = f1.op if f1 is not None else None
    if op == OP_BURN or op is None:
        return Burn((x,), burn_target(T))
    if op == OP_SPLIT:
        return Split(x, f1.tkval, st.directory.name(owner_of(T.outputs[1])))
    if op == OP_JOIN:
        if None in names or len(names) != 2:
            raise ReconstructionError("join spending an unmapped output")
        return Join(names[0], names[1], st.directory.name(owner_of(T.outputs[0])))
    if op == OP_XCHG:
        if len(names) != 2:
            raise ReconstructionError("exchange with a wrong number of inputs")
        if None in names:
            other = st.resolve(T.inputs[names.index(None)])
            return Give(x, st.directory.name(owner_of(other)))
        return Xchg(names[0], names[1])
    # gen outputs are never redeemed as tokens by a gen; remaining op is give
    return Give(x, st.directory.name(owner_of(T.outputs[0])))


class _Reconstructor:
    def __init__(self, rc: ComputationalRun, honest: Iterable[str],
                 initial_names: Optional[Mapping[Outpoint, str]]) -> None:
        self.rc = rc
        self.honest = set(honest)
        g0, m0 = initial_state(rc, initial_names)
        self.m0 = m0
        self.run = SymbolicRun(g0)
        self.checker = Checker(self.run, rc, m0)
        # (pk, sighash, signature) first broadcast by their honest signer
        self.honest_sigs: set[tuple[bytes, bytes, bytes]] = set()
        self.honest_pks = {rc.directory.pk(u): u for u in self.honest if rc.directory.pk(u) is not None}

    def state(self) -> State:
        ck = self.checker
        return State(ck.config, ck.maps, ck.chain, ck.directory)

    def _extend(self, label, fresh: tuple[str, ...]) -> None:
        try:
            self.run = self.run.extend(label, FixedNames(fresh))
        except RuleError as e:
            raise ReconstructionError(f"symbolic step {label} not derivable: {e}") from None
        self.checker.rs = self.run

    def broadcast(self, ci: int, lab) -> None:
        msg = decode_signature_message(lab.payload)
        if msg is not None:
            pk = self._signer_pk(msg)
            user = self.honest_pks.get(pk)
            if user is not None:
                key = (pk, msg.tx.sighash, msg.signature)
                if lab.sender == user:
                    self.honest_sigs.add(key)
                elif key not in self.honest_sigs and verify(pk, msg.signature, msg.tx):
                    raise ReconstructionError(f"{lab.sender} broadcast a signature of honest {user} "
                                              "never broadcast by its owner")
        st = self.state()
        b = classify_broadcast(lab.payload, st)
        if b is not None:
            action = b.action if b.action is not None else Burn(b.burn_xs, burn_target(b.message.tx))
            self._extend(Auth(b.z, b.user, action), ())
        self.checker.feed(ci, lab)

    def _signer_pk(self, msg) -> Optional[bytes]:
        st = self.state()
        o = msg.tx.inputs[msg.input_index - 1]
        out = st.resolve(o)
        return owner_of(out) if out is not None else None

    def append(self, ci: int, lab: Append) -> None:
        T = lab.tx
        st = self.state()
        self._check_witnesses(T, st)
        mapped = [st.maps.name_at(o) for o in T.inputs]
        if any(n is not None for n in mapped):
            label = self._classify(T, st)
            try:
                item = check_action(label, T, st)
            except ItemFailed:
                item = "?"
            self._extend(label, _fresh_for(label, T, item, st))
        self.checker.feed(ci, lab)

    def _classify(self, T: Transaction, st: State) -> Action:
        mapped = [n for n in (st.maps.name_at(o) for o in T.inputs) if n is not None]
        if all(st.config.deposit(n).token == BTC for n in mapped):
            hit = classify_action(T, st)
            if hit is not None:
                return hit[0]
            return Burn(tuple(mapped), burn_target(T))
        label = _token_dispatch(T, st)
        if not isinstance(label, Burn):
            hit = classify_action(T, st)
            if hit is None or hit[0] != label:
                raise ReconstructionError(f"token transaction {T.txid.hex()[:16]} matches no action")
        return label

    def _check_witnesses(self, T: Transaction, st: State) -> None:
        """Honest users' signatures must have been broadcast by them first."""
        for o, wit in zip(T.inputs, T.witnesses):
            out = st.resolve(o)
            pk = owner_of(out) if out is not None and (is_btc_script(out.scr) or is_token_script(out.scr)) else None
            user = self.honest_pks.get(pk)
            if user is None or len(wit) != 1 or type(wit[0]) is not bytes:
                continue
            if (pk, T.sighash, wit[0]) not in self.honest_sigs and verify(pk, wit[0], T):
                raise ReconstructionError(f"transaction carries a signature of honest {user} never broadcast")


def reconstruct(rc: ComputationalRun, honest: Iterable[str] = (),
                initial_names: Optional[Mapping[Outpoint, str]] = None
                ) -> tuple[SymbolicRun, CoherenceMaps, CoherenceReport]:
    """Symbolic run and maps coherent with rc; initial_names renames coinbase deposits."""
    r = _Reconstructor(rc, honest, initial_names)
    try:
        for ci, lab in enumerate(rc.labels):
            if isinstance(lab, Append):
                r.append(ci, lab)
            else:
                r.broadcast(ci, lab)
    except ValidationError as e:
        raise ReconstructionError(f"invalid computational run: {e}") from None
    except (MismatchAt, MapInvariantBroken) as e:
        raise ReconstructionError(str(e)) from e
    report = check_coherence(r.run, rc, r.m0)
    if not report.verdict:
        raise ReconstructionError(f"reconstructed run is not coherent: {report.failure}")
    return r.run, report.maps, report
