"""Field checklists matching one symbolic step against one computational label.

Items 1-6 relate token actions to appended transactions, items 7-12 relate
authorizations to broadcast signatures.  Every check raises ItemFailed with
the first violated condition; the match functions also compute the updated
coherence maps.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..crypto import verify
from ..ledger import Chain, Outpoint, Transaction, TxOutput, UnknownOutpoint
from ..symbolic.config import (
    BTC,
    Action,
    Auth,
    Burn,
    Configuration,
    Deposit,
    Gen,
    Give,
    Join,
    Split,
    Xchg,
)
from ..symbolic.rules import RuleError, check_auth
from ..token.builders import TokenFields, owner_of, read_token
from ..token.scripts import (
    OP_BURN,
    OP_GEN,
    OP_GIVE,
    OP_JOIN,
    OP_SPLIT,
    OP_XCHG,
    is_btc_script,
    is_false_script,
    is_token_script,
)
from .comp import CoherenceMaps, Directory, SignatureMessage, decode_signature_message, outpoint_digest

AUTH_ITEM = {Gen: "7", Split: "8", Join: "9", Xchg: "10", Give: "11", Burn: "12"}


class ItemFailed(Exception):
    def __init__(self, item: str, detail: str) -> None:
        super().__init__(f"item {item}: {detail}")
        self.item = item
        self.detail = detail


@dataclass(frozen=True)
class State:
    """Everything an item check reads: the current configuration, maps and chain."""

    config: Configuration
    maps: CoherenceMaps
    chain: Chain
    directory: Directory

    def resolve(self, o: Outpoint) -> Optional[TxOutput]:
        try:
            return self.chain.resolve(o)
        except UnknownOutpoint:
            return None


@dataclass(frozen=True)
class ItemMatch:
    item: str
    maps: CoherenceMaps
    # inputs allowed to be unmapped in the new bindings (give sub-cases b and c)
    exempt: tuple[Outpoint, ...] = ()


def _need(ok: bool, item: str, detail: str) -> None:
    if not ok:
        raise ItemFailed(item, detail)


def _deposit(st: State, x: str, item: str) -> tuple[Deposit, Outpoint]:
    d = st.config.deposit(x)
    _need(d is not None, item, f"no deposit named {x}")
    o = st.maps.txout.get(x)
    _need(o is not None, item, f"{x} has no output")
    return d, o


def _pk(st: State, user: str, item: str) -> bytes:
    pk = st.directory.pk(user)
    _need(pk is not None, item, f"unknown user {user}")
    return pk


def _token_at(st: State, o: Outpoint, item: str) -> TokenFields:
    out = st.resolve(o)
    f = read_token(out) if out is not None else None
    _need(f is not None, item, f"{o} carries no token fields")
    return f


def btc_output_ok(out: TxOutput, pk: bytes, val: int) -> bool:
    return is_btc_script(out.scr) and out.arg == (pk,) and out.val == val


def token_output_ok(out: TxOutput, op: Optional[int], pk: bytes, tkval: int, tkid: bytes) -> bool:
    """Token-shaped output; op=None accepts any action code."""
    f = read_token(out)
    if f is None or not is_token_script(out.scr) or out.val != 0:
        return False
    if op is None:
        if not 0 <= f.op <= 5:
            return False
    elif f.op != op:
        return False
    return f.owner == pk and f.tkval == tkval and f.tkid == tkid


def _shape(T: Transaction, ins: tuple, n_out: int, item: str) -> None:
    _need(T.inputs == ins, item, "inputs do not match the deposits")
    _need(len(T.outputs) == n_out, item, f"expected {n_out} outputs, got {len(T.outputs)}")


# items 1-5

def check_gen(T: Transaction, l: Gen, st: State) -> str:
    it = "1"
    d, o = _deposit(st, l.x, it)
    _need(d.token == BTC and d.amount == 0, it, f"{l.x} is not a 0-valued bitcoin deposit")
    _need(l.v > 0, it, "minted value must be positive")
    _shape(T, (o,), 1, it)
    tkid = outpoint_digest(st.chain, o)
    _need(token_output_ok(T.outputs[0], OP_GEN, _pk(st, d.owner, it), l.v, tkid), it, "output fields")
    return it


def check_split(T: Transaction, l: Split, st: State) -> str:
    it = "2"
    d, o = _deposit(st, l.x, it)
    rest = d.amount - l.v
    _need(l.v >= 0 and rest >= 0, it, "both parts must be non-negative")
    _shape(T, (o,), 2, it)
    pa, pb = _pk(st, d.owner, it), _pk(st, l.to, it)
    o1, o2 = T.outputs
    if d.token == BTC:
        _need(btc_output_ok(o1, pa, l.v) and btc_output_ok(o2, pb, rest), it, "bitcoin output fields")
    else:
        tkid = _token_at(st, o, it).tkid
        _need(token_output_ok(o1, OP_SPLIT, pa, l.v, tkid), it, "first output fields")
        _need(token_output_ok(o2, None, pb, rest, tkid), it, "second output fields")
    return it


def check_join(T: Transaction, l: Join, st: State) -> str:
    it = "3"
    _need(l.x != l.y, it, "the two deposits must be distinct")
    dx, ox = _deposit(st, l.x, it)
    dy, oy = _deposit(st, l.y, it)
    _need(dx.token == dy.token, it, "deposits hold different tokens")
    _shape(T, (ox, oy), 1, it)
    pc = _pk(st, l.to, it)
    total = dx.amount + dy.amount
    if dx.token == BTC:
        _need(btc_output_ok(T.outputs[0], pc, total), it, "bitcoin output fields")
    else:
        tkid = _token_at(st, ox, it).tkid
        _need(_token_at(st, oy, it).tkid == tkid, it, "inputs carry different tkids")
        _need(token_output_ok(T.outputs[0], OP_JOIN, pc, total, tkid), it, "output fields")
    return it


def check_xchg(T: Transaction, l: Xchg, st: State) -> str:
    it = "4"
    _need(l.x != l.y, it, "the two deposits must be distinct")
    dx, ox = _deposit(st, l.x, it)
    dy, oy = _deposit(st, l.y, it)
    _need(dx.token != BTC, it, "the first deposit must hold a user token")
    _shape(T, (ox, oy), 2, it)
    pa, pb = _pk(st, dx.owner, it), _pk(st, dy.owner, it)
    o1, o2 = T.outputs
    _need(token_output_ok(o1, OP_XCHG, pb, dx.amount, _token_at(st, ox, it).tkid), it, "first output fields")
    if dy.token == BTC:
        _need(btc_output_ok(o2, pa, dy.amount), it, "second output fields")
    else:
        _need(token_output_ok(o2, None, pa, dy.amount, _token_at(st, oy, it).tkid), it, "second output fields")
    return it


def check_give(T: Transaction, l: Give, st: State) -> str:
    """Returns the matching sub-case, trying a, then b, then c."""
    it = "5"
    d, o = _deposit(st, l.x, it)
    pb = _pk(st, l.to, it)
    if T.inputs == (o,) and len(T.outputs) == 1:
        out = T.outputs[0]
        if d.token == BTC:
            _need(btc_output_ok(out, pb, d.amount), "5a", "bitcoin output fields")
        else:
            tkid = _token_at(st, o, "5a").tkid
            _need(token_output_ok(out, OP_GIVE, pb, d.amount, tkid), "5a", "output fields")
        return "5a"
    _need(d.token != BTC, it, "transaction shape does not match a give of bitcoin")
    _need(len(T.inputs) == 2 and len(T.outputs) == 2, it, "transaction shape does not match a give")
    tkid = _token_at(st, o, it).tkid
    i1, i2 = T.inputs
    mapped = st.maps.txout_inverse
    if i1 == o and i2 not in mapped:
        it = "5b"
        other = st.resolve(i2)
        _need(other is not None and owner_of(other) == pb, it, "the recipient does not own the second input")
        _need(token_output_ok(T.outputs[0], OP_XCHG, pb, d.amount, tkid), it, "first output fields")
        return it
    if i2 == o and i1 not in mapped:
        it = "5c"
        other = st.resolve(i1)
        _need(other is not None and owner_of(other) == pb, it, "the recipient does not own the first input")
        f1 = read_token(T.outputs[0])
        _need(f1 is not None and f1.op == OP_XCHG, it, "first output is not an exchange")
        _need(token_output_ok(T.outputs[1], None, pb, d.amount, tkid), it, "second output fields")
        return it
    raise ItemFailed(it, "transaction shape does not match a give")


# item 6

def check_burn(T: Transaction, xs: tuple[str, ...], st: State) -> str:
    it = "6"
    _need(len(xs) > 0 and len(set(xs)) == len(xs), it, "burnt deposits must be distinct and non-empty")
    ds, os = [], []
    for x in xs:
        d, o = _deposit(st, x, it)
        ds.append(d)
        os.append(o)
    if len(ds) == 1 and ds[0].token != BTC:
        it = "6a"
        _shape(T, (os[0],), 1, it)
        out = T.outputs[0]
        _need(len(out.arg) > 0 and type(out.arg[0]) is int and out.arg[0] == OP_BURN, it, "op is not burn")
        _need(is_false_script(out.scr) and out.val == 0, it, "output is not an unspendable 0-valued output")
        return it
    it = "6b"
    _need(all(d.token == BTC for d in ds), it, "several deposits can be burnt together only if all hold bitcoin")
    mapped = {o for o in T.inputs if o in st.maps.txout_inverse}
    _need(mapped == set(os), it, "the mapped inputs are not exactly the burnt deposits")
    _need(classify_action(T, st) is None, it, "the transaction corresponds to another action")
    return it


_CHECKS = {Gen: check_gen, Split: check_split, Join: check_join, Xchg: check_xchg, Give: check_give}


def check_action(l: Action, T: Transaction, st: State) -> str:
    if isinstance(l, Burn):
        return check_burn(T, l.xs, st)
    return _CHECKS[type(l)](T, l, st)


def _candidates(T: Transaction, st: State) -> list[Action]:
    names = [st.maps.name_at(o) for o in T.inputs]
    outs = T.outputs
    name = st.directory.name
    cands: list[Action] = []
    if len(names) == 1 and names[0] is not None:
        x = names[0]
        d = st.config.deposit(x)
        if d is None:
            return cands
        if len(outs) == 1:
            f = read_token(outs[0])
            if f is not None:
                cands.append(Gen(x, f.tkval))
            pk = owner_of(outs[0])
            if pk is not None:
                cands.append(Give(x, name(pk)))
        elif len(outs) == 2:
            pk = owner_of(outs[1])
            if d.token == BTC:
                v = outs[0].val
            else:
                f = read_token(outs[0])
                v = f.tkval if f is not None else None
            if pk is not None and v is not None:
                cands.append(Split(x, v, name(pk)))
    elif len(names) == 2:
        x, y = names
        if x is not None and y is not None:
            if len(outs) == 1:
                pk = owner_of(outs[0])
                if pk is not None:
                    cands.append(Join(x, y, name(pk)))
            elif len(outs) == 2:
                cands.append(Xchg(x, y))
        elif (x is None) != (y is None) and len(outs) == 2:
            other = st.resolve(T.inputs[0 if x is None else 1])
            pk = owner_of(other) if other is not None else None
            if pk is not None:
                cands.append(Give(x if x is not None else y, name(pk)))
    return cands


def classify_action(T: Transaction, st: State) -> Optional[tuple[Action, str]]:
    """The gen/split/join/xchg/give action that T implements, with its item, if any."""
    for l in _candidates(T, st):
        try:
            return l, check_action(l, T, st)
        except ItemFailed:
            continue
    return None


def classify_burn(T: Transaction, st: State) -> Optional[tuple[tuple[str, ...], str]]:
    """The deposits T burns (in input order) when it matches item 6."""
    xs = tuple(n for n in (st.maps.name_at(o) for o in T.inputs) if n is not None)
    if not xs:
        return None
    try:
        return xs, check_burn(T, xs, st)
    except ItemFailed:
        return None


# items 7-12

@dataclass(frozen=True)
class BroadcastMatch:
    message: SignatureMessage
    z: str
    user: str
    action: Optional[Action]  # None for a burn
    burn_xs: tuple[str, ...]
    item: str


def _signed_input(msg: SignatureMessage, st: State) -> Optional[tuple[str, Deposit]]:
    z = st.maps.name_at(msg.tx.inputs[msg.input_index - 1])
    if z is None:
        return None
    d = st.config.deposit(z)
    pk = st.directory.pk(d.owner) if d is not None else None
    if pk is None or not verify(pk, msg.signature, msg.tx):
        return None
    return z, d


def classify_broadcast(payload: bytes, st: State) -> Optional[BroadcastMatch]:
    """The authorization a broadcast payload grants, if it corresponds to one."""
    msg = decode_signature_message(payload)
    if msg is None:
        return None
    hit = _signed_input(msg, st)
    if hit is None:
        return None
    z, d = hit
    T = msg.tx
    act = classify_action(T, st)
    if act is not None:
        l, _ = act
        try:
            check_auth(st.config, Auth(z, d.owner, l))
        except RuleError:
            return None
        return BroadcastMatch(msg, z, d.owner, l, (), AUTH_ITEM[type(l)])
    burn = classify_burn(T, st)
    if burn is not None and z in burn[0]:
        return BroadcastMatch(msg, z, d.owner, None, burn[0], "12")
    return None


def burn_target(T: Transaction) -> str:
    """Deposit name reserved for the burn implemented by T."""
    return "burn:" + T.sighash.hex()


def match_auth(l: Auth, payload: bytes, st: State) -> ItemMatch:
    it = AUTH_ITEM[type(l.action)]
    msg = decode_signature_message(payload)
    _need(msg is not None, it, "broadcast is not a signature message")
    T = msg.tx
    d, o = _deposit(st, l.z, it)
    _need(T.inputs[msg.input_index - 1] == o, it, f"signature is not for the input redeeming {l.z}")
    _need(d.owner == l.user, it, f"{l.user} does not own {l.z}")
    _need(verify(_pk(st, l.user, it), msg.signature, T), it, "signature does not verify")
    inner = l.action
    if isinstance(inner, Burn):
        try:
            check_burn(T, inner.xs, st)
        except ItemFailed as e:
            raise ItemFailed(it, e.detail) from None
        prev = st.maps.txburn.get(inner.y)
        if prev is not None:
            _need(prev == T.stripped(), it, f"{inner.y} is already bound to another transaction")
            return ItemMatch(it, st.maps)
        _need(T.stripped() not in st.maps.txburn.values(), it, "transaction already bound to another burn")
        return ItemMatch(it, st.maps.update(burn_bind={inner.y: T}))
    try:
        check_action(inner, T, st)
    except ItemFailed as e:
        raise ItemFailed(it, e.detail) from None
    return ItemMatch(it, st.maps)


def match_action(l: Action, T: Transaction, st: State, fresh: tuple[str, ...]) -> ItemMatch:
    """Check T against the item for l; `fresh` are the names drawn by the symbolic step."""
    m = st.maps
    if isinstance(l, Gen):
        it = check_gen(T, l, st)
        y, t = fresh
        return ItemMatch(it, m.update(drop=[l.x], bind={y: T.outpoint(1)}, tokens={t: m.txout[l.x]}))
    if isinstance(l, Split):
        it = check_split(T, l, st)
        y, y2 = fresh
        return ItemMatch(it, m.update(drop=[l.x], bind={y: T.outpoint(1), y2: T.outpoint(2)}))
    if isinstance(l, Join):
        it = check_join(T, l, st)
        (z,) = fresh
        return ItemMatch(it, m.update(drop=[l.x, l.y], bind={z: T.outpoint(1)}))
    if isinstance(l, Xchg):
        it = check_xchg(T, l, st)
        x2, y2 = fresh
        return ItemMatch(it, m.update(drop=[l.x, l.y], bind={x2: T.outpoint(2), y2: T.outpoint(1)}))
    if isinstance(l, Give):
        it = check_give(T, l, st)
        (y,) = fresh
        if it == "5a":
            return ItemMatch(it, m.update(drop=[l.x], bind={y: T.outpoint(1)}))
        if it == "5b":
            return ItemMatch(it, m.update(drop=[l.x], bind={y: T.outpoint(1)}), (T.inputs[1],))
        return ItemMatch(it, m.update(drop=[l.x], bind={y: T.outpoint(2)}), (T.inputs[0],))
    if isinstance(l, Burn):
        it = check_burn(T, l.xs, st)
        _need(m.txburn.get(l.y) == T.stripped(), it, f"{l.y} is not bound to this transaction")
        return ItemMatch(it, m.update(drop=l.xs, burn_drop=[l.y]))
    raise TypeError(f"not an action: {l!r}")
