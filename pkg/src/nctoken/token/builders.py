"""Builders for the transactions implementing the six token actions.

Each builder reads the chain, checks the action's preconditions, and returns
a transaction with one signature per input (the owner of the redeemed output
signs).  Keys are looked up by public key in a keyring; pass `sign=False` to
get the unsigned transaction instead.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from ..crypto import KeyPair, sign as sign_tx
from ..ledger import Chain, Outpoint, Transaction, TxOutput, UnknownOutpoint
from .scripts import (
    E_BTC,
    E_FALSE,
    E_TOK,
    OP_BURN,
    OP_GEN,
    OP_GIVE,
    OP_JOIN,
    OP_SPLIT,
    OP_XCHG,
    is_btc_script,
    is_token_script,
)


class BuildError(ValueError):
    pass


class UnknownDeposit(BuildError):
    pass


class NonZeroValue(BuildError):
    pass


class NotBtcDeposit(BuildError):
    pass


class NonPositiveMint(BuildError):
    pass


class InsufficientUnits(BuildError):
    pass


class TokenMismatch(BuildError):
    pass


class MixedAsset(BuildError):
    pass


class FirstInputNotToken(BuildError):
    pass


class MixedBurn(BuildError):
    pass


class MissingKey(BuildError):
    pass


@dataclass(frozen=True)
class TokenFields:
    op: int
    owner: bytes
    tkval: int
    tkid: bytes


def token_arg(op: int, owner: bytes, tkval: int, tkid: bytes) -> tuple:
    return (op, owner, tkval, tkid)


def read_token(out: TxOutput) -> Optional[TokenFields]:
    """The token fields of an output, or None when its arg is not token-shaped."""
    a = out.arg
    if len(a) < 4:
        return None
    op, owner, tkval, tkid = a[:4]
    if type(op) is not int or type(owner) is not bytes or type(tkval) is not int or type(tkid) is not bytes:
        return None
    return TokenFields(op, owner, tkval, tkid)


def owner_of(out: TxOutput) -> Optional[bytes]:
    """Public key controlling an output: arg.2 for token outputs, arg.1 otherwise."""
    pos = 1 if is_token_script(out.scr) else 0
    if len(out.arg) > pos and type(out.arg[pos]) is bytes:
        return out.arg[pos]
    return None


def btc_output(owner: bytes, val: int) -> TxOutput:
    return TxOutput((owner,), E_BTC, val)


def token_output(op: int, owner: bytes, tkval: int, tkid: bytes) -> TxOutput:
    return TxOutput(token_arg(op, owner, tkval, tkid), E_TOK, 0)


class Keyring:
    """Key pairs indexed by public key."""

    def __init__(self, keys: Iterable[KeyPair] = ()) -> None:
        self._by_pk: dict[bytes, KeyPair] = {}
        for k in keys:
            self.add(k)

    def add(self, k: KeyPair) -> None:
        self._by_pk[k.public_key] = k

    def get(self, pk: Optional[bytes]) -> Optional[KeyPair]:
        return self._by_pk.get(pk) if pk is not None else None

    def __contains__(self, pk: object) -> bool:
        return pk in self._by_pk


KeySource = Union[Keyring, KeyPair, Iterable[KeyPair], Mapping[bytes, KeyPair]]


def _keyring(keys: KeySource) -> Keyring:
    if isinstance(keys, Keyring):
        return keys
    if isinstance(keys, KeyPair):
        return Keyring([keys])
    if isinstance(keys, Mapping):
        return Keyring(keys.values())
    return Keyring(keys)


def sign_inputs(chain: Chain, tx: Transaction, keys: KeySource) -> Transaction:
    """Fill every witness with the signature of the redeemed output's owner."""
    ring = _keyring(keys)
    wits = []
    for i, o in enumerate(tx.inputs, 1):
        pk = owner_of(chain.resolve(o))
        k = ring.get(pk)
        if k is None:
            raise MissingKey(f"no key for the owner of input {i}")
        wits.append((sign_tx(k.secret_key, tx),))
    return tx.with_witnesses(wits)


def _finish(chain: Chain, inputs: list, outputs: list, keys: Optional[KeySource], sign: bool) -> Transaction:
    tx = Transaction(tuple(inputs), tuple(() for _ in inputs), tuple(outputs))
    if not sign:
        return tx
    if keys is None:
        raise MissingKey("signing requested but no keys given")
    return sign_inputs(chain, tx, keys)


def _deposit(chain: Chain, x: Outpoint) -> TxOutput:
    try:
        out = chain.resolve(x)
    except UnknownOutpoint:
        raise UnknownDeposit(f"{x} is not an output of the chain") from None
    if not chain.is_unspent(x):
        raise UnknownDeposit(f"{x} is already spent")
    return out


def _kind(out: TxOutput) -> str:
    if is_token_script(out.scr) and read_token(out) is not None:
        return "token"
    if is_btc_script(out.scr) and owner_of(out) is not None:
        return "btc"
    return "other"


def tkid_of(chain: Chain, x: Outpoint) -> bytes:
    """Token identifier derived from the outpoint spent to mint it."""
    tx = chain.get_tx(x.txid)
    if tx is None:
        raise UnknownDeposit(str(x))
    return tx.output_digest(x.index)


def build_gen(chain: Chain, x: Outpoint, v: int, keys: Optional[KeySource] = None,
              sign: bool = True) -> Transaction:
    out = _deposit(chain, x)
    if _kind(out) != "btc":
        raise NotBtcDeposit(f"{x} is not a bitcoin deposit")
    if out.val != 0:
        raise NonZeroValue(f"{x} holds {out.val}, minting requires a 0-valued deposit")
    if v <= 0:
        raise NonPositiveMint(f"cannot mint {v} units")
    owner = owner_of(out)
    outputs = [token_output(OP_GEN, owner, v, tkid_of(chain, x))]
    return _finish(chain, [x], outputs, keys, sign)


def build_split(chain: Chain, x: Outpoint, v1: int, recipient_pk: bytes,
                keys: Optional[KeySource] = None, sign: bool = True) -> Transaction:
    out = _deposit(chain, x)
    kind = _kind(out)
    if kind == "token":
        tok = read_token(out)
        total = tok.tkval
    elif kind == "btc":
        total = out.val
    else:
        raise UnknownDeposit(f"{x} is neither a token nor a bitcoin deposit")
    if not 0 <= v1 <= total:
        raise InsufficientUnits(f"cannot split {v1} out of {total}")
    if kind == "token":
        outputs = [token_output(OP_SPLIT, tok.owner, v1, tok.tkid),
                   token_output(OP_SPLIT, recipient_pk, total - v1, tok.tkid)]
    else:
        outputs = [btc_output(owner_of(out), v1), btc_output(recipient_pk, total - v1)]
    return _finish(chain, [x], outputs, keys, sign)


def build_join(chain: Chain, x: Outpoint, y: Outpoint, new_owner_pk: bytes,
               keys: Optional[KeySource] = None, sign: bool = True,
               check_tokens: bool = True) -> Transaction:
    """Join two deposits.  With check_tokens=False a join of distinct tokens is
    built anyway (and then rejected by the token script at validation)."""
    ox, oy = _deposit(chain, x), _deposit(chain, y)
    kx, ky = _kind(ox), _kind(oy)
    if x == y:
        raise UnknownDeposit("cannot join a deposit with itself")
    if kx != ky or kx == "other":
        raise MixedAsset("join needs two token deposits or two bitcoin deposits")
    if kx == "token":
        tx_, ty = read_token(ox), read_token(oy)
        if check_tokens and tx_.tkid != ty.tkid:
            raise TokenMismatch("deposits hold different tokens")
        outputs = [token_output(OP_JOIN, new_owner_pk, tx_.tkval + ty.tkval, tx_.tkid)]
    else:
        outputs = [btc_output(new_owner_pk, ox.val + oy.val)]
    return _finish(chain, [x, y], outputs, keys, sign)


def build_xchg(chain: Chain, x_token: Outpoint, y_other: Outpoint,
               keys: Optional[KeySource] = None, sign: bool = True) -> Transaction:
    ox, oy = _deposit(chain, x_token), _deposit(chain, y_other)
    if _kind(ox) != "token":
        raise FirstInputNotToken(f"{x_token} is not a token deposit")
    tx_ = read_token(ox)
    ky = _kind(oy)
    if ky == "other":
        raise UnknownDeposit(f"{y_other} is neither a token nor a bitcoin deposit")
    y_owner = owner_of(oy)
    out1 = token_output(OP_XCHG, y_owner, tx_.tkval, tx_.tkid)
    if ky == "token":
        ty = read_token(oy)
        out2 = token_output(OP_XCHG, tx_.owner, ty.tkval, ty.tkid)
    else:
        out2 = btc_output(tx_.owner, oy.val)
    return _finish(chain, [x_token, y_other], [out1, out2], keys, sign)


def build_give(chain: Chain, x: Outpoint, recipient_pk: bytes,
               keys: Optional[KeySource] = None, sign: bool = True) -> Transaction:
    out = _deposit(chain, x)
    kind = _kind(out)
    if kind == "token":
        tok = read_token(out)
        outputs = [token_output(OP_GIVE, recipient_pk, tok.tkval, tok.tkid)]
    elif kind == "btc":
        outputs = [btc_output(recipient_pk, out.val)]
    else:
        raise UnknownDeposit(f"{x} is neither a token nor a bitcoin deposit")
    return _finish(chain, [x], outputs, keys, sign)


def build_burn(chain: Chain, xs: list[Outpoint], keys: Optional[KeySource] = None,
               sign: bool = True) -> Transaction:
    if not xs:
        raise UnknownDeposit("nothing to burn")
    outs = [_deposit(chain, x) for x in xs]
    if len(set(xs)) != len(xs):
        raise UnknownDeposit("duplicate deposit in burn")
    kinds = [_kind(o) for o in outs]
    if "other" in kinds:
        raise UnknownDeposit("burn of a deposit that is neither token nor bitcoin")
    if "token" in kinds:
        if len(xs) != 1:
            raise MixedBurn("a token deposit can only be burnt alone")
        tok = read_token(outs[0])
        outputs = [TxOutput(token_arg(OP_BURN, tok.owner, tok.tkval, tok.tkid), E_FALSE, 0)]
    else:
        outputs = [TxOutput((), E_FALSE, sum(o.val for o in outs))]
    return _finish(chain, list(xs), outputs, keys, sign)
