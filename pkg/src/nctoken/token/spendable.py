"""Deciding whether an unspent output can still be redeemed.

Signatures are assumed producible by the key owner: candidate redeeming
transactions are evaluated with a signature check that accepts any well-formed
public key, so only the non-signature conditions of the script matter.
"""
from __future__ import annotations

from typing import Iterator

from ..crypto import PUBLIC_KEY_SIZE, SIGNATURE_SIZE
from ..script import Const, EvalCtx, evaluate
from ..script.values import BOTTOM, truthy
from .scripts import E_BTC, E_FALSE, E_TOK, OP_BURN, OP_GIVE, OP_SPLIT, is_btc_script, is_token_script
from ..ledger.chain import Chain
from ..ledger.tx import Outpoint, Transaction, TxOutput

_SIG = (b"\x00" * SIGNATURE_SIZE,)
_CACHE_LIMIT = 1 << 17
_token_cache: dict[Outpoint, bool] = {}


class UnknownScriptShape(Exception):
    pass


def _owner_signs(pk: object, sig: object, tx: object) -> bool:
    return type(pk) is bytes and len(pk) == PUBLIC_KEY_SIZE and type(sig) is bytes


def _redeems(chain: Chain, o: Outpoint, outputs: list[TxOutput]) -> bool:
    tx = Transaction((o,), (_SIG,), tuple(outputs))
    v = evaluate(chain.resolve(o).scr, EvalCtx(chain, tx, 1, sig_check=_owner_signs))
    return v is not BOTTOM and truthy(v)


def _token_templates(out: TxOutput) -> Iterator[list[TxOutput]]:
    a = out.arg
    if len(a) < 4:
        return
    owner, tkval, tkid = a[1], a[2], a[3]
    yield [TxOutput((OP_GIVE, owner, tkval, tkid), E_TOK, 0)]
    yield [TxOutput((OP_BURN, owner, tkval, tkid), E_FALSE, 0)]
    if type(tkval) is int and tkval >= 0:
        yield [TxOutput((OP_SPLIT, owner, 0, tkid), E_TOK, 0),
               TxOutput((OP_SPLIT, owner, tkval, tkid), E_TOK, 0)]


def _generic_templates(out: TxOutput) -> Iterator[list[TxOutput]]:
    pk = b"\x01" * PUBLIC_KEY_SIZE
    yield [TxOutput((pk,), E_BTC, out.val)]
    yield [TxOutput((pk,), E_BTC, 0)]
    yield [TxOutput(out.arg, out.scr, out.val)]
    yield [TxOutput((), E_FALSE, 0)]


def is_spendable(chain: Chain, o: Outpoint, search: bool = True) -> bool:
    """False for spent outputs.  Raises UnknownScriptShape when no candidate
    redeeming transaction works for a script of unknown shape."""
    out = chain.resolve(o)
    if not chain.is_unspent(o):
        return False
    scr = out.scr
    if isinstance(scr, Const):
        return truthy(scr.value)
    if is_btc_script(scr):
        return len(out.arg) >= 1 and _owner_signs(out.arg[0], b"", None)
    if is_token_script(scr):
        # depends only on the output and its parents, all fixed by the txid
        hit = _token_cache.get(o)
        if hit is None:
            hit = any(_redeems(chain, o, t) for t in _token_templates(out))
            if len(_token_cache) > _CACHE_LIMIT:
                _token_cache.clear()
            _token_cache[o] = hit
        return hit
    if search and any(_redeems(chain, o, t) for t in _generic_templates(out)):
        return True
    raise UnknownScriptShape(f"cannot decide whether {o} is spendable")
