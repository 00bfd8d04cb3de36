"""Computational token balance."""
from __future__ import annotations

from ..ledger import Chain, Outpoint
from .spendable import is_spendable
from .builders import read_token
from .scripts import is_token_script


def tokval_c(chain: Chain, tok: Outpoint) -> int:
    """Units held by spendable token outputs whose tkid names `tok`."""
    src = chain.get_tx(tok.txid)
    if src is None or not 1 <= tok.index <= len(src.outputs):
        return 0
    tkid = src.output_digest(tok.index)
    total = 0
    for o in chain.utxo():
        out = chain.resolve(o)
        if not is_token_script(out.scr):
            continue
        f = read_token(out)
        if f is not None and f.tkid == tkid and is_spendable(chain, o):
            total += f.tkval
    return total


def token_balances(chain: Chain) -> dict[bytes, int]:
    """tkid -> units held by spendable token outputs, in one pass over the UTXO set."""
    out: dict[bytes, int] = {}
    for o in chain.utxo():
        txo = chain.resolve(o)
        if not is_token_script(txo.scr):
            continue
        f = read_token(txo)
        if f is not None and type(f.tkval) is int and is_spendable(chain, o):
            out[f.tkid] = out.get(f.tkid, 0) + f.tkval
    return out
