"""The standard output scripts: plain bitcoin (e_BTC), token (e_TOK), and false."""
from __future__ import annotations

from ..script import Const, Script, script_eq
from ..script.ast import register
from ..script.syntax import parse_text

OP_GEN, OP_BURN, OP_SPLIT, OP_JOIN, OP_XCHG, OP_GIVE = range(6)
OP_NAMES = {OP_GEN: "gen", OP_BURN: "burn", OP_SPLIT: "split", OP_JOIN: "join",
            OP_XCHG: "xchg", OP_GIVE: "give"}

BTC_SOURCE = "versig(ctxo.arg.1, rtx.wit)"

# Token outputs carry arg = (op, owner, tkval, tkid).  The first clause accepts
# outputs of a minting transaction only when their tkid names the output that
# the minting transaction spent; the second dispatches on the kind of action
# performed by the redeeming transaction.
TOKEN_SOURCE = """
(if not verrec(ptxo(1)) then
    ctxo.tkid = txid(ptxo(1)) and ptxo(1).val = 0
    and outlen(ctxo) = 1 and ctxo.tkval > 0
 else true)
and
(if rtxo(1).op = 1 then
    // burn: a single unspendable output
    versig(ctxo.owner, rtx.wit) and verscr(false, rtxo(1))
    and inlen(rtxo(1)) = 1 and outlen(rtxo(1)) = 1
 else if rtxo(1).op = 2 then
    // split
    versig(ctxo.owner, rtx.wit) and verrec(rtxo(1)) and verrec(rtxo(2))
    and inlen(rtxo(1)) = 1 and outlen(rtxo(1)) = 2
    and rtxo(1).tkval >= 0 and rtxo(2).tkval >= 0
    and rtxo(1).owner = ctxo.owner
    and rtxo(1).tkid = ctxo.tkid and rtxo(2).tkid = ctxo.tkid
    and rtxo(1).tkval + rtxo(2).tkval = ctxo.tkval
 else if rtxo(1).op = 3 then
    // join: both inputs must be outputs of this same token script
    inlen(rtxo(1)) = 2 and outlen(rtxo(1)) = 1
    and verrec(rtxo(1)) and verrec(stxo(1)) and verrec(stxo(2))
    and ctxo.tkid = rtxo(1).tkid
    and versig(ctxo.owner, rtx.wit)
    and stxo(1).tkval + stxo(2).tkval = rtxo(1).tkval
 else if rtxo(1).op = 4 then
    // exchange: the first input is a token, the second a token or bitcoin
    inlen(rtxo(1)) = 2 and outlen(rtxo(1)) = 2
    and verrec(stxo(1)) and verrec(rtxo(1))
    and versig(ctxo.owner, rtx.wit)
    and rtxo(1).tkval = stxo(1).tkval and rtxo(1).tkid = stxo(1).tkid
    and (if verrec(stxo(2)) then
            verrec(rtxo(2))
            and rtxo(1).owner = stxo(2).owner and rtxo(2).owner = stxo(1).owner
            and rtxo(2).tkval = stxo(2).tkval and rtxo(2).tkid = stxo(2).tkid
         else
            verscr(versig(ctxo.arg.1, rtx.wit), rtxo(2))
            and rtxo(1).owner = stxo(2).arg.1 and rtxo(2).arg.1 = stxo(1).owner
            and rtxo(2).val = stxo(2).val)
 else if rtxo(1).op = 5 then
    // give
    inlen(rtxo(1)) = 1 and outlen(rtxo(1)) = 1
    and versig(ctxo.owner, rtx.wit) and verrec(rtxo(1))
    and rtxo(1).tkid = ctxo.tkid and rtxo(1).tkval = ctxo.tkval
 else false)
"""

E_BTC: Script = register(parse_text(BTC_SOURCE))
E_TOK: Script = register(parse_text(TOKEN_SOURCE))
E_FALSE: Script = register(Const(0))


def e_btc() -> Script:
    return E_BTC


def e_tok() -> Script:
    return E_TOK


def e_false() -> Script:
    return E_FALSE


def is_btc_script(e: Script) -> bool:
    return e is E_BTC or script_eq(e, E_BTC)


def is_token_script(e: Script) -> bool:
    return e is E_TOK or script_eq(e, E_TOK)


def is_false_script(e: Script) -> bool:
    return e is E_FALSE or script_eq(e, E_FALSE)
