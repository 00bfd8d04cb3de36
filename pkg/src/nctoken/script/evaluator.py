"""Production evaluator: each AST node is compiled once into a closure.

Evaluation is strict: BOTTOM in any operand makes the enclosing operator
BOTTOM.  `if` evaluates its condition and then only the selected branch.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Optional, Protocol

from .. import crypto
from . import ast as A
from . import values as V
from .values import BOTTOM, Value

if TYPE_CHECKING:
    from ..ledger.tx import Transaction


class TxSource(Protocol):
    def get_tx(self, txid: bytes) -> Optional[Transaction]: ...


SigCheck = Callable[[bytes, bytes, "Transaction"], bool]


@dataclass(frozen=True)
class EvalCtx:
    """Evaluation context: the redeeming tx `rtx` and which of its inputs is being checked."""

    chain: TxSource
    rtx: Transaction
    input_index: int
    sig_check: SigCheck = crypto.verify

    def __post_init__(self) -> None:
        if not 1 <= self.input_index <= len(self.rtx.inputs):
            raise ValueError(f"input index {self.input_index} out of range")


Fn = Callable[[EvalCtx], Value]
# a resolved output reference: (transaction, 1-based output index), or None for BOTTOM
TxoFn = Callable[[EvalCtx], "Optional[tuple[Transaction, int]]"]


def evaluate(e: A.Script, ctx: EvalCtx) -> Value:
    return compiled(e)(ctx)


def compiled(e: A.Script) -> Fn:
    fn = e.__dict__.get("_fn")
    if fn is None:
        fn = _compile(e)
        e.__dict__["_fn"] = fn
    return fn


def _const(v: Value) -> Fn:
    return lambda ctx: v


def _compile_txo(t: A.TxoSel) -> TxoFn:
    idx = compiled(t.index)

    if t.kind == "rtxo":
        def rtxo(ctx: EvalCtx):
            n = idx(ctx)
            if type(n) is int and 1 <= n <= len(ctx.rtx.outputs):
                return ctx.rtx, n
            return None
        return rtxo

    if t.kind == "stxo":
        def stxo(ctx: EvalCtx):
            n = idx(ctx)
            ins = ctx.rtx.inputs
            if type(n) is int and 1 <= n <= len(ins):
                return _resolve(ctx, ins[n - 1])
            return None
        return stxo

    def ptxo(ctx: EvalCtx):
        n = idx(ctx)
        if type(n) is not int:
            return None
        parent = ctx.chain.get_tx(ctx.rtx.inputs[ctx.input_index - 1].txid)
        if parent is None or not 1 <= n <= len(parent.inputs):
            return None
        return _resolve(ctx, parent.inputs[n - 1])
    return ptxo


def _resolve(ctx: EvalCtx, outpoint):
    tx = ctx.chain.get_tx(outpoint.txid)
    if tx is None or not 1 <= outpoint.index <= len(tx.outputs):
        return None
    return tx, outpoint.index


def _current_script(ctx: EvalCtx):
    op = ctx.rtx.inputs[ctx.input_index - 1]
    tx = ctx.chain.get_tx(op.txid)
    if tx is None or not 1 <= op.index <= len(tx.outputs):
        return None
    return tx.outputs[op.index - 1].scr


def _compile(e: A.Script) -> Fn:
    if isinstance(e, A.Const):
        return _const(e.value)

    if isinstance(e, A.BinOp):
        left, right = compiled(e.left), compiled(e.right)
        prim = {"+": V.add, "-": V.sub, "=": V.equal, "<": V.less}[e.op]

        def binop(ctx: EvalCtx) -> Value:
            a = left(ctx)
            if a is BOTTOM:
                return BOTTOM
            b = right(ctx)
            if b is BOTTOM:
                return BOTTOM
            return prim(a, b)
        return binop

    if isinstance(e, A.If):
        cond, then, orelse = compiled(e.cond), compiled(e.then), compiled(e.orelse)

        def if_(ctx: EvalCtx) -> Value:
            c = cond(ctx)
            if c is BOTTOM:
                return BOTTOM
            return then(ctx) if V.truthy(c) else orelse(ctx)
        return if_

    if isinstance(e, A.SeqAt):
        seq, n = compiled(e.seq), e.index

        def seq_at(ctx: EvalCtx) -> Value:
            v = seq(ctx)
            return BOTTOM if v is BOTTOM else V.seq_at(v, n)
        return seq_at

    if isinstance(e, A.RtxWit):
        def rtx_wit(ctx: EvalCtx) -> Value:
            w = ctx.rtx.witnesses[ctx.input_index - 1]
            return w[0] if len(w) == 1 else w
        return rtx_wit

    if isinstance(e, (A.Size, A.Hash)):
        arg = compiled(e.arg)
        prim = V.size if isinstance(e, A.Size) else V.hash_value

        def unary(ctx: EvalCtx) -> Value:
            v = arg(ctx)
            return BOTTOM if v is BOTTOM else prim(v)
        return unary

    if isinstance(e, A.Versig):
        key, sig = compiled(e.key), compiled(e.sig)

        def versig(ctx: EvalCtx) -> Value:
            k = key(ctx)
            if k is BOTTOM:
                return BOTTOM
            s = sig(ctx)
            if s is BOTTOM or type(k) is not bytes or type(s) is not bytes:
                return BOTTOM
            return 1 if ctx.sig_check(k, s, ctx.rtx) else 0
        return versig

    if isinstance(e, A.InIdx):
        return lambda ctx: ctx.input_index

    if isinstance(e, A.OutIdx):
        return lambda ctx: ctx.rtx.inputs[ctx.input_index - 1].index

    txo = _compile_txo(e.txo)

    if isinstance(e, A.TxoField):
        if e.field == "arg":
            def field_arg(ctx: EvalCtx) -> Value:
                r = txo(ctx)
                return BOTTOM if r is None else r[0].outputs[r[1] - 1].arg
            return field_arg

        def field_val(ctx: EvalCtx) -> Value:
            r = txo(ctx)
            return BOTTOM if r is None else r[0].outputs[r[1] - 1].val
        return field_val

    if isinstance(e, A.Verscr):
        lit = e.script

        def verscr(ctx: EvalCtx) -> Value:
            r = txo(ctx)
            if r is None:
                return BOTTOM
            scr = r[0].outputs[r[1] - 1].scr
            return 1 if scr is lit or scr.encoded == lit.encoded else 0
        return verscr

    if isinstance(e, A.Verrec):
        def verrec(ctx: EvalCtx) -> Value:
            r = txo(ctx)
            if r is None:
                return BOTTOM
            mine = _current_script(ctx)
            if mine is None:
                return BOTTOM
            scr = r[0].outputs[r[1] - 1].scr
            return 1 if scr is mine or scr.encoded == mine.encoded else 0
        return verrec

    if isinstance(e, A.InLen):
        def inlen(ctx: EvalCtx) -> Value:
            r = txo(ctx)
            return BOTTOM if r is None else len(r[0].inputs)
        return inlen

    if isinstance(e, A.OutLen):
        def outlen(ctx: EvalCtx) -> Value:
            r = txo(ctx)
            return BOTTOM if r is None else len(r[0].outputs)
        return outlen

    if isinstance(e, A.TxId):
        def txid(ctx: EvalCtx) -> Value:
            r = txo(ctx)
            return BOTTOM if r is None else r[0].output_digest(r[1])
        return txid

    raise TypeError(f"not a script node: {e!r}")
