"""Naive tree-walking evaluator used as a test oracle.

Deliberately written without sharing code with the production evaluator:
it re-walks the tree on every call and re-derives each primitive inline.
"""
from __future__ import annotations

import hashlib

from . import ast as A
from .evaluator import EvalCtx
from .values import BOTTOM


def _int_bytes(n):
    length = 1
    while not -(1 << (8 * length - 1)) <= n < (1 << (8 * length - 1)):
        length += 1
    return n.to_bytes(length, "big", signed=True)


def _lookup(ctx, outpoint):
    tx = ctx.chain.get_tx(outpoint.txid)
    if tx is None or outpoint.index < 1 or outpoint.index > len(tx.outputs):
        return BOTTOM
    return (tx, outpoint.index)


def _txo(t, ctx):
    n = reference_eval(t.index, ctx)
    if n is BOTTOM or isinstance(n, (bytes, tuple)):
        return BOTTOM
    if t.kind == "rtxo":
        if n < 1 or n > len(ctx.rtx.outputs):
            return BOTTOM
        return (ctx.rtx, n)
    if t.kind == "stxo":
        if n < 1 or n > len(ctx.rtx.inputs):
            return BOTTOM
        return _lookup(ctx, ctx.rtx.inputs[n - 1])
    parent = ctx.chain.get_tx(ctx.rtx.inputs[ctx.input_index - 1].txid)
    if parent is None or n < 1 or n > len(parent.inputs):
        return BOTTOM
    return _lookup(ctx, parent.inputs[n - 1])


def reference_eval(e: A.Script, ctx: EvalCtx):
    if isinstance(e, A.Const):
        return e.value

    if isinstance(e, A.If):
        c = reference_eval(e.cond, ctx)
        if c is BOTTOM:
            return BOTTOM
        if isinstance(c, int) and c == 0:
            return reference_eval(e.orelse, ctx)
        return reference_eval(e.then, ctx)

    if isinstance(e, A.BinOp):
        a = reference_eval(e.left, ctx)
        b = reference_eval(e.right, ctx)
        if a is BOTTOM or b is BOTTOM:
            return BOTTOM
        if e.op == "=":
            if isinstance(a, int) != isinstance(b, int):
                return 0
            if isinstance(a, bytes) != isinstance(b, bytes):
                return 0
            if isinstance(a, tuple) != isinstance(b, tuple):
                return 0
            return int(a == b)
        if not isinstance(a, int) or not isinstance(b, int):
            return BOTTOM
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        return int(a < b)

    if isinstance(e, A.SeqAt):
        v = reference_eval(e.seq, ctx)
        if not isinstance(v, tuple) or e.index < 1 or e.index > len(v):
            return BOTTOM
        return v[e.index - 1]

    if isinstance(e, A.RtxWit):
        w = ctx.rtx.witnesses[ctx.input_index - 1]
        if len(w) == 1:
            return w[0]
        return w

    if isinstance(e, A.Size):
        v = reference_eval(e.arg, ctx)
        if isinstance(v, bytes):
            return len(v)
        if isinstance(v, int):
            return len(_int_bytes(v))
        return BOTTOM

    if isinstance(e, A.Hash):
        v = reference_eval(e.arg, ctx)
        if isinstance(v, bytes):
            return hashlib.sha256(v).digest()
        if isinstance(v, int):
            return hashlib.sha256(_int_bytes(v)).digest()
        return BOTTOM

    if isinstance(e, A.Versig):
        k = reference_eval(e.key, ctx)
        s = reference_eval(e.sig, ctx)
        if not isinstance(k, bytes) or not isinstance(s, bytes):
            return BOTTOM
        return int(bool(ctx.sig_check(k, s, ctx.rtx)))

    if isinstance(e, A.InIdx):
        return ctx.input_index

    if isinstance(e, A.OutIdx):
        return ctx.rtx.inputs[ctx.input_index - 1].index

    r = _txo(e.txo, ctx)
    if r is BOTTOM:
        return BOTTOM
    tx, j = r
    out = tx.outputs[j - 1]

    if isinstance(e, A.TxoField):
        return tuple(out.arg) if e.field == "arg" else out.val
    if isinstance(e, A.Verscr):
        return int(A.script_eq(out.scr, e.script))
    if isinstance(e, A.Verrec):
        mine = _lookup(ctx, ctx.rtx.inputs[ctx.input_index - 1])
        if mine is BOTTOM:
            return BOTTOM
        return int(A.script_eq(out.scr, mine[0].outputs[mine[1] - 1].scr))
    if isinstance(e, A.InLen):
        return len(tx.inputs)
    if isinstance(e, A.OutLen):
        return len(tx.outputs)
    if isinstance(e, A.TxId):
        from ..ledger.tx import canonical_serialize

        return hashlib.sha256(canonical_serialize(tx, True) + j.to_bytes(8, "big")).digest()
    raise TypeError(f"not a script node: {e!r}")
