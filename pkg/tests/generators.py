"""Random scripts and evaluation contexts shared by the script tests."""
from __future__ import annotations

import random

from nctoken.crypto import KeyPair, sign
from nctoken.ledger import Chain, Transaction, TxOutput
from nctoken.script import (
    BinOp,
    Const,
    EvalCtx,
    Hash,
    If,
    InIdx,
    InLen,
    OutIdx,
    OutLen,
    RtxWit,
    SeqAt,
    Size,
    TxId,
    TxoField,
    TxoSel,
    Verrec,
    Verscr,
    Versig,
)
from nctoken.token.scripts import E_BTC, E_FALSE, E_TOK

KEY = KeyPair.derive("generators")
OTHER = KeyPair.derive("generators-other")
LEAF_SCRIPTS = (E_BTC, E_FALSE, Const(1), Const(0))


def random_const(rng: random.Random) -> Const:
    r = rng.random()
    if r < 0.55:
        return Const(rng.choice([0, 1, 2, -1, rng.randint(-300, 300), rng.randint(0, 2**70)]))
    return Const(rng.choice([b"", b"\x00", rng.randbytes(rng.randint(1, 8)), KEY.public_key, OTHER.public_key]))


def random_txo(rng: random.Random, depth: int) -> TxoSel:
    kind = rng.choice(("rtxo", "stxo", "ptxo"))
    if depth > 0 and rng.random() < 0.2:
        return TxoSel(kind, random_script(rng, depth - 1))
    return TxoSel(kind, Const(rng.choice([0, 1, 1, 2, 2, 3, 5])))


def random_script(rng: random.Random, depth: int = 4):
    """Scripts of bounded depth covering every node kind, including ones that evaluate to bottom."""
    if depth <= 0 or rng.random() < 0.15:
        return rng.choice([
            lambda: random_const(rng),
            lambda: random_const(rng),
            lambda: RtxWit(),
            lambda: InIdx(),
            lambda: OutIdx(),
        ])()
    d = depth - 1
    kind = rng.randrange(14)
    if kind < 4:
        return BinOp(rng.choice(("+", "-", "=", "<")), random_script(rng, d), random_script(rng, d))
    if kind == 4:
        return If(random_script(rng, d), random_script(rng, d), random_script(rng, d))
    if kind == 5:
        return SeqAt(TxoField(random_txo(rng, d), "arg"), rng.randint(0, 4))
    if kind == 6:
        return SeqAt(random_script(rng, d), rng.randint(0, 3))
    if kind == 7:
        return Size(random_script(rng, d)) if rng.random() < 0.5 else Hash(random_script(rng, d))
    if kind == 8:
        key = Const(KEY.public_key) if rng.random() < 0.5 else random_script(rng, d)
        return Versig(key, RtxWit() if rng.random() < 0.7 else random_script(rng, d))
    if kind == 9:
        return TxoField(random_txo(rng, d), rng.choice(("arg", "val")))
    if kind == 10:
        return Verscr(rng.choice(LEAF_SCRIPTS), random_txo(rng, d))
    if kind == 11:
        return Verrec(random_txo(rng, d))
    if kind == 12:
        return (InLen if rng.random() < 0.5 else OutLen)(random_txo(rng, d))
    return TxId(random_txo(rng, d))


def random_output(rng: random.Random) -> TxOutput:
    arg = tuple(rng.choice([0, 1, rng.randint(0, 50), KEY.public_key, OTHER.public_key, b"\x07"])
                for _ in range(rng.randint(0, 4)))
    return TxOutput(arg, rng.choice(LEAF_SCRIPTS + (E_TOK,)), rng.randint(0, 20))


def random_context(rng: random.Random) -> EvalCtx:
    """A chain of a coinbase and one child, and a redeeming tx spending outputs of
    both (possibly an unknown one), signed by KEY on some inputs."""
    cb = Transaction((), (), tuple(random_output(rng) for _ in range(rng.randint(1, 4))))
    chain = Chain.genesis(cb)
    child = Transaction((cb.outpoint(1),), ((b"",),), tuple(random_output(rng) for _ in range(rng.randint(1, 3))))
    chain = chain._append_unchecked(child)
    pool = [cb.outpoint(i) for i in range(1, len(cb.outputs) + 1)]
    pool += [child.outpoint(i) for i in range(1, len(child.outputs) + 1)]
    ins = rng.sample(pool, rng.randint(1, min(3, len(pool))))
    outs = tuple(random_output(rng) for _ in range(rng.randint(1, 3)))
    rtx = Transaction(tuple(ins), tuple(() for _ in ins), outs)
    sig = sign(KEY.secret_key, rtx)
    wits = []
    for _ in ins:
        wits.append(rng.choice([(sig,), (sig,), (b"junk",), (), (sig, 1), (rng.randint(0, 9),)]))
    return EvalCtx(chain, rtx.with_witnesses(wits), rng.randint(1, len(ins)))


def _good_txo(rng: random.Random) -> TxoSel:
    return TxoSel(rng.choice(("rtxo", "stxo")), Const(1))


def int_script(rng: random.Random, depth: int = 4):
    """Int-typed scripts: bottom only arises from runtime lookups and comparisons."""
    if depth <= 0 or rng.random() < 0.2:
        return rng.choice([lambda: Const(rng.randint(-5, 40)), lambda: InIdx(), lambda: OutIdx(),
                           lambda: TxoField(_good_txo(rng), "val")])()
    d = depth - 1
    kind = rng.randrange(8)
    if kind < 3:
        return BinOp(rng.choice(("+", "-", "=", "<")), int_script(rng, d), int_script(rng, d))
    if kind == 3:
        return If(int_script(rng, d), int_script(rng, d), int_script(rng, d))
    if kind == 4:
        return BinOp("=", bytes_script(rng, d), bytes_script(rng, d))
    if kind == 5:
        return Size(bytes_script(rng, d))
    if kind == 6:
        return Versig(bytes_script(rng, d), RtxWit())
    return rng.choice([InLen, OutLen, Verrec])(_good_txo(rng))


def bytes_script(rng: random.Random, depth: int = 3):
    if depth <= 0 or rng.random() < 0.3:
        return random_const(rng) if rng.random() < 0.3 else Const(rng.choice([KEY.public_key, b"ab"]))
    d = depth - 1
    kind = rng.randrange(4)
    if kind == 0:
        return Hash(bytes_script(rng, d))
    if kind == 1:
        return If(int_script(rng, d), bytes_script(rng, d), bytes_script(rng, d))
    if kind == 2:
        return TxId(_good_txo(rng))
    return RtxWit()
