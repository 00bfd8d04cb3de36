from __future__ import annotations

import pytest

from conftest import A, B, M
from nctoken.crypto import sign
from nctoken.ledger import Chain, ScriptFailed, Transaction, TxOutput
from nctoken.token import (
    FirstInputNotToken,
    InsufficientUnits,
    MissingKey,
    MixedAsset,
    MixedBurn,
    NonPositiveMint,
    NonZeroValue,
    NotBtcDeposit,
    TokenMismatch,
    UnknownDeposit,
    build_burn,
    build_gen,
    build_give,
    build_join,
    build_split,
    build_xchg,
    read_token,
    sign_inputs,
    tkid_of,
    token_balances,
    tokval_c,
)
from nctoken.token.scripts import E_BTC, E_FALSE, E_TOK, OP_GEN, OP_GIVE, OP_SPLIT
from nctoken.token.spendable import is_spendable


def resign(chain: Chain, tx: Transaction, ring, outputs=None) -> Transaction:
    t = Transaction(tx.inputs, tuple(() for _ in tx.inputs), tuple(outputs or tx.outputs))
    return sign_inputs(chain, t, ring)


def with_arg(out: TxOutput, k: int, v) -> TxOutput:
    a = list(out.arg)
    a[k] = v
    return TxOutput(tuple(a), out.scr, out.val)


@pytest.fixture
def minted(chain, coinbase, ring):
    """A mints 10 units from coinbase output 1."""
    tx = build_gen(chain, coinbase.outpoint(1), 10, ring)
    return chain.append(tx), tx.outpoint(1)


def test_gen(minted, coinbase):
    chain, t = minted
    f = read_token(chain.resolve(t))
    assert (f.op, f.owner, f.tkval) == (OP_GEN, A.public_key, 10)
    assert f.tkid == coinbase.output_digest(1) == tkid_of(chain, coinbase.outpoint(1))
    assert tokval_c(chain, coinbase.outpoint(1)) == 10
    assert token_balances(chain) == {f.tkid: 10}


def test_gen_preconditions(chain, coinbase, ring):
    with pytest.raises(NonZeroValue):
        build_gen(chain, coinbase.outpoint(3), 1, ring)
    with pytest.raises(NonPositiveMint):
        build_gen(chain, coinbase.outpoint(1), 0, ring)
    with pytest.raises(MissingKey):
        build_gen(chain, coinbase.outpoint(1), 1)


def test_split_give_join_burn(minted, ring, coinbase):
    chain, t = minted
    s = build_split(chain, t, 8, B.public_key, ring)
    chain = chain.append(s)
    a8, b2 = s.outpoint(1), s.outpoint(2)
    assert [read_token(chain.resolve(o)).tkval for o in (a8, b2)] == [8, 2]
    assert read_token(chain.resolve(b2)).owner == B.public_key
    g = build_give(chain, a8, B.public_key, ring)
    chain = chain.append(g)
    j = build_join(chain, g.outpoint(1), b2, A.public_key, ring)
    chain = chain.append(j)
    assert read_token(chain.resolve(j.outpoint(1))).tkval == 10
    assert tokval_c(chain, coinbase.outpoint(1)) == 10
    bn = build_burn(chain, [j.outpoint(1)], ring)
    chain = chain.append(bn)
    assert chain.resolve(bn.outpoint(1)).scr is E_FALSE
    assert tokval_c(chain, coinbase.outpoint(1)) == 0
    assert not is_spendable(chain, bn.outpoint(1))


def test_split_cannot_inflate(minted, ring):
    chain, t = minted
    s = build_split(chain, t, 8, B.public_key, ring)
    bad = resign(chain, s, ring, [s.outputs[0], with_arg(s.outputs[1], 2, 3)])
    with pytest.raises(ScriptFailed):
        chain.append(bad)
    neg = resign(chain, s, ring, [with_arg(s.outputs[0], 2, 11), with_arg(s.outputs[1], 2, -1)])
    with pytest.raises(ScriptFailed):
        chain.append(neg)
    with pytest.raises(InsufficientUnits):
        build_split(chain, t, 11, B.public_key, ring)


def test_give_cannot_change_tkid_or_script(minted, ring):
    chain, t = minted
    g = build_give(chain, t, B.public_key, ring)
    with pytest.raises(ScriptFailed):
        chain.append(resign(chain, g, ring, [with_arg(g.outputs[0], 3, b"\x00" * 32)]))
    with pytest.raises(ScriptFailed):
        chain.append(resign(chain, g, ring, [TxOutput(g.outputs[0].arg, E_BTC, 0)]))


def test_owner_must_sign(minted, ring):
    chain, t = minted
    g = build_give(chain, t, M.public_key, sign=False)
    g = g.with_witnesses([(sign(M.secret_key, g),)])
    with pytest.raises(ScriptFailed):
        chain.append(g)


def test_join_of_distinct_tokens_rejected(chain, coinbase, ring):
    ta = build_gen(chain, coinbase.outpoint(1), 10, ring)
    chain = chain.append(ta)
    tb = build_gen(chain, coinbase.outpoint(4), 5, ring)
    chain = chain.append(tb)
    with pytest.raises(TokenMismatch):
        build_join(chain, ta.outpoint(1), tb.outpoint(1), A.public_key, ring)
    forced = build_join(chain, ta.outpoint(1), tb.outpoint(1), A.public_key, ring, check_tokens=False)
    with pytest.raises(ScriptFailed):
        chain.append(forced)


def test_xchg_token_for_bitcoin(minted, ring, coinbase):
    chain, t = minted
    x = build_xchg(chain, t, coinbase.outpoint(5), ring)
    chain = chain.append(x)
    o1, o2 = chain.resolve(x.outpoint(1)), chain.resolve(x.outpoint(2))
    assert read_token(o1).owner == B.public_key and read_token(o1).tkval == 10
    assert o2.scr is E_BTC and o2.arg == (A.public_key,) and o2.val == 3
    with pytest.raises(FirstInputNotToken):
        build_xchg(chain, coinbase.outpoint(3), x.outpoint(1), ring)


def test_xchg_cannot_shortchange(chain, coinbase, ring):
    ta = build_gen(chain, coinbase.outpoint(1), 10, ring)
    chain = chain.append(ta)
    x = build_xchg(chain, ta.outpoint(1), coinbase.outpoint(5), ring)
    cheap = TxOutput(x.outputs[1].arg, E_BTC, 1)
    with pytest.raises(ScriptFailed):
        chain.append(resign(chain, x, ring, [x.outputs[0], cheap]))


def test_builder_errors(minted, ring, coinbase):
    chain, t = minted
    with pytest.raises(NotBtcDeposit):
        build_gen(chain, t, 1, ring)
    with pytest.raises(MixedAsset):
        build_join(chain, t, coinbase.outpoint(3), A.public_key, ring)
    with pytest.raises(MixedBurn):
        build_burn(chain, [t, coinbase.outpoint(3)], ring)
    with pytest.raises(UnknownDeposit):
        build_burn(chain, [], ring)
    with pytest.raises(UnknownDeposit):
        build_give(chain, coinbase.outpoint(1), B.public_key, ring)  # spent by the mint


def test_forged_tokens_are_unspendable(minted, ring, coinbase):
    chain, t = minted
    f = read_token(chain.resolve(t))
    forged = TxOutput((OP_GEN, M.public_key, 100, f.tkid), E_TOK, 0)
    tx = Transaction((coinbase.outpoint(6),), ((),), (forged,))
    tx = tx.with_witnesses([(sign(M.secret_key, tx),)])
    chain = chain.append(tx)  # appending is fine
    fo = tx.outpoint(1)
    assert not is_spendable(chain, fo)
    assert is_spendable(chain, t)
    assert tokval_c(chain, coinbase.outpoint(1)) == 10
    sp = build_split(chain, fo, 50, M.public_key, ring)
    with pytest.raises(ScriptFailed):
        chain.append(sp)


def test_forged_split_output_unspendable(chain, coinbase, ring):
    # a split-shaped output created outside the token protocol
    tx = Transaction((coinbase.outpoint(6),), ((),),
                     (TxOutput((OP_SPLIT, M.public_key, 7, b"\x09" * 32), E_TOK, 0),))
    tx = tx.with_witnesses([(sign(M.secret_key, tx),)])
    chain = chain.append(tx)
    assert not is_spendable(chain, tx.outpoint(1))
    assert not is_spendable(chain, coinbase.outpoint(6))  # spent


def test_spendability_of_plain_outputs(chain, coinbase):
    assert is_spendable(chain, coinbase.outpoint(3))
    odd = Transaction((), (), (TxOutput((b"short",), E_BTC, 1), TxOutput((), E_FALSE, 1)))
    c = Chain.genesis(odd)
    assert not is_spendable(c, odd.outpoint(1))
    assert not is_spendable(c, odd.outpoint(2))


def test_give_op_output_spendable(minted, ring):
    chain, t = minted
    g = build_give(chain, t, B.public_key, ring)
    chain = chain.append(g)
    assert read_token(chain.resolve(g.outpoint(1))).op == OP_GIVE
    assert is_spendable(chain, g.outpoint(1))
