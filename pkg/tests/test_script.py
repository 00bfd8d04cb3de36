from __future__ import annotations

import hashlib
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from generators import int_script, random_context, random_script
from nctoken.script import (
    BOTTOM,
    BinOp,
    Const,
    DecodeError,
    EvalCtx,
    If,
    ParseError,
    SeqAt,
    Size,
    evaluate,
    parse_script,
    parse_text,
    reference_eval,
    serialize_script,
    to_text,
)
from nctoken.script.codec import decode_script, int_from_bytes, int_to_bytes
from nctoken.script.values import truthy


def ev(text: str, ctx: EvalCtx | None = None):
    ctx = ctx or random_context(random.Random(0))
    e = parse_text(text)
    a, b = evaluate(e, ctx), reference_eval(e, ctx)
    assert a == b and type(a) is type(b)
    return a


@pytest.mark.parametrize("text,want", [
    ("1 + 2", 3),
    ("5 - 7", -2),
    ("2 < 3", 1),
    ("3 < 3", 0),
    ("3 >= 3", 1),
    ("0x0102 = 0x0102", 1),
    ("1 = 0x01", 0),           # different kinds are unequal, not bottom
    ("if 0 then 1 else 2", 2),
    ("if 7 then 1 else 2", 1),
    ("if 0x then 1 else 2", 1),  # every defined value but 0 is true
    ("true and false", 0),
    ("false or true", 1),
    ("not 0", 1),
    ("size(0x010203)", 3),
    ("size(0)", 1),
    ("size(-128)", 1),
    ("size(128)", 2),
])
def test_examples(text, want):
    assert ev(text) == want


@pytest.mark.parametrize("text", [
    "1 + 0x01", "0x01 < 2", "ctxo.arg.0", "rtxo(99).val", "if rtxo(99).val then 1 else 1",
    "rtxo(99).val = rtxo(99).val", "size(rtxo(1).arg)", "H(rtxo(1).arg)", "versig(1, 2)",
    "rtxo(0x01).val", "false and rtxo(99).val = 1 or rtxo(99).val",
])
def test_bottom_cases(text):
    assert ev(text) is BOTTOM


def test_bottom_strict_in_every_operand():
    ctx = random_context(random.Random(3))
    bot = parse_text("rtxo(99).val")
    for e in [BinOp("+", bot, Const(1)), BinOp("=", Const(1), bot), If(bot, Const(1), Const(1)),
              Size(bot), SeqAt(bot, 1)]:
        assert evaluate(e, ctx) is BOTTOM and reference_eval(e, ctx) is BOTTOM


def test_bottom_has_no_truth_value():
    with pytest.raises(TypeError):
        bool(BOTTOM)
    assert truthy(BOTTOM)  # callers must test `is BOTTOM` first


def test_hash_of_int_uses_minimal_encoding():
    assert ev("H(255)") == hashlib.sha256(b"\x00\xff").digest()
    assert ev("H(-1)") == hashlib.sha256(b"\xff").digest()


@given(st.integers(min_value=-(2**80), max_value=2**80))
def test_int_encoding_minimal_and_invertible(n):
    b = int_to_bytes(n)
    assert int_from_bytes(b) == n
    if len(b) > 1:
        # dropping a byte would not fit: the encoding is minimal
        assert not -(1 << (8 * (len(b) - 1) - 1)) <= n < (1 << (8 * (len(b) - 1) - 1))


def test_random_scripts_roundtrip_text_and_binary():
    rng = random.Random(11)
    for _ in range(500):
        e = random_script(rng)
        assert parse_text(to_text(e)) == e
        assert decode_script(serialize_script(e)) == e
        assert parse_script(serialize_script(e)) == e


def test_differential_small_sample():
    rng = random.Random(5)
    for _ in range(1000):
        e = random_script(rng) if rng.random() < 0.5 else int_script(rng)
        ctx = random_context(rng)
        a, b = evaluate(e, ctx), reference_eval(e, ctx)
        assert a == b and type(a) is type(b), to_text(e)


def test_parse_errors():
    for bad in ["1 +", "if 1 then 2", "rtxo(1).bogus", "(1", "1 2"]:
        with pytest.raises(ParseError):
            parse_text(bad)


def test_decode_rejects_trailing_bytes():
    with pytest.raises(DecodeError):
        decode_script(serialize_script(Const(1)) + b"\x00")


def test_syntactic_equality():
    assert parse_text("1 + 2") != parse_text("2 + 1")
    assert parse_text("1 + 2") == BinOp("+", Const(1), Const(2))
