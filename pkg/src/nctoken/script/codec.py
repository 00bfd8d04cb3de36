"""Canonical binary encoding of script ASTs and of runtime values.

Every item is tagged and every variable-length field is length-prefixed, so
the encoding is prefix-free and therefore injective.
"""
from __future__ import annotations

import struct
from typing import TYPE_CHECKING, Union

if TYPE_CHECKING:
    from .ast import Script, TxoSel


class DecodeError(ValueError):
    pass


def int_to_bytes(n: int) -> bytes:
    """Minimal two's-complement big-endian encoding; 0 encodes as one zero byte."""
    return n.to_bytes(((n if n >= 0 else ~n).bit_length() + 8) // 8, "big", signed=True)


def int_from_bytes(b: bytes) -> int:
    return int.from_bytes(b, "big", signed=True)


def _u32(n: int) -> bytes:
    return struct.pack(">I", n)


def _blob(b: bytes) -> bytes:
    return _u32(len(b)) + b


# script node tags
T_INT, T_BYTES, T_BINOP, T_IF, T_SEQAT, T_RTXWIT, T_SIZE, T_HASH = range(1, 9)
T_VERSIG, T_FIELD, T_VERSCR, T_VERREC, T_INIDX, T_OUTIDX, T_INLEN, T_OUTLEN, T_TXID = range(9, 18)

_KIND_CODE = {"rtxo": 0, "stxo": 1, "ptxo": 2}
_KIND_NAME = {v: k for k, v in _KIND_CODE.items()}
_FIELD_CODE = {"arg": 0, "val": 1}
_FIELD_NAME = {v: k for k, v in _FIELD_CODE.items()}


def _txo(t: TxoSel) -> bytes:
    return bytes([_KIND_CODE[t.kind]]) + t.index.encoded


def encode_node(e: Script) -> bytes:
    from . import ast as A

    if isinstance(e, A.Const):
        if isinstance(e.value, int):
            return bytes([T_INT]) + _blob(int_to_bytes(e.value))
        return bytes([T_BYTES]) + _blob(e.value)
    if isinstance(e, A.BinOp):
        return bytes([T_BINOP]) + e.op.encode() + e.left.encoded + e.right.encoded
    if isinstance(e, A.If):
        return bytes([T_IF]) + e.cond.encoded + e.then.encoded + e.orelse.encoded
    if isinstance(e, A.SeqAt):
        return bytes([T_SEQAT]) + _blob(int_to_bytes(e.index)) + e.seq.encoded
    if isinstance(e, A.RtxWit):
        return bytes([T_RTXWIT])
    if isinstance(e, A.Size):
        return bytes([T_SIZE]) + e.arg.encoded
    if isinstance(e, A.Hash):
        return bytes([T_HASH]) + e.arg.encoded
    if isinstance(e, A.Versig):
        return bytes([T_VERSIG]) + e.key.encoded + e.sig.encoded
    if isinstance(e, A.TxoField):
        return bytes([T_FIELD, _FIELD_CODE[e.field]]) + _txo(e.txo)
    if isinstance(e, A.Verscr):
        return bytes([T_VERSCR]) + e.script.encoded + _txo(e.txo)
    if isinstance(e, A.Verrec):
        return bytes([T_VERREC]) + _txo(e.txo)
    if isinstance(e, A.InIdx):
        return bytes([T_INIDX])
    if isinstance(e, A.OutIdx):
        return bytes([T_OUTIDX])
    if isinstance(e, A.InLen):
        return bytes([T_INLEN]) + _txo(e.txo)
    if isinstance(e, A.OutLen):
        return bytes([T_OUTLEN]) + _txo(e.txo)
    if isinstance(e, A.TxId):
        return bytes([T_TXID]) + _txo(e.txo)
    raise TypeError(f"not a script node: {e!r}")


class _Reader:
    def __init__(self, data: bytes, pos: int = 0) -> None:
        self.data = data
        self.pos = pos

    def byte(self) -> int:
        if self.pos >= len(self.data):
            raise DecodeError(f"truncated input at offset {self.pos}")
        b = self.data[self.pos]
        self.pos += 1
        return b

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise DecodeError(f"truncated input at offset {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def blob(self) -> bytes:
        return self.take(self.u32())

    def integer(self) -> int:
        raw = self.blob()
        if not raw or int_to_bytes(int_from_bytes(raw)) != raw:
            raise DecodeError("non-minimal integer encoding")
        return int_from_bytes(raw)


def _read_txo(r: _Reader) -> TxoSel:
    from . import ast as A

    code = r.byte()
    if code not in _KIND_NAME:
        raise DecodeError(f"bad output selector code {code}")
    return A.TxoSel(_KIND_NAME[code], _read_node(r))


def _read_node(r: _Reader) -> Script:
    from . import ast as A

    tag = r.byte()
    if tag == T_INT:
        return A.Const(r.integer())
    if tag == T_BYTES:
        return A.Const(r.blob())
    if tag == T_BINOP:
        op = chr(r.byte())
        if op not in A.BINOPS:
            raise DecodeError(f"bad operator {op!r}")
        left = _read_node(r)
        return A.BinOp(op, left, _read_node(r))
    if tag == T_IF:
        c = _read_node(r)
        t = _read_node(r)
        return A.If(c, t, _read_node(r))
    if tag == T_SEQAT:
        n = r.integer()
        return A.SeqAt(_read_node(r), n)
    if tag == T_RTXWIT:
        return A.RtxWit()
    if tag == T_SIZE:
        return A.Size(_read_node(r))
    if tag == T_HASH:
        return A.Hash(_read_node(r))
    if tag == T_VERSIG:
        k = _read_node(r)
        return A.Versig(k, _read_node(r))
    if tag == T_FIELD:
        code = r.byte()
        if code not in _FIELD_NAME:
            raise DecodeError(f"bad field code {code}")
        return A.TxoField(_read_txo(r), _FIELD_NAME[code])
    if tag == T_VERSCR:
        lit = _read_node(r)
        return A.Verscr(lit, _read_txo(r))
    if tag == T_VERREC:
        return A.Verrec(_read_txo(r))
    if tag == T_INIDX:
        return A.InIdx()
    if tag == T_OUTIDX:
        return A.OutIdx()
    if tag == T_INLEN:
        return A.InLen(_read_txo(r))
    if tag == T_OUTLEN:
        return A.OutLen(_read_txo(r))
    if tag == T_TXID:
        return A.TxId(_read_txo(r))
    raise DecodeError(f"unknown node tag {tag} at offset {r.pos - 1}")


def serialize_script(e: Script) -> bytes:
    return e.encoded


def decode_script(data: bytes) -> Script:
    from .ast import intern

    r = _Reader(data)
    e = _read_node(r)
    if r.pos != len(data):
        raise DecodeError(f"trailing bytes after script at offset {r.pos}")
    return intern(e)


def read_script(data: bytes, pos: int) -> tuple[Script, int]:
    """Decode one script starting at `pos`; returns the node and the next offset."""
    from .ast import intern

    r = _Reader(data, pos)
    e = _read_node(r)
    return intern(e), r.pos


# runtime values: int, bytes, or a tuple of ints/bytes
V_INT, V_BYTES, V_SEQ = 0x20, 0x21, 0x22

Value = Union[int, bytes, tuple]


def encode_value(v: Value) -> bytes:
    if isinstance(v, bool):
        raise TypeError("booleans are not script values")
    if isinstance(v, int):
        return bytes([V_INT]) + _blob(int_to_bytes(v))
    if isinstance(v, bytes):
        return bytes([V_BYTES]) + _blob(v)
    if isinstance(v, tuple):
        return bytes([V_SEQ]) + _u32(len(v)) + b"".join(encode_value(x) for x in v)
    raise TypeError(f"not a value: {v!r}")


def read_value(data: bytes, pos: int) -> tuple[Value, int]:
    r = _Reader(data, pos)
    v = _read_value(r)
    return v, r.pos


def _read_value(r: _Reader) -> Value:
    tag = r.byte()
    if tag == V_INT:
        return r.integer()
    if tag == V_BYTES:
        return r.blob()
    if tag == V_SEQ:
        return tuple(_read_value(r) for _ in range(r.u32()))
    raise DecodeError(f"unknown value tag {tag}")
