"""Transactions, outputs, outpoints, and their canonical serialization."""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

from ..crypto import DIGEST_SIZE, hash_bytes
from ..script import Script
from ..script.ast import interned
from ..script.codec import DecodeError, encode_value, read_script, read_value
from ..script.values import is_value

MAGIC = b"NCTX\x01"


class ValidationError(Exception):
    """A transaction cannot be appended to the chain."""


class MalformedTx(ValidationError, ValueError):
    pass


@dataclass(frozen=True, order=True)
class Outpoint:
    txid: bytes
    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.txid, bytes) or len(self.txid) != DIGEST_SIZE:
            raise ValueError("outpoint txid must be a 32-byte digest")
        if isinstance(self.index, bool) or not isinstance(self.index, int) or self.index < 1:
            raise ValueError(f"outpoint index must be >= 1, got {self.index!r}")

    def __str__(self) -> str:
        return f"{self.txid.hex()}:{self.index}"

    @classmethod
    def parse(cls, text: str) -> Outpoint:
        txid, _, idx = text.rpartition(":")
        try:
            return cls(bytes.fromhex(txid), int(idx))
        except ValueError as exc:
            raise ValueError(f"bad outpoint {text!r}: {exc}") from None


@dataclass(frozen=True)
class TxOutput:
    arg: tuple
    scr: Script
    val: int

    def __post_init__(self) -> None:
        if not isinstance(self.arg, tuple):
            object.__setattr__(self, "arg", tuple(self.arg))
        for a in self.arg:
            if isinstance(a, bool) or not isinstance(a, (int, bytes)):
                raise MalformedTx(f"arg entries must be ints or bytes, got {a!r}")
        if not isinstance(self.scr, Script):
            raise MalformedTx("output script must be a script AST")
        if isinstance(self.val, bool) or not isinstance(self.val, int) or self.val < 0:
            raise MalformedTx(f"output value must be a non-negative int, got {self.val!r}")


@dataclass(frozen=True, eq=False)
class Transaction:
    inputs: tuple[Outpoint, ...]
    witnesses: tuple[tuple, ...]
    outputs: tuple[TxOutput, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "witnesses", tuple(tuple(w) for w in self.witnesses))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if len(self.witnesses) != len(self.inputs):
            raise MalformedTx("witness count must equal input count")
        if not self.outputs:
            raise MalformedTx("a transaction needs at least one output")
        for w in self.witnesses:
            for v in w:
                if not is_value(v):
                    raise MalformedTx(f"witness entries must be script values, got {v!r}")

    @property
    def is_coinbase(self) -> bool:
        return not self.inputs

    @cached_property
    def serialized(self) -> bytes:
        return canonical_serialize(self, True)

    @cached_property
    def sighash(self) -> bytes:
        return hash_bytes(canonical_serialize(self, False))

    @cached_property
    def txid(self) -> bytes:
        return hash_bytes(self.serialized)

    def output_digest(self, index: int) -> bytes:
        """Digest identifying output `index`: H(serialization || 8-byte big-endian index)."""
        d = self._cache.get(index)
        if d is None:
            d = hash_bytes(self.serialized + index.to_bytes(8, "big"))
            self._cache[index] = d
        return d

    def outpoint(self, index: int) -> Outpoint:
        if not 1 <= index <= len(self.outputs):
            raise IndexError(f"output index {index} out of range")
        return Outpoint(self.txid, index)

    def with_witnesses(self, witnesses: Iterable[Sequence]) -> Transaction:
        return Transaction(self.inputs, tuple(tuple(w) for w in witnesses), self.outputs)

    def stripped(self) -> Transaction:
        return self.with_witnesses(() for _ in self.inputs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Transaction):
            return NotImplemented
        return self is other or self.serialized == other.serialized

    def __hash__(self) -> int:
        return hash(self.txid)

    def __repr__(self) -> str:
        return f"Transaction({self.txid.hex()[:12]}.., {len(self.inputs)} in, {len(self.outputs)} out)"


def _u32(n: int) -> bytes:
    return struct.pack(">I", n)


def canonical_serialize(tx: Transaction, include_witnesses: bool = True) -> bytes:
    """Injective byte encoding; with include_witnesses=False every witness is written as empty."""
    parts = [MAGIC, _u32(len(tx.inputs))]
    for o in tx.inputs:
        parts.append(o.txid)
        parts.append(o.index.to_bytes(8, "big"))
    for w in tx.witnesses:
        if include_witnesses:
            parts.append(encode_value(tuple(w)))
        else:
            parts.append(encode_value(()))
    parts.append(_u32(len(tx.outputs)))
    for out in tx.outputs:
        parts.append(encode_value(out.arg))
        enc = out.scr.encoded
        parts.append(_u32(len(enc)))
        parts.append(enc)
        parts.append(encode_value(out.val))
    return b"".join(parts)


def parse_tx(data: bytes) -> Transaction:
    try:
        return _parse_tx(data)
    except (DecodeError, struct.error, IndexError, ValueError) as exc:
        raise MalformedTx(f"cannot decode transaction: {exc}") from None


def _parse_tx(data: bytes) -> Transaction:
    if not data.startswith(MAGIC):
        raise MalformedTx("bad transaction magic")
    pos = len(MAGIC)
    (n_in,) = struct.unpack_from(">I", data, pos)
    pos += 4
    inputs = []
    for _ in range(n_in):
        txid = data[pos:pos + 32]
        idx = int.from_bytes(data[pos + 32:pos + 40], "big")
        pos += 40
        inputs.append(Outpoint(txid, idx))
    witnesses = []
    for _ in range(n_in):
        w, pos = read_value(data, pos)
        if not isinstance(w, tuple):
            raise MalformedTx("witness must be a sequence")
        witnesses.append(w)
    (n_out,) = struct.unpack_from(">I", data, pos)
    pos += 4
    outputs = []
    for _ in range(n_out):
        arg, pos = read_value(data, pos)
        if not isinstance(arg, tuple):
            raise MalformedTx("arg must be a sequence")
        (slen,) = struct.unpack_from(">I", data, pos)
        pos += 4
        scr = interned(data[pos:pos + slen])
        if scr is not None:
            end = pos + slen
        else:
            scr, end = read_script(data, pos)
        if end != pos + slen:
            raise MalformedTx("script length mismatch")
        pos = end
        val, pos = read_value(data, pos)
        outputs.append(TxOutput(arg, scr, val))
    if pos != len(data):
        raise MalformedTx("trailing bytes after transaction")
    return Transaction(tuple(inputs), tuple(witnesses), tuple(outputs))


def txid_of(tx: Transaction) -> bytes:
    return tx.txid


# JSON forms: ints stay ints, byte strings are "0x..." strings, scripts use the text syntax

def value_to_json(v: Any) -> Any:
    if isinstance(v, bytes):
        return "0x" + v.hex()
    if isinstance(v, tuple):
        return [value_to_json(x) for x in v]
    return v


def value_from_json(j: Any) -> Any:
    if isinstance(j, bool):
        raise MalformedTx("booleans are not script values")
    if isinstance(j, str):
        if not j.startswith("0x"):
            raise MalformedTx(f"byte strings must be written 0x..., got {j!r}")
        return bytes.fromhex(j[2:])
    if isinstance(j, list):
        return tuple(value_from_json(x) for x in j)
    if isinstance(j, int):
        return j
    raise MalformedTx(f"not a value: {j!r}")


def tx_to_json(tx: Transaction) -> dict:
    from ..script import to_text

    return {
        "txid": tx.txid.hex(),
        "inputs": [str(o) for o in tx.inputs],
        "witnesses": [value_to_json(w) for w in tx.witnesses],
        "outputs": [
            {"arg": value_to_json(o.arg), "scr": to_text(o.scr), "val": o.val}
            for o in tx.outputs
        ],
    }


def tx_from_json(j: dict) -> Transaction:
    from ..script import parse_text

    tx = Transaction(
        tuple(Outpoint.parse(o) for o in j["inputs"]),
        tuple(value_from_json(w) for w in j["witnesses"]),
        tuple(
            TxOutput(value_from_json(o["arg"]), parse_text(o["scr"]), o["val"])
            for o in j["outputs"]
        ),
    )
    if "txid" in j and j["txid"] != tx.txid.hex():
        raise MalformedTx(f"txid mismatch for transaction {j['txid']}")
    return tx
